"""Sub-comando `evaluate`: métricas de error, FONC y estabilidad de un ROM."""

from __future__ import annotations

import argparse

import numpy as np

from parrom.cli.deps import add_quad_arguments, get_repository, parse_floats, quad_spec_from_args
from parrom.services.pipeline import EvaluationService


def register(subparsers) -> None:
    parser = subparsers.add_parser("evaluate", help="Evalúa un ROM frente a su FOM")
    parser.add_argument("fom", help="JSON del FOM")
    parser.add_argument("rom", help="JSON del ROM")
    parser.add_argument("--out-dir", default="out")
    parser.add_argument("--omega-range", type=parse_floats, default=[-2.0, 4.0], help="log10 de ω: 'a,b'")
    parser.add_argument("--omega-points", type=int, default=101)
    parser.add_argument("--param-points", type=int, default=101)
    add_quad_arguments(parser)
    parser.set_defaults(handler=cmd_evaluate)


def cmd_evaluate(args: argparse.Namespace) -> int:
    repository = get_repository(args.out_dir)
    fom = repository.load_system(args.fom)
    rom = repository.load_system(args.rom)
    low, high = args.omega_range
    summary, _ = EvaluationService(repository).evaluate(
        fom,
        rom,
        quad_spec_from_args(args),
        omegas=np.logspace(low, high, args.omega_points),
        params=fom.domain.grid(args.param_points),
    )
    worst = max((item.norm for item in summary.fonc), default=0.0)
    print(f"ε = {summary.eps:.6e}, máx FONC = {worst:.3e}, máx α = {summary.stability.max_alpha:.6g}")
    return 0
