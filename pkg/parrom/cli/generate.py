"""Sub-comando `generate-model`: escribe el JSON de un modelo de prueba."""

from __future__ import annotations

import argparse
import logging

from parrom.cli.deps import get_repository, parse_floats
from parrom.services.bench import generate
from parrom.services.stability import max_abscissa_over_box

logger = logging.getLogger(__name__)

MODELS = ("synthetic", "penzl", "triple-chain", "baur")


def register(subparsers) -> None:
    parser = subparsers.add_parser("generate-model", help="Genera un modelo de prueba en JSON")
    parser.add_argument("model", choices=MODELS)
    parser.add_argument("--n", type=int, default=None, help="Orden (synthetic, baur) o ñ (triple-chain)")
    parser.add_argument("--n-tail", type=int, default=None, help="Longitud de la cola diagonal (penzl)")
    parser.add_argument("--box", type=parse_floats, default=None, help="Intervalo de parámetros 'a,b'")
    parser.add_argument("--seed", type=int, default=0, help="Semilla (baur)")
    parser.add_argument("--out-dir", default="out")
    parser.add_argument("--name", default=None, help="Nombre del archivo sin extensión")
    parser.set_defaults(handler=cmd_generate)


def _params(args: argparse.Namespace) -> dict:
    params: dict = {}
    if args.model == "baur":
        params["n"] = args.n or 10
        params["seed"] = args.seed
        return params
    if args.box is not None:
        params["box"] = tuple(args.box)
    if args.model == "synthetic" and args.n is not None:
        params["n"] = args.n
    if args.model == "triple-chain" and args.n is not None:
        params["n_tilde"] = args.n
    if args.model == "penzl" and args.n_tail is not None:
        params["n_tail"] = args.n_tail
    return params


def cmd_generate(args: argparse.Namespace) -> int:
    model = generate(args.model, **_params(args))
    path = get_repository(args.out_dir).save_system(args.name or args.model, model.system)
    report = max_abscissa_over_box(model.system)
    print(f"{path}: n = {model.system.n}, max α = {report.max_alpha:.6g} en p = {report.argmax_p}")
    logger.info("%s", model.description)
    return 0
