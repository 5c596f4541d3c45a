"""Sub-comando `reduce`: pIRKA (o inicialización trivial) seguido de BFGS."""

from __future__ import annotations

import argparse

from pydantic import ValidationError

from parrom.cli.deps import (
    add_quad_arguments,
    get_repository,
    load_fom,
    load_run_config,
    parse_families,
    quad_spec_from_args,
)
from parrom.core.errors import ConfigError
from parrom.schemas.config import ModelSpec, OptimConfig, RunConfig
from parrom.services.pipeline import ReductionPipeline


def register(subparsers) -> None:
    parser = subparsers.add_parser("reduce", help="Calcula un ROM optimizado")
    source = parser.add_mutually_exclusive_group()
    source.add_argument("--model", choices=["synthetic", "penzl", "triple-chain", "baur"])
    source.add_argument("--fom", help="Ruta al JSON del FOM")
    source.add_argument("--config", help="RunConfig o run.json a reproducir")
    parser.add_argument("--n", type=int, default=None, help="Tamaño del modelo generado")
    parser.add_argument("--structure", choices=["SP", "IO", "All"], default="SP")
    parser.add_argument("--freeze", type=parse_families, default=None, help="Familias congeladas, p. ej. 'E,A' o 'none'")
    parser.add_argument("--init", choices=["pirka", "trivial"], default="pirka")
    parser.add_argument("--r", type=int, default=10)
    parser.add_argument("--ps", type=int, default=4)
    parser.add_argument("--rs", type=int, default=4)
    parser.add_argument("--maxit", type=int, default=250)
    parser.add_argument("--stop-tol", type=float, default=1e-5)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--skip-optimize", action="store_true")
    parser.add_argument("--out-dir", default="out")
    add_quad_arguments(parser)
    parser.set_defaults(handler=cmd_reduce)


def _model_spec(args: argparse.Namespace) -> ModelSpec:
    if args.fom:
        return ModelSpec(path=args.fom)
    if not args.model:
        raise ConfigError("Indica --model, --fom o --config")
    params = {}
    if args.n is not None:
        key = {"synthetic": "n", "triple-chain": "n_tilde", "penzl": "n_tail", "baur": "n"}[args.model]
        params[key] = args.n
    return ModelSpec(name=args.model, params=params)


def build_config(args: argparse.Namespace) -> RunConfig:
    if args.config:
        return load_run_config(args.config)
    try:
        return RunConfig(
            model=_model_spec(args),
            structure=args.structure,
            frozen=args.freeze,
            init=args.init,
            r=args.r,
            p_s=args.ps,
            r_s=args.rs,
            quad=quad_spec_from_args(args),
            optim=OptimConfig(max_iter=args.maxit, stop_tol=args.stop_tol),
            output_dir=args.out_dir,
            seed=args.seed,
            skip_optimize=args.skip_optimize,
        )
    except ValidationError as exc:
        raise ConfigError(f"Configuración inválida: {exc.errors()[0]['msg']}") from exc


def cmd_reduce(args: argparse.Namespace) -> int:
    config = build_config(args)
    repository = get_repository(config.output_dir)
    fom = load_fom(config.model, repository)
    result = ReductionPipeline(repository).run(fom, config)
    document = result.document
    line = f"ε inicial = {document.eps_init:.6e}"
    if document.eps_opt is not None:
        line += f", ε optimizado = {document.eps_opt:.6e} ({document.status}, {len(document.iterations) - 1} iteraciones)"
    print(line)
    return 0
