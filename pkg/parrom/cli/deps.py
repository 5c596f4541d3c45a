"""Utilidades compartidas por los sub-comandos de la CLI."""

from __future__ import annotations

import argparse
import json
from pathlib import Path

from pydantic import ValidationError

from parrom.core.errors import ConfigError
from parrom.schemas.config import ModelSpec, QuadSpec, RunConfig
from parrom.services.bench import generate
from parrom.services.psys import ParametricSystem
from parrom.services.repository import ArtifactRepository


def get_repository(output_dir: str) -> ArtifactRepository:
    return ArtifactRepository(output_dir)


def load_fom(model: ModelSpec, repository: ArtifactRepository) -> ParametricSystem:
    if model.path is not None:
        return repository.load_system(model.path)
    return generate(model.name, **model.params).system


def parse_floats(raw: str) -> list[float]:
    """'0.1,0.5' -> [0.1, 0.5]."""
    try:
        return [float(item) for item in raw.split(",") if item.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"Lista de números inválida: '{raw}'") from exc


def parse_families(raw: str) -> list[str]:
    """'E,A' -> ['E', 'A']; 'none' -> []."""
    if raw.strip().lower() in ("", "none"):
        return []
    families = [item.strip() for item in raw.split(",")]
    unknown = [item for item in families if item not in ("E", "A", "B", "C")]
    if unknown:
        raise argparse.ArgumentTypeError(f"Familias desconocidas: {unknown}")
    return families


def add_quad_arguments(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("cuadratura")
    group.add_argument("--quad-mode", choices=["adaptive", "tensor", "discrete"], default="adaptive")
    group.add_argument("--quad-points", type=parse_floats, default=None, help="Puntos del modo discreto (d=1)")
    group.add_argument("--quad-nodes", type=int, default=8, help="Nodos Gauss–Legendre por eje (modo tensor)")
    group.add_argument("--abs-tol", type=float, default=None)
    group.add_argument("--rel-tol", type=float, default=None)


def quad_spec_from_args(args: argparse.Namespace) -> QuadSpec:
    values: dict = {"mode": args.quad_mode, "nodes_per_axis": args.quad_nodes}
    if args.abs_tol is not None:
        values["abs_tol"] = args.abs_tol
    if args.rel_tol is not None:
        values["rel_tol"] = args.rel_tol
    if args.quad_points:
        values["points"] = [[point] for point in args.quad_points]
    try:
        return QuadSpec(**values)
    except ValidationError as exc:
        raise ConfigError(f"Cuadratura inválida: {exc.errors()[0]['msg']}") from exc


def load_run_config(path: str) -> RunConfig:
    """Lee un RunConfig suelto o el campo `config` de un run.json previo."""
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
        return RunConfig.model_validate(raw.get("config", raw))
    except (OSError, json.JSONDecodeError, ValidationError, AttributeError) as exc:
        raise ConfigError(f"No se pudo leer la configuración {path}") from exc
