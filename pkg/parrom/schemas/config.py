from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

from parrom.core.config import settings


class QuadSpec(BaseModel):
    """Regla de cuadratura sobre la caja de parámetros."""

    model_config = ConfigDict(frozen=True)

    mode: Literal["adaptive", "tensor", "discrete"] = "adaptive"
    abs_tol: float = Field(default_factory=lambda: settings.quad_abs_tol, gt=0)
    rel_tol: float = Field(default_factory=lambda: settings.quad_rel_tol, gt=0)
    max_panels: int = Field(default_factory=lambda: settings.quad_max_panels, ge=1)
    nodes_per_axis: int = Field(default=8, ge=1)
    points: list[list[float]] | None = None

    @model_validator(mode="after")
    def check_points(self) -> "QuadSpec":
        if self.mode == "discrete" and not self.points:
            raise ValueError("El modo discreto requiere al menos un punto")
        return self

    @classmethod
    def adaptive(cls, abs_tol: float | None = None, rel_tol: float | None = None) -> "QuadSpec":
        values: dict[str, Any] = {"mode": "adaptive"}
        if abs_tol is not None:
            values["abs_tol"] = abs_tol
        if rel_tol is not None:
            values["rel_tol"] = rel_tol
        return cls(**values)

    @classmethod
    def tensor(cls, nodes_per_axis: int) -> "QuadSpec":
        return cls(mode="tensor", nodes_per_axis=nodes_per_axis)

    @classmethod
    def discrete(cls, points) -> "QuadSpec":
        rows = [[float(v) for v in (pt if hasattr(pt, "__len__") else [pt])] for pt in points]
        return cls(mode="discrete", points=rows)


class OptimConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    max_iter: int = Field(default=250, ge=1)
    stop_tol: float = Field(default=1e-5, gt=0)
    c1: float = 1e-4
    c2: float = 0.9
    initial_step: float = Field(default=1.0, gt=0)
    max_halvings: int = Field(default=60, ge=1)
    max_expansions: int = Field(default=30, ge=0)
    lbfgs_threshold: int = Field(default=5000, ge=1)
    lbfgs_memory: int = Field(default=20, ge=1)
    stationary_tol: float = Field(default=1e-10, ge=0)

    @model_validator(mode="after")
    def check_wolfe(self) -> "OptimConfig":
        if not 0 < self.c1 < self.c2 < 1:
            raise ValueError("Se requiere 0 < c1 < c2 < 1")
        return self


class ModelSpec(BaseModel):
    """Modelo de orden completo: generador con parámetros o ruta a un JSON."""

    name: Literal["synthetic", "penzl", "triple-chain", "baur"] | None = None
    params: dict[str, Any] = Field(default_factory=dict)
    path: str | None = None

    @model_validator(mode="after")
    def check_source(self) -> "ModelSpec":
        if (self.name is None) == (self.path is None):
            raise ValueError("Indica exactamente uno de: nombre de generador o ruta JSON")
        return self


class RunConfig(BaseModel):
    model: ModelSpec
    structure: Literal["SP", "IO", "All"] = "SP"
    frozen: list[Literal["E", "A", "B", "C"]] | None = None
    init: Literal["pirka", "trivial"] = "pirka"
    r: int = Field(default=10, ge=1)
    p_s: int = Field(default=4, ge=1)
    r_s: int = Field(default=4, ge=1)
    quad: QuadSpec = Field(default_factory=QuadSpec)
    optim: OptimConfig = Field(default_factory=OptimConfig)
    output_dir: str = "out"
    seed: int = 0
    skip_optimize: bool = False
