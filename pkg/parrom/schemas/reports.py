from typing import Literal

from pydantic import BaseModel

from parrom.schemas.config import RunConfig


class StabilityReport(BaseModel):
    max_alpha: float
    argmax_p: list[float]
    interpolant_degree: int
    converged: bool


class IterateRecord(BaseModel):
    iteration: int
    objective: float
    grad_norm: float
    rom_change: float | None = None
    max_alpha: float
    line_search_evals: int = 0
    step: float = 0.0
    hessian_updated: bool = False


class ResidualItem(BaseModel):
    label: str
    norm: float


class RunDocument(BaseModel):
    """Contenido de run.json: configuración completa más el resultado."""

    config: RunConfig
    status: Literal["tol_met", "max_iter", "line_search_failed", "skipped"]
    n_variables: int
    iterations: list[IterateRecord]
    eps_init: float | None = None
    eps_opt: float | None = None
    init_stability: StabilityReport | None = None


class EvaluationSummary(BaseModel):
    eps: float
    fom_norm: float
    error_norm: float
    fonc: list[ResidualItem]
    stability: StabilityReport
