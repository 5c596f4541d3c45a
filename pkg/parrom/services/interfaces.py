"""Protocolos que definen los contratos de los servicios de reducción."""

from __future__ import annotations

from typing import Iterable, Protocol, Sequence

from parrom.schemas.config import OptimConfig, QuadSpec
from parrom.schemas.reports import EvaluationSummary, RunDocument
from parrom.services.psys import ParametricSystem


class InitializerProtocol(Protocol):
    """Produce un ROM inicial estable para un FOM."""

    def initialize(self, fom: ParametricSystem) -> ParametricSystem: ...


class OptimizerProtocol(Protocol):
    """Optimiza un ROM inicial frente al FOM."""

    def minimize(
        self,
        fom: ParametricSystem,
        rom0: ParametricSystem,
        config: OptimConfig,
        spec: QuadSpec,
        frozen: Iterable[str],
    ): ...


class ArtifactRepositoryProtocol(Protocol):
    """Persistencia de sistemas, ejecuciones y tablas de métricas."""

    def save_system(self, name: str, system: ParametricSystem) -> str: ...

    def load_system(self, path: str) -> ParametricSystem: ...

    def save_run(self, run: RunDocument) -> str: ...

    def save_summary(self, summary: EvaluationSummary) -> str: ...

    def save_table(self, name: str, header: Sequence[str], rows: Iterable[Sequence[float]]) -> str: ...
