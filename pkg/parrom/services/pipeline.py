"""Orquestación: inicialización, optimización, evaluación y persistencia."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from parrom.core.errors import InitError, InstabilityError
from parrom.schemas.config import OptimConfig, QuadSpec, RunConfig
from parrom.schemas.reports import EvaluationSummary, RunDocument
from parrom.services.grad import fonc_residuals
from parrom.services.gramians import ErrorMetrics, error_metrics, fom_h2l2_norm_sq, h2l2_norm
from parrom.services.init import RomStructure, fit_structure, pirka, trivial_init
from parrom.services.interfaces import ArtifactRepositoryProtocol, InitializerProtocol, OptimizerProtocol
from parrom.services.optim import OptimRun, minimize
from parrom.services.psys import ParametricSystem, error_system
from parrom.services.stability import max_abscissa_over_box

logger = logging.getLogger(__name__)

CONVERGENCE_HEADER = (
    "iteration",
    "objective",
    "grad_norm",
    "rom_change",
    "max_alpha",
    "line_search_evals",
    "step",
    "hessian_updated",
)


class PirkaInitializer:
    """ROM inicial por pIRKA ajustado a la estructura pedida."""

    def __init__(self, structure: RomStructure, *, p_s: int, r_s: int, r: int):
        self.structure = structure
        self.p_s, self.r_s, self.r = p_s, r_s, r

    def initialize(self, fom: ParametricSystem) -> ParametricSystem:
        projected = pirka(fom, self.p_s, self.r_s, self.r).rom
        return fit_structure(projected, self.structure)


class TrivialInitializer:
    def __init__(self, structure: RomStructure, *, r: int, seed: int = 0):
        self.structure = structure
        self.r, self.seed = r, seed

    def initialize(self, fom: ParametricSystem) -> ParametricSystem:
        return trivial_init(self.structure, self.r, self.seed, m=fom.m, n_outputs=fom.n_outputs)


class BfgsOptimizer:
    def minimize(self, fom, rom0, config: OptimConfig, spec: QuadSpec, frozen) -> OptimRun:
        return minimize(fom, rom0, config, spec, frozen)


@dataclass
class ReductionResult:
    """ROM inicial, ROM optimizado (si se optimizó) y el documento de la ejecución."""

    rom_init: ParametricSystem
    rom_opt: ParametricSystem | None
    run: OptimRun | None
    document: RunDocument
    paths: dict[str, str] = field(default_factory=dict)


def relative_error(fom: ParametricSystem, rom: ParametricSystem, spec: QuadSpec, fom_norm_sq: float) -> float:
    """ε = ‖H − Ĥ‖_{H2⊗L2} / ‖H‖_{H2⊗L2}."""
    return h2l2_norm(error_system(fom, rom), spec) / float(np.sqrt(fom_norm_sq))


class ReductionPipeline:
    """Coordina inicialización, optimización y persistencia de una reducción."""

    def __init__(
        self,
        repository: ArtifactRepositoryProtocol,
        *,
        initializer: InitializerProtocol | None = None,
        optimizer: OptimizerProtocol | None = None,
    ):
        """
        Configura las dependencias de la reducción.

        Args:
            repository (ArtifactRepositoryProtocol): Persistencia de artefactos.
            initializer (InitializerProtocol | None): Fuerza un inicializador concreto.
            optimizer (OptimizerProtocol | None): Optimizador; BFGS por defecto.
        """
        self.repository = repository
        self.initializer = initializer
        self.optimizer = optimizer or BfgsOptimizer()

    def _initializer(self, config: RunConfig, structure: RomStructure) -> InitializerProtocol:
        if self.initializer is not None:
            return self.initializer
        if config.init == "trivial":
            return TrivialInitializer(structure, r=config.r, seed=config.seed)
        return PirkaInitializer(structure, p_s=config.p_s, r_s=config.r_s, r=config.r)

    def run(self, fom: ParametricSystem, config: RunConfig) -> ReductionResult:
        """
        Ejecuta la reducción completa y guarda rom_init.json, rom_opt.json,
        convergence.csv y run.json.

        Args:
            fom (ParametricSystem): Modelo de orden completo.
            config (RunConfig): Configuración de la ejecución.

        Returns:
            ReductionResult: ROMs, historial y rutas escritas.
        """
        structure = RomStructure.preset(config.structure, fom, config.frozen)
        rom_init = self._initializer(config, structure).initialize(fom)
        paths = {"rom_init": self.repository.save_system("rom_init", rom_init)}
        init_stability = max_abscissa_over_box(rom_init)
        if not init_stability.max_alpha < 0:
            raise InitError(
                f"ROM inicial inestable: máx α = {init_stability.max_alpha:.6e} en p = {init_stability.argmax_p}"
            )

        norm_sq = fom_h2l2_norm_sq(fom, config.quad)
        eps_init = relative_error(fom, rom_init, config.quad, norm_sq)
        logger.info("ε del ROM inicial: %.6e", eps_init)

        run: OptimRun | None = None
        rom_opt: ParametricSystem | None = None
        eps_opt: float | None = None
        if not config.skip_optimize:
            run = self.optimizer.minimize(fom, rom_init, config.optim, config.quad, structure.frozen)
            rom_opt = run.rom
            eps_opt = relative_error(fom, rom_opt, config.quad, norm_sq)
            logger.info("ε del ROM optimizado: %.6e (%s)", eps_opt, run.status)
            paths["rom_opt"] = self.repository.save_system("rom_opt", rom_opt)
            paths["convergence"] = self.repository.save_table(
                "convergence",
                CONVERGENCE_HEADER,
                (
                    [getattr(record, column) for column in CONVERGENCE_HEADER]
                    for record in run.records
                ),
            )

        document = RunDocument(
            config=config,
            status=run.status if run else "skipped",
            n_variables=run.n_variables if run else 0,
            iterations=run.records if run else [],
            eps_init=eps_init,
            eps_opt=eps_opt,
            init_stability=init_stability,
        )
        paths["run"] = self.repository.save_run(document)
        return ReductionResult(rom_init, rom_opt, run, document, paths)


def _param_header(d: int) -> list[str]:
    return ["p"] if d == 1 else [f"p{k + 1}" for k in range(d)]


class EvaluationService:
    """Métricas de error, condiciones de optimalidad y estabilidad de un ROM."""

    def __init__(self, repository: ArtifactRepositoryProtocol):
        self.repository = repository

    def evaluate(
        self,
        fom: ParametricSystem,
        rom: ParametricSystem,
        spec: QuadSpec | None = None,
        omegas=None,
        params=None,
    ) -> tuple[EvaluationSummary, ErrorMetrics]:
        spec = spec or QuadSpec()
        for label, system in (("FOM", fom), ("ROM", rom)):
            report = max_abscissa_over_box(system)
            if not report.max_alpha < 0:
                raise InstabilityError(
                    f"{label} inestable: máx α = {report.max_alpha:.6e} en p = {report.argmax_p}"
                )
        metrics = error_metrics(fom, rom, spec, omegas=omegas, params=params)
        summary = EvaluationSummary(
            eps=metrics.eps,
            fom_norm=metrics.fom_norm,
            error_norm=metrics.error_norm,
            fonc=fonc_residuals(fom, rom, spec),
            stability=report,
        )
        header = _param_header(fom.d)
        self.repository.save_table(
            "eps_p",
            header + ["eps_p"],
            ([*point, value] for point, value in zip(metrics.params.tolist(), metrics.eps_p)),
        )
        self.repository.save_table(
            "eps_omega_p",
            ["omega"] + header + ["eps_omega_p"],
            (
                [omega, *point, metrics.eps_omega_p[i, j]]
                for i, point in enumerate(metrics.params.tolist())
                for j, omega in enumerate(metrics.omegas)
            ),
        )
        self.repository.save_summary(summary)
        return summary, metrics
