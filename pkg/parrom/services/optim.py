"""Optimización BFGS de las matrices del ROM con compuerta de estabilidad.

Cualquier candidato inestable sobre la caja, o cuyo objetivo no se pueda
evaluar, recibe 𝒥ₛ = +inf; la búsqueda lineal lo trata como un fallo de
decrecimiento suficiente, así que sólo se aceptan ROMs estables.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np
from numpy.typing import NDArray

from parrom.core.errors import FeasibilityViolation, InitError, ParromError
from parrom.schemas.config import OptimConfig, QuadSpec
from parrom.schemas.reports import IterateRecord, StabilityReport
from parrom.services.grad import FAMILIES, GradientSet, gradient
from parrom.services.gramians import h2_norm_sq
from parrom.services.psys import ParametricSystem, error_system
from parrom.services.quad import integrate
from parrom.services.stability import max_abscissa_over_box

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LayoutEntry:
    family: str
    index: int
    shape: tuple[int, int]

    @property
    def size(self) -> int:
        return self.shape[0] * self.shape[1]


@dataclass(frozen=True, eq=False)
class PackedVars:
    """Empaquetado de las matrices libres del ROM en un vector plano."""

    layout: tuple[LayoutEntry, ...]
    template: ParametricSystem

    @classmethod
    def from_rom(cls, rom: ParametricSystem, frozen: Iterable[str] = ()) -> "PackedVars":
        frozen = set(frozen)
        if frozen >= set(FAMILIES):
            raise ParromError("Al menos una familia de matrices debe quedar libre")
        layout = tuple(
            LayoutEntry(family, index, mat.shape)
            for family in FAMILIES
            if family not in frozen
            for index, mat in enumerate(rom.families[family].matrices)
        )
        return cls(layout, rom)

    @property
    def size(self) -> int:
        return sum(entry.size for entry in self.layout)

    @property
    def families(self) -> set[str]:
        return {entry.family for entry in self.layout}

    def pack(self, rom: ParametricSystem) -> NDArray[np.float64]:
        parts = [rom.families[e.family].matrices[e.index].ravel() for e in self.layout]
        return np.concatenate(parts) if parts else np.zeros(0)

    def pack_gradient(self, grads: GradientSet) -> NDArray[np.float64]:
        parts = [grads.family(e.family)[e.index].ravel() for e in self.layout]
        return np.concatenate(parts) if parts else np.zeros(0)

    def unpack(self, x: NDArray) -> ParametricSystem:
        mats = {family: list(self.template.families[family].matrices) for family in FAMILIES}
        offset = 0
        for entry in self.layout:
            mats[entry.family][entry.index] = x[offset : offset + entry.size].reshape(entry.shape)
            offset += entry.size
        return self.template.replace(
            **{family: self.template.families[family].with_matrices(mats[family]) for family in self.families}
        )


@dataclass
class Evaluation:
    """Valor con compuerta; se desempaqueta como (value, grads)."""

    value: float
    grads: GradientSet
    stability: StabilityReport | None = None

    def __iter__(self) -> Iterator:
        return iter((self.value, self.grads))


def gated_objective(
    fom: ParametricSystem, rom: ParametricSystem, spec: QuadSpec | None = None
) -> Evaluation:
    """(+inf, ceros) si el ROM no es estable en toda la caja; si no, (𝒥ₛ, ∇𝒥ₛ)."""
    try:
        report = max_abscissa_over_box(rom)
    except ParromError as exc:
        logger.info("Candidato descartado: %s", exc.detail)
        return Evaluation(float("inf"), GradientSet.zeros_like(rom))
    if not report.max_alpha < 0:
        return Evaluation(float("inf"), GradientSet.zeros_like(rom), report)
    value, grads = gradient(fom, rom, spec)
    return Evaluation(value, grads, report)


def _same_system(a: ParametricSystem, b: ParametricSystem) -> bool:
    if a is b:
        return True
    for family in FAMILIES:
        fa, fb = a.families[family], b.families[family]
        if len(fa) != len(fb):
            return False
        for (ca, ma), (cb, mb) in zip(fa.terms, fb.terms):
            if not ca.same_as(cb) or not np.array_equal(ma, mb):
                return False
    return True


def rom_change(rom_prev: ParametricSystem, rom_next: ParametricSystem, spec: QuadSpec | None = None) -> float:
    """
    ‖Ĥⁱ − Ĥⁱ⁻¹‖ / ‖Ĥⁱ⁻¹‖ en norma H2⊗L2; numerador y denominador comparten
    nodos de cuadratura. +inf si alguna evaluación falla.
    """
    if _same_system(rom_prev, rom_next):
        return 0.0
    diff = error_system(rom_next, rom_prev)

    def integrand(p: NDArray) -> NDArray:
        return np.array([h2_norm_sq(diff, p), h2_norm_sq(rom_prev, p)])

    try:
        num, den = integrate(integrand, rom_prev.domain, spec).value
    except ParromError as exc:
        logger.info("Criterio de cambio = +inf: %s", exc.detail)
        return float("inf")
    if not den > 0:
        return float("inf")
    return float(np.sqrt(max(num, 0.0) / den))


class DenseBfgs:
    """Aproximación densa de la inversa del hessiano con escalado inicial yᵀs/yᵀy."""

    def __init__(self, size: int):
        self.H = np.eye(size)
        self.scaled = False

    def direction(self, g: NDArray) -> NDArray:
        return -self.H @ g

    def update(self, s: NDArray, y: NDArray) -> bool:
        ys = float(y @ s)
        if ys <= 0:
            return False
        if not self.scaled:
            self.H *= ys / float(y @ y)
            self.scaled = True
        rho = 1.0 / ys
        Hy = self.H @ y
        self.H += rho * ((1 + rho * float(y @ Hy)) * np.outer(s, s) - np.outer(s, Hy) - np.outer(Hy, s))
        return True

    def reset(self) -> None:
        self.H = np.eye(self.H.shape[0])
        self.scaled = False


class LimitedBfgs:
    """L-BFGS con recursión de dos bucles."""

    def __init__(self, memory: int):
        self.pairs: deque[tuple[NDArray, NDArray, float]] = deque(maxlen=memory)

    def direction(self, g: NDArray) -> NDArray:
        q = g.copy()
        alphas = []
        for s, y, rho in reversed(self.pairs):
            alpha = rho * float(s @ q)
            q -= alpha * y
            alphas.append(alpha)
        if self.pairs:
            s, y, _ = self.pairs[-1]
            q *= float(s @ y) / float(y @ y)
        for (s, y, rho), alpha in zip(self.pairs, reversed(alphas)):
            beta = rho * float(y @ q)
            q += (alpha - beta) * s
        return -q

    def update(self, s: NDArray, y: NDArray) -> bool:
        ys = float(y @ s)
        if ys <= 0:
            return False
        self.pairs.append((s, y, 1.0 / ys))
        return True

    def reset(self) -> None:
        self.pairs.clear()


@dataclass
class _Step:
    t: float
    x: NDArray
    evaluation: Evaluation
    g: NDArray
    evaluations: int
    wolfe: bool


def _line_search(evaluate, x, f0, g0, direction, config: OptimConfig) -> _Step | None:
    """
    Búsqueda lineal de Wolfe débil por horquillado. Un valor +inf o un fallo
    de Armijo acota por arriba; un fallo de curvatura acota por abajo.
    """
    slope = float(g0 @ direction)
    lo, hi = 0.0, float("inf")
    t = config.initial_step
    armijo: _Step | None = None
    halvings = expansions = evaluations = 0
    while True:
        x_new = x + t * direction
        evaluation, g_new = evaluate(x_new)
        evaluations += 1
        if not np.isfinite(evaluation.value) or evaluation.value > f0 + config.c1 * t * slope:
            hi = t
        elif float(g_new @ direction) < config.c2 * slope:
            lo = t
            armijo = _Step(t, x_new, evaluation, g_new, evaluations, False)
        else:
            return _Step(t, x_new, evaluation, g_new, evaluations, True)

        if np.isfinite(hi):
            halvings += 1
            if halvings > config.max_halvings:
                break
            t = (lo + hi) / 2
        else:
            expansions += 1
            if expansions > config.max_expansions:
                break
            t *= 2
    if armijo is not None:
        armijo.evaluations = evaluations
    return armijo


@dataclass
class OptimRun:
    rom: ParametricSystem
    status: str
    n_variables: int
    records: list[IterateRecord] = field(default_factory=list)

    @property
    def objectives(self) -> list[float]:
        return [record.objective for record in self.records]


def minimize(
    fom: ParametricSystem,
    rom0: ParametricSystem,
    config: OptimConfig | None = None,
    spec: QuadSpec | None = None,
    frozen: Iterable[str] = (),
) -> OptimRun:
    """
    BFGS sobre las matrices libres del ROM con compuerta de estabilidad.

    Args:
        fom (ParametricSystem): Modelo de orden completo.
        rom0 (ParametricSystem): ROM inicial, estable en toda la caja.
        config (OptimConfig | None): Parámetros del optimizador.
        spec (QuadSpec | None): Cuadratura del objetivo y del criterio de parada.
        frozen (Iterable[str]): Familias que no se optimizan ("E", "A", "B", "C").

    Returns:
        OptimRun: Historial de iterados, ROM final y estado.
    """
    config = config or OptimConfig()
    packing = PackedVars.from_rom(rom0, frozen)

    def evaluate(x: NDArray) -> tuple[Evaluation, NDArray]:
        evaluation = gated_objective(fom, packing.unpack(x), spec)
        return evaluation, packing.pack_gradient(evaluation.grads)

    x = packing.pack(rom0)
    current, g = evaluate(x)
    if current.stability is None or not current.stability.max_alpha < 0:
        raise InitError()
    if not np.isfinite(current.value):
        raise InitError("No se pudo evaluar el objetivo en el ROM inicial")

    rom = rom0
    records = [
        IterateRecord(
            iteration=0,
            objective=current.value,
            grad_norm=float(np.linalg.norm(g)),
            max_alpha=current.stability.max_alpha,
        )
    ]
    strategy = LimitedBfgs(config.lbfgs_memory) if packing.size > config.lbfgs_threshold else DenseBfgs(packing.size)
    logger.info("Optimizando %d variables (%s)", packing.size, type(strategy).__name__)
    status = "max_iter"

    for iteration in range(1, config.max_iter + 1):
        if np.linalg.norm(g) <= config.stationary_tol * max(1.0, abs(current.value)):
            records.append(
                IterateRecord(
                    iteration=iteration,
                    objective=current.value,
                    grad_norm=float(np.linalg.norm(g)),
                    rom_change=0.0,
                    max_alpha=current.stability.max_alpha,
                )
            )
            status = "tol_met"
            break

        direction = strategy.direction(g)
        if not float(g @ direction) < 0:
            strategy.reset()
            direction = -g
        step = _line_search(evaluate, x, current.value, g, direction, config)
        if step is None:
            logger.warning("Búsqueda lineal sin punto aceptable en la iteración %d", iteration)
            status = "line_search_failed"
            break

        stability = step.evaluation.stability
        if stability is None or not stability.max_alpha < 0:
            raise FeasibilityViolation()
        updated = step.wolfe and strategy.update(step.x - x, step.g - g)
        rom_next = packing.unpack(step.x)
        change = rom_change(rom, rom_next, spec)
        records.append(
            IterateRecord(
                iteration=iteration,
                objective=step.evaluation.value,
                grad_norm=float(np.linalg.norm(step.g)),
                rom_change=change,
                max_alpha=stability.max_alpha,
                line_search_evals=step.evaluations,
                step=step.t,
                hessian_updated=updated,
            )
        )
        logger.info(
            "iter %d: 𝒥ₛ=%.10e ‖∇‖=%.3e cambio=%.3e α=%.3e",
            iteration,
            step.evaluation.value,
            np.linalg.norm(step.g),
            change,
            stability.max_alpha,
        )
        x, g, current, rom = step.x, step.g, step.evaluation, rom_next
        if change < config.stop_tol:
            status = "tol_met"
            break

    return OptimRun(rom=rom, status=status, n_variables=packing.size, records=records)
