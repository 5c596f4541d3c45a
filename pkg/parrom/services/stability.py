"""Abscisa espectral y su máximo global sobre la caja de parámetros."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.polynomial import Chebyshev
from numpy.polynomial.chebyshev import chebpts2
from numpy.typing import ArrayLike, NDArray
from scipy import optimize

from parrom.core.config import settings
from parrom.core.parallel import parallel_map
from parrom.schemas.reports import StabilityReport
from parrom.services.mateq import gen_eigvals
from parrom.services.psys import ParamBox, ParametricSystem

logger = logging.getLogger(__name__)

ScalarField = Callable[[NDArray[np.float64]], float]


@dataclass
class GlobalMax:
    value: float
    argmax: NDArray[np.float64]
    degree: int
    converged: bool


def spectral_abscissa(A: ArrayLike, E: ArrayLike) -> float:
    """max Re λ del haz λE − A."""
    return float(np.max(gen_eigvals(np.asarray(A, dtype=float), np.asarray(E, dtype=float)).real))


def abscissa_at(sys: ParametricSystem, p: ArrayLike) -> float:
    point = sys.domain.check(p)
    return spectral_abscissa(sys.at("A", point), sys.at("E", point))


def _max_1d(func: ScalarField, box: ParamBox) -> GlobalMax:
    lo, hi = float(box.lower[0]), float(box.upper[0])
    seen: dict[float, float] = {}

    def evaluate(xs: NDArray) -> NDArray:
        points = [float(x) for x in np.clip(xs, lo, hi)]
        values = parallel_map(lambda x: func(np.array([x])), points)
        seen.update(zip(points, values))
        return np.asarray(values)

    degree = settings.cheb_min_degree
    while degree <= settings.cheb_max_degree:
        seen.clear()
        interp = Chebyshev.interpolate(evaluate, degree, domain=[lo, hi])
        coef = np.abs(interp.coef)
        scale = float(coef.max())
        tail = float(coef[-max(3, coef.size // 8) :].max())
        if tail <= settings.cheb_tail_tol * scale:
            candidates = [lo, hi, max(seen, key=seen.get)]
            candidates.extend(_critical_points(interp, scale, lo, hi))
            values = parallel_map(lambda x: func(np.array([x])), candidates)
            best = int(np.argmax(values))
            return GlobalMax(float(values[best]), np.array([candidates[best]]), degree, True)
        degree *= 2

    logger.warning("El interpolante de Chebyshev no convergió; se usa muestreo denso")
    return _dense_1d(func, lo, hi, degree // 2)


def _critical_points(interp: Chebyshev, scale: float, lo: float, hi: float) -> list[float]:
    trimmed = interp.trim(tol=settings.cheb_tail_tol * scale)
    if trimmed.degree() < 2:
        return []
    try:
        roots = trimmed.deriv().roots()
    except (np.linalg.LinAlgError, ValueError):
        return []
    width = hi - lo
    real = roots[np.abs(roots.imag) <= 1e-8 * width].real
    return [float(x) for x in real if lo <= x <= hi]


def _dense_1d(func: ScalarField, lo: float, hi: float, degree: int) -> GlobalMax:
    xs = np.linspace(lo, hi, settings.fallback_samples)
    values = np.asarray(parallel_map(lambda x: func(np.array([x])), list(xs)))
    best = int(np.argmax(values))
    left, right = xs[max(best - 1, 0)], xs[min(best + 1, xs.size - 1)]
    value, arg = float(values[best]), float(xs[best])
    if right > left:
        refined = optimize.minimize_scalar(
            lambda x: -func(np.array([x])), bounds=(left, right), method="bounded"
        )
        if refined.success and -refined.fun > value:
            value, arg = float(-refined.fun), float(refined.x)
    return GlobalMax(value, np.array([arg]), degree, False)


def _max_nd(func: ScalarField, box: ParamBox) -> GlobalMax:
    count = settings.grid_points_per_axis
    axes = [lo + (hi - lo) * (chebpts2(count) + 1) / 2 for lo, hi in zip(box.lower, box.upper)]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, box.d)
    values = np.asarray(parallel_map(func, list(grid)))
    order = np.argsort(values)[::-1][: settings.grid_local_starts]
    best_value, best_point = float(values[order[0]]), grid[order[0]]
    bounds = list(zip(box.lower, box.upper))

    def local(start: NDArray) -> optimize.OptimizeResult:
        return optimize.minimize(
            lambda x: -func(np.clip(x, box.lower, box.upper)),
            start,
            method="Nelder-Mead",
            bounds=bounds,
        )

    results = parallel_map(local, [grid[i] for i in order])
    converged = any(res.success for res in results)
    for res in results:
        point = np.clip(res.x, box.lower, box.upper)
        value = func(point)
        if value > best_value:
            best_value, best_point = value, point
    return GlobalMax(float(best_value), np.asarray(best_point, dtype=float), count - 1, converged)


def global_max(func: ScalarField, box: ParamBox) -> GlobalMax:
    """
    Máximo global de una función escalar continua sobre la caja.

    Para d=1 construye un interpolante de Chebyshev adaptativo y evalúa la
    función en los extremos locales del interpolante; si la cola de
    coeficientes no decae recurre a muestreo denso con refinamiento acotado.
    Para d>1 usa una malla de Chebyshev con arranques locales Nelder–Mead.
    """
    if box.d == 1:
        return _max_1d(func, box)
    return _max_nd(func, box)


def max_abscissa_over_box(rom: ParametricSystem) -> StabilityReport:
    result = global_max(lambda p: abscissa_at(rom, p), rom.domain)
    return StabilityReport(
        max_alpha=result.value,
        argmax_p=result.argmax.tolist(),
        interpolant_degree=result.degree,
        converged=result.converged,
    )


def is_stable(rom: ParametricSystem) -> bool:
    return max_abscissa_over_box(rom).max_alpha < 0
