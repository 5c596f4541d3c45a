"""Cuadratura sobre la caja de parámetros para integrandos vectoriales.

Todas las componentes comparten los mismos puntos de evaluación. El modo
adaptativo usa paneles Gauss–Kronrod 7/15 en producto tensorial (error por
eje con el escalado de QUADPACK) y biseca el panel de mayor error por el eje
con mayor error estimado.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np
from numpy.polynomial.legendre import leggauss
from numpy.typing import ArrayLike, NDArray

from parrom.core.errors import DomainError, IntegrandFailure
from parrom.core.parallel import parallel_map
from parrom.schemas.config import QuadSpec
from parrom.services.psys import ParamBox

logger = logging.getLogger(__name__)

Integrand = Callable[[NDArray[np.float64]], ArrayLike]

_K15_HALF = np.array(
    [
        0.991455371120812639,
        0.949107912342758525,
        0.864864423359769073,
        0.741531185599394440,
        0.586087235467691130,
        0.405845151377397167,
        0.207784955007898468,
    ]
)
_K15_HALF_WEIGHTS = np.array(
    [
        0.022935322010529225,
        0.063092092629978553,
        0.104790010322250184,
        0.140653259715525919,
        0.169004726639267903,
        0.190350578064785410,
        0.204432940075298892,
    ]
)
_K15_CENTER_WEIGHT = 0.209482141084727828
_G7_HALF_WEIGHTS = np.array([0.129484966168869693, 0.279705391489276668, 0.381830050505118945])
_G7_CENTER_WEIGHT = 0.417959183673469388

# nodos ascendentes en [-1, 1]; los de Gauss son los de índice impar
KRONROD_NODES = np.concatenate([-_K15_HALF, [0.0], _K15_HALF[::-1]])
KRONROD_WEIGHTS = np.concatenate([_K15_HALF_WEIGHTS, [_K15_CENTER_WEIGHT], _K15_HALF_WEIGHTS[::-1]])
GAUSS_WEIGHTS = np.zeros(15)
GAUSS_WEIGHTS[[1, 3, 5]] = _G7_HALF_WEIGHTS
GAUSS_WEIGHTS[7] = _G7_CENTER_WEIGHT
GAUSS_WEIGHTS[[13, 11, 9]] = _G7_HALF_WEIGHTS


@dataclass
class QuadResult:
    """Resultado de `integrate`; se puede desempaquetar como (value, error)."""

    value: NDArray[np.float64]
    error: NDArray[np.float64]
    evaluations: int
    panels: int = 1
    converged: bool = True

    def __iter__(self) -> Iterator[NDArray[np.float64]]:
        return iter((self.value, self.error))


@dataclass
class _Panel:
    lower: NDArray[np.float64]
    upper: NDArray[np.float64]
    value: NDArray[np.float64]
    axis_errors: NDArray[np.float64]  # (d, L)

    @property
    def error(self) -> NDArray[np.float64]:
        return self.axis_errors.sum(axis=0)


def _evaluate(f: Integrand, points: NDArray[np.float64]) -> NDArray[np.float64]:
    def call(point: NDArray[np.float64]) -> NDArray[np.float64]:
        value = np.atleast_1d(np.asarray(f(point), dtype=float)).ravel()
        if not np.all(np.isfinite(value)):
            raise IntegrandFailure(point.tolist())
        return value

    values = parallel_map(call, list(points))
    lengths = {v.size for v in values}
    if len(lengths) != 1:
        raise IntegrandFailure(points[0].tolist(), "El integrando cambió de longitud entre puntos")
    return np.stack(values)


def _panel_nodes(lower: NDArray, upper: NDArray) -> NDArray[np.float64]:
    half = (upper - lower) / 2
    mid = (upper + lower) / 2
    axes = [mid[k] + half[k] * KRONROD_NODES for k in range(lower.size)]
    return np.array(list(itertools.product(*axes)), dtype=float)


def _panel_rules(d: int) -> tuple[NDArray, NDArray]:
    """Pesos tensoriales Kronrod (15^d,) y, por eje, la regla con Gauss en ese eje (d, 15^d)."""
    kronrod = np.ones(1)
    for _ in range(d):
        kronrod = np.multiply.outer(kronrod, KRONROD_WEIGHTS).ravel()
    mixed = []
    for axis in range(d):
        weights = np.ones(1)
        for k in range(d):
            weights = np.multiply.outer(weights, GAUSS_WEIGHTS if k == axis else KRONROD_WEIGHTS).ravel()
        mixed.append(weights)
    return kronrod, np.array(mixed)


def _build_panel(
    lower: NDArray, upper: NDArray, values: NDArray, rules: tuple[NDArray, NDArray]
) -> _Panel:
    kronrod, mixed = rules
    half = (upper - lower) / 2
    jac = float(np.prod(half))
    k_value = jac * (kronrod @ values)
    raw = np.abs(k_value[None, :] - jac * (mixed @ values))
    # escalado de QUADPACK: resasc mide la variación del integrando en el panel
    mean = k_value / (jac * 2**lower.size)
    resasc = jac * (kronrod @ np.abs(values - mean[None, :]))
    scaled = np.where(
        resasc > 0,
        resasc * np.minimum(1.0, (200 * raw / np.where(resasc > 0, resasc, 1.0)) ** 1.5),
        raw,
    )
    resabs = jac * (kronrod @ np.abs(values))
    axis_errors = np.maximum(scaled, 50 * np.finfo(float).eps * resabs[None, :])
    return _Panel(lower, upper, k_value, axis_errors)


def _adaptive(f: Integrand, box: ParamBox, spec: QuadSpec) -> QuadResult:
    d = box.d
    rules = _panel_rules(d)
    per_panel = 15**d
    panels = [_build_panel(box.lower, box.upper, _evaluate(f, _panel_nodes(box.lower, box.upper)), rules)]
    evaluations = per_panel

    while True:
        value = np.sum([panel.value for panel in panels], axis=0)
        error = np.sum([panel.error for panel in panels], axis=0)
        tol = np.maximum(spec.abs_tol, spec.rel_tol * np.abs(value))
        if np.all(error <= tol):
            return QuadResult(value, error, evaluations, len(panels), True)
        if len(panels) >= spec.max_panels:
            logger.warning(
                "Cuadratura sin converger tras %d paneles (error %.3e)", len(panels), float(np.max(error / tol))
            )
            return QuadResult(value, error, evaluations, len(panels), False)

        scores = [float(np.max(panel.error / tol)) for panel in panels]
        worst = int(np.argmax(scores))
        panel = panels[worst]
        axis = int(np.argmax(np.max(panel.axis_errors / tol[None, :], axis=1)))
        middle = (panel.lower[axis] + panel.upper[axis]) / 2
        left_upper = panel.upper.copy()
        left_upper[axis] = middle
        right_lower = panel.lower.copy()
        right_lower[axis] = middle
        children = [(panel.lower, left_upper), (right_lower, panel.upper)]
        nodes = np.concatenate([_panel_nodes(lo, hi) for lo, hi in children])
        values = _evaluate(f, nodes)
        evaluations += 2 * per_panel
        panels[worst : worst + 1] = [
            _build_panel(lo, hi, values[i * per_panel : (i + 1) * per_panel], rules)
            for i, (lo, hi) in enumerate(children)
        ]


def _tensor(f: Integrand, box: ParamBox, spec: QuadSpec) -> QuadResult:
    x, w = leggauss(spec.nodes_per_axis)
    half = (box.upper - box.lower) / 2
    mid = (box.upper + box.lower) / 2
    axes = [mid[k] + half[k] * x for k in range(box.d)]
    points = np.array(list(itertools.product(*axes)), dtype=float)
    weights = np.ones(1)
    for k in range(box.d):
        weights = np.multiply.outer(weights, half[k] * w).ravel()
    values = _evaluate(f, points)
    value = weights @ values
    return QuadResult(value, np.zeros_like(value), len(points))


def _discrete(f: Integrand, box: ParamBox, spec: QuadSpec) -> QuadResult:
    points = np.array(spec.points, dtype=float).reshape(len(spec.points), -1)
    for point in points:
        if not box.contains(point):
            raise DomainError(f"Punto discreto {point.tolist()} fuera de la caja")
    values = _evaluate(f, points)
    value = values.sum(axis=0)
    return QuadResult(value, np.zeros_like(value), len(points))


def integrate(f: Integrand, box: ParamBox, spec: QuadSpec | None = None) -> QuadResult:
    """
    Integra un integrando vectorial sobre la caja.

    Args:
        f (Integrand): p ↦ vector real de longitud L (la misma en todos los puntos).
        box (ParamBox): Dominio de integración.
        spec (QuadSpec | None): Regla; adaptativa por defecto.

    Returns:
        QuadResult: Valor, estimación de error y contadores.
    """
    spec = spec or QuadSpec()
    if spec.mode == "tensor":
        return _tensor(f, box, spec)
    if spec.mode == "discrete":
        return _discrete(f, box, spec)
    return _adaptive(f, box, spec)
