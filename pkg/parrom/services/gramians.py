"""Bloques de gramianos, normas H2 por parámetro, objetivo reducido 𝒥ₛ y
normas/errores H2⊗L2."""

from __future__ import annotations

import logging
import threading
from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np
from numpy.typing import ArrayLike, NDArray

from parrom.core.errors import ParromError
from parrom.core.parallel import parallel_map
from parrom.schemas.config import QuadSpec
from parrom.services.mateq import LyapProblem, SylvProblem, solve_lyap, solve_sylv
from parrom.services.psys import ParametricSystem, error_system, transfer_eval
from parrom.services.quad import integrate

logger = logging.getLogger(__name__)

Which = Literal["controllability", "observability", "both"]


@dataclass(frozen=True, eq=False)
class GramianBlocks:
    """P̃ (n×r), P̂ (r×r), Q̃ (n×r), Q̂ (r×r) en `at_p`; los no pedidos quedan en None."""

    at_p: NDArray[np.float64]
    p_mix: NDArray[np.float64] | None = None
    p_red: NDArray[np.float64] | None = None
    q_mix: NDArray[np.float64] | None = None
    q_red: NDArray[np.float64] | None = None


class GramianCache:
    """Caché de bloques por punto de cuadratura, con clave en los bytes exactos de p."""

    def __init__(self) -> None:
        self._store: dict[bytes, GramianBlocks] = {}
        self._lock = threading.Lock()

    def get_or_compute(self, p: NDArray, compute: Callable[[], GramianBlocks]) -> GramianBlocks:
        key = np.ascontiguousarray(p, dtype=float).tobytes()
        with self._lock:
            cached = self._store.get(key)
        if cached is not None:
            return cached
        blocks = compute()
        with self._lock:
            self._store[key] = blocks
        return blocks

    def __len__(self) -> int:
        return len(self._store)


def gramian_blocks(
    fom: ParametricSystem, rom: ParametricSystem, p: ArrayLike, which: Which = "both"
) -> GramianBlocks:
    """
    Resuelve las ecuaciones mixtas y reducidas en `p`.

    Args:
        fom (ParametricSystem): Modelo de orden completo.
        rom (ParametricSystem): Modelo reducido.
        p (ArrayLike): Punto de la caja.
        which (Which): Lado a calcular.

    Returns:
        GramianBlocks: Bloques solicitados.
    """
    E, A, B, C = fom.matrices(p)
    Er, Ar, Br, Cr = rom.matrices(p)
    blocks: dict[str, NDArray] = {}
    if which in ("controllability", "both"):
        blocks["p_mix"] = solve_sylv(SylvProblem(A, E, Ar, Er, B @ Br.T))
        blocks["p_red"] = solve_lyap(LyapProblem(Ar, Er, Br @ Br.T))
    if which in ("observability", "both"):
        blocks["q_mix"] = solve_sylv(SylvProblem(A, E, Ar, Er, -C.T @ Cr, transposed=True))
        blocks["q_red"] = solve_lyap(LyapProblem(Ar, Er, Cr.T @ Cr, transposed=True))
    return GramianBlocks(at_p=np.asarray(p, dtype=float).ravel(), **blocks)


def h2_norm_sq(
    sys: ParametricSystem, p: ArrayLike, side: Literal["controllability", "observability"] = "controllability"
) -> float:
    """‖H(·; p)‖²_{H2} como tr(C P Cᵀ) o, por el lado de observabilidad, tr(Bᵀ Q B)."""
    E, A, B, C = sys.matrices(p)
    if side == "controllability":
        P = solve_lyap(LyapProblem(A, E, B @ B.T))
        return float(np.trace(C @ P @ C.T))
    Q = solve_lyap(LyapProblem(A, E, C.T @ C, transposed=True))
    return float(np.trace(B.T @ Q @ B))


def objective_integrand(blocks: GramianBlocks, C: NDArray, Cr: NDArray) -> float:
    """tr(Ĉ P̂ Ĉᵀ − 2 C P̃ Ĉᵀ) en un punto."""
    return float(np.trace(Cr @ blocks.p_red @ Cr.T) - 2 * np.trace(C @ blocks.p_mix @ Cr.T))


def objective_Js(
    fom: ParametricSystem,
    rom: ParametricSystem,
    spec: QuadSpec | None = None,
    cache: GramianCache | None = None,
) -> float:
    """𝒥ₛ = ∫ tr(Ĉ P̂ Ĉᵀ − 2 C P̃ Ĉᵀ) dp; +∞ si falla algún punto."""
    cache = cache or GramianCache()

    def integrand(p: NDArray) -> float:
        blocks = cache.get_or_compute(p, lambda: gramian_blocks(fom, rom, p, "controllability"))
        return objective_integrand(blocks, fom.at("C", p), rom.at("C", p))

    try:
        return float(integrate(integrand, fom.domain, spec).value[0])
    except ParromError as exc:
        logger.info("𝒥ₛ = +inf: %s", exc.detail)
        return float("inf")


def fom_h2l2_norm_sq(sys: ParametricSystem, spec: QuadSpec | None = None) -> float:
    """∫ ‖H(·; p)‖²_{H2} dp con un Lyapunov completo por punto."""
    return float(integrate(lambda p: h2_norm_sq(sys, p), sys.domain, spec).value[0])


def h2l2_norm(sys: ParametricSystem, spec: QuadSpec | None = None) -> float:
    return float(np.sqrt(max(fom_h2l2_norm_sq(sys, spec), 0.0)))


def trace_pair(B: NDArray, N: NDArray, C: NDArray, M: NDArray) -> tuple[float, float]:
    """(tr(Bᵀ N), tr(Cᵀ M)); coinciden cuando M, N resuelven el par de Sylvester dual."""
    return float(np.trace(B.T @ N)), float(np.trace(C.T @ M))


@dataclass
class ErrorMetrics:
    """ε global, curva ε_p y superficie ε_{ω,p}, todas relativas a ‖H‖_{H2⊗L2}."""

    eps: float
    fom_norm: float
    error_norm: float
    params: NDArray[np.float64]
    eps_p: NDArray[np.float64]
    omegas: NDArray[np.float64]
    eps_omega_p: NDArray[np.float64]  # (len(params), len(omegas))


def error_metrics(
    fom: ParametricSystem,
    rom: ParametricSystem,
    spec: QuadSpec | None = None,
    omegas: ArrayLike | None = None,
    params: ArrayLike | None = None,
    fom_norm_sq: float | None = None,
) -> ErrorMetrics:
    """
    Calcula las métricas de error del ROM frente al FOM.

    Args:
        fom (ParametricSystem): Modelo de orden completo.
        rom (ParametricSystem): Modelo reducido.
        spec (QuadSpec | None): Cuadratura para las normas H2⊗L2.
        omegas (ArrayLike | None): Frecuencias; por defecto 101 puntos logarítmicos en [1e-2, 1e4].
        params (ArrayLike | None): Puntos de parámetro; por defecto la malla de 101 puntos de la caja.
        fom_norm_sq (float | None): ‖H‖² ya calculada, para no repetir el Lyapunov completo.

    Returns:
        ErrorMetrics: ε, ε_p y ε_{ω,p}.
    """
    omegas = np.logspace(-2, 4, 101) if omegas is None else np.asarray(omegas, dtype=float).ravel()
    params = fom.domain.grid() if params is None else np.asarray(params, dtype=float).reshape(-1, fom.d)
    err = error_system(fom, rom)
    norm_sq = fom_h2l2_norm_sq(fom, spec) if fom_norm_sq is None else fom_norm_sq
    fom_norm = float(np.sqrt(norm_sq))
    error_norm = h2l2_norm(err, spec)

    eps_p = np.array(parallel_map(lambda p: np.sqrt(max(h2_norm_sq(err, p), 0.0)), list(params)))
    eps_p /= fom_norm
    rows = parallel_map(
        lambda p: [np.linalg.norm(transfer_eval(err, 1j * w, p)) for w in omegas], list(params)
    )
    eps_omega_p = np.array(rows) / fom_norm
    logger.info("ε = %.6e (‖H‖ = %.6e)", error_norm / fom_norm, fom_norm)
    return ErrorMetrics(error_norm / fom_norm, fom_norm, error_norm, params, eps_p, omegas, eps_omega_p)
