"""Solvers densos de ecuaciones de Lyapunov y Sylvester generalizadas."""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from scipy import linalg
from scipy.linalg import lapack

from parrom.core.config import settings
from parrom.core.errors import ConditionError, DimensionError, MatEqFailure

logger = logging.getLogger(__name__)

_EPS = np.finfo(float).eps


@dataclass(frozen=True, eq=False)
class LyapProblem:
    """
    A X Eᵀ + E X Aᵀ + rhs = 0, o con `transposed` la variante de
    observabilidad Aᵀ X E + Eᵀ X A + rhs = 0.
    """

    A: NDArray[np.float64]
    E: NDArray[np.float64]
    rhs: NDArray[np.float64]
    transposed: bool = False


@dataclass(frozen=True, eq=False)
class SylvProblem:
    """
    A X Êᵀ + E X Âᵀ + M = 0, o con `transposed` la variante
    Aᵀ X Ê + Eᵀ X Â + M = 0. A, E son n×n; Â, Ê son r×r; M es n×r.
    """

    A: NDArray[np.float64]
    E: NDArray[np.float64]
    A_red: NDArray[np.float64]
    E_red: NDArray[np.float64]
    M: NDArray[np.float64]
    transposed: bool = False


def _factor(E: NDArray) -> tuple[NDArray, NDArray]:
    """Factorización LU con pivoteo de E y control de su número de condición."""
    try:
        lu, piv = linalg.lu_factor(E, check_finite=True)
    except ValueError as exc:
        raise MatEqFailure("E contiene valores no finitos") from exc
    rcond = _rcond_from_lu(lu, E)
    if rcond < _EPS:
        raise ConditionError(rcond)
    if rcond < settings.rcond_warning:
        logger.warning("E mal condicionada (rcond=%.3e)", rcond)
    return lu, piv


def _rcond_from_lu(lu: NDArray, E: NDArray) -> float:
    if np.any(np.diag(lu) == 0):
        return 0.0
    anorm = np.linalg.norm(E, 1)
    rcond, info = lapack.dgecon(lu, anorm, norm="1")
    return float(rcond) if info == 0 else 0.0


def pencil_rcond(E: NDArray) -> float:
    """Estimación del recíproco del número de condición (norma 1) de E."""
    E = np.asarray(E, dtype=float)
    lu, _ = linalg.lu_factor(E)
    return _rcond_from_lu(lu, E)


def gen_eigvals(A: NDArray, E: NDArray) -> NDArray[np.complex128]:
    """Autovalores del haz λE − A, reducido a E⁻¹A mediante LU de E."""
    A = np.asarray(A, dtype=float)
    E = np.asarray(E, dtype=float)
    factor = _factor(E)
    return linalg.eigvals(linalg.lu_solve(factor, A))


def lyap_residual(prob: LyapProblem, X: NDArray) -> float:
    """Residuo relativo ‖AXEᵀ+EXAᵀ+R‖_F / (‖A‖‖X‖‖E‖ + ‖R‖) (con la variante transpuesta)."""
    A, E = (prob.A.T, prob.E.T) if prob.transposed else (prob.A, prob.E)
    res = A @ X @ E.T + E @ X @ A.T + prob.rhs
    scale = linalg.norm(A) * linalg.norm(X) * linalg.norm(E) + linalg.norm(prob.rhs)
    return float(linalg.norm(res) / scale) if scale > 0 else float(linalg.norm(res))


def sylv_residual(prob: SylvProblem, X: NDArray) -> float:
    A, E, Ar, Er = _oriented(prob)
    res = A @ X @ Er.T + E @ X @ Ar.T + prob.M
    scale = (
        linalg.norm(A) * linalg.norm(X) * linalg.norm(Er)
        + linalg.norm(E) * linalg.norm(X) * linalg.norm(Ar)
        + linalg.norm(prob.M)
    )
    return float(linalg.norm(res) / scale) if scale > 0 else float(linalg.norm(res))


def _oriented(prob: SylvProblem) -> tuple[NDArray, NDArray, NDArray, NDArray]:
    if prob.transposed:
        return prob.A.T, prob.E.T, prob.A_red.T, prob.E_red.T
    return prob.A, prob.E, prob.A_red, prob.E_red


def _solve_shifted(M: NDArray, rhs: NDArray, shift: complex) -> NDArray:
    """Resuelve un sistema desplazado; MatEqFailure si es singular a precisión de trabajo."""
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", linalg.LinAlgWarning)
            lu, piv = linalg.lu_factor(M)
    except ValueError as exc:
        raise MatEqFailure("El sistema desplazado contiene valores no finitos") from exc
    rcond = _rcond_from_lu(lu, M)
    if rcond < settings.shift_rcond_tol:
        raise MatEqFailure(
            f"Espectros solapados: el sistema desplazado en λ={shift:.6g} es singular (rcond={rcond:.3e})"
        )
    return linalg.lu_solve((lu, piv), rhs)


def _require_finite(kind: str, *mats: NDArray) -> None:
    if not all(np.all(np.isfinite(mat)) for mat in mats):
        raise MatEqFailure(f"Datos no finitos en la ecuación de {kind}")


def _check_residual(kind: str, residual: float) -> None:
    if residual > settings.mateq_residual_tol:
        logger.warning("Residuo relativo de %s alto: %.3e", kind, residual)


def solve_lyap(prob: LyapProblem) -> NDArray[np.float64]:
    """
    Resuelve la ecuación de Lyapunov generalizada reduciéndola a forma
    estándar con la LU de E y Bartels–Stewart.

    Args:
        prob (LyapProblem): Matrices del problema y orientación.

    Returns:
        NDArray: Solución simétrica X.
    """
    A, E = (prob.A.T, prob.E.T) if prob.transposed else (prob.A, prob.E)
    n = A.shape[0]
    if A.shape != (n, n) or E.shape != (n, n) or prob.rhs.shape != (n, n):
        raise DimensionError(f"Lyapunov: A {A.shape}, E {E.shape}, rhs {prob.rhs.shape}")
    _require_finite("Lyapunov", A, E, prob.rhs)
    factor = _factor(E)
    F = linalg.lu_solve(factor, A)
    G = linalg.lu_solve(factor, linalg.lu_solve(factor, prob.rhs).T).T
    abscissa = float(np.max(linalg.eigvals(F).real))
    if not abscissa < 0:
        raise MatEqFailure(f"Haz no asintóticamente estable (máx Re λ = {abscissa:.6e})")
    try:
        X = linalg.solve_continuous_lyapunov(F, -G)
    except (linalg.LinAlgError, ValueError) as exc:
        raise MatEqFailure("Fallo en el solver de Lyapunov") from exc
    if not np.all(np.isfinite(X)):
        raise MatEqFailure("La solución de Lyapunov contiene valores no finitos")
    X = (X + X.T) / 2
    _check_residual("Lyapunov", lyap_residual(prob, X))
    return X


def solve_sylv(prob: SylvProblem) -> NDArray[np.float64]:
    """
    Resuelve la ecuación de Sylvester mixta con la forma real de Schur del
    haz pequeño y sustitución hacia atrás sobre r sistemas desplazados n×n
    (bloques 2×2 acoplados como sistemas de orden 2n).
    """
    A, E, Ar, Er = _oriented(prob)
    n, r = prob.M.shape
    if A.shape != (n, n) or E.shape != (n, n) or Ar.shape != (r, r) or Er.shape != (r, r):
        raise DimensionError(
            f"Sylvester: A {A.shape}, E {E.shape}, Â {Ar.shape}, Ê {Er.shape}, M {prob.M.shape}"
        )
    _require_finite("Sylvester", A, E, Ar, Er, prob.M)
    factor = _factor(Er)
    # A X + E X Kᵀ = R con K = Ê⁻¹Â y R = −M Ê⁻ᵀ; Kᵀ = U T Uᵀ
    K = linalg.lu_solve(factor, Ar)
    R = -linalg.lu_solve(factor, prob.M.T).T
    T, U = linalg.schur(K.T, output="real")
    S = R @ U
    Y = np.zeros((n, r))
    j = 0
    try:
        while j < r:
            rhs = S[:, j] - E @ (Y[:, :j] @ T[:j, j])
            if j + 1 < r and T[j + 1, j] != 0.0:
                rhs_next = S[:, j + 1] - E @ (Y[:, :j] @ T[:j, j + 1])
                block = np.block(
                    [
                        [A + T[j, j] * E, T[j + 1, j] * E],
                        [T[j, j + 1] * E, A + T[j + 1, j + 1] * E],
                    ]
                )
                shift = complex(np.linalg.eigvals(T[j : j + 2, j : j + 2])[0])
                sol = _solve_shifted(block, np.concatenate([rhs, rhs_next]), shift)
                Y[:, j], Y[:, j + 1] = sol[:n], sol[n:]
                j += 2
            else:
                Y[:, j] = _solve_shifted(A + T[j, j] * E, rhs, complex(T[j, j]))
                j += 1
    except (linalg.LinAlgError, ValueError) as exc:
        raise MatEqFailure("Sistema desplazado singular: espectros solapados") from exc
    X = Y @ U.T
    if not np.all(np.isfinite(X)):
        raise MatEqFailure("La solución de Sylvester contiene valores no finitos")
    _check_residual("Sylvester", sylv_residual(prob, X))
    return X
