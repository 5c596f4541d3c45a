import numpy as np
import pytest

from parrom.services.psys import ParamBox, ParametricSystem, ParamSepMatrix, ScalarCoeff


def spd(rng: np.random.Generator, n: int) -> np.ndarray:
    F = rng.standard_normal((n, n))
    return F @ F.T / n + np.eye(n)


def dissipative(rng: np.random.Generator, n: int) -> np.ndarray:
    """Matriz con parte simétrica definida negativa."""
    G = rng.standard_normal((n, n))
    S = rng.standard_normal((n, n))
    return -(G @ G.T / n + 0.5 * np.eye(n)) + (S - S.T) / 2


def coefficient_family(d: int, q: int) -> list[ScalarCoeff]:
    """q funciones no negativas sobre [0, 1]^d: 1, p₁, p₂ (o p², p³ si d=1)."""
    if d == 1:
        return [ScalarCoeff.monomial([k]) for k in range(q)]
    monomials = [[0] * d] + [[1 if k == axis else 0 for k in range(d)] for axis in range(d)]
    monomials.append([1] * d)
    return [ScalarCoeff.monomial(exps) for exps in monomials[:q]]


def random_system(
    seed: int,
    n: int,
    *,
    m: int = 1,
    p: int = 1,
    d: int = 1,
    q_E: int = 1,
    q_A: int = 2,
    q_B: int = 1,
    q_C: int = 1,
) -> ParametricSystem:
    """
    Sistema estrictamente disipativo sobre [0, 1]^d: términos de E definidos
    positivos y de A con parte simétrica negativa, coeficientes no negativos.
    """
    rng = np.random.default_rng(seed)
    E = [(coeff, spd(rng, n) if k == 0 else 0.1 * spd(rng, n)) for k, coeff in enumerate(coefficient_family(d, q_E))]
    A = [(coeff, dissipative(rng, n)) for coeff in coefficient_family(d, q_A)]
    B = [(coeff, rng.standard_normal((n, m))) for coeff in coefficient_family(d, q_B)]
    C = [(coeff, rng.standard_normal((p, n))) for coeff in coefficient_family(d, q_C)]
    return ParametricSystem(
        E=ParamSepMatrix(tuple(E)),
        A=ParamSepMatrix(tuple(A)),
        B=ParamSepMatrix(tuple(B)),
        C=ParamSepMatrix(tuple(C)),
        domain=ParamBox(np.zeros(d), np.ones(d)),
    )


def orthonormal(seed: int, n: int, r: int) -> np.ndarray:
    Q, _ = np.linalg.qr(np.random.default_rng(seed).standard_normal((n, r)))
    return Q


@pytest.fixture
def scalar_fom() -> ParametricSystem:
    """H(s) = 1/(s + 1) sobre [0, 1]."""
    return ParametricSystem.constant([[1.0]], [[-1.0]], [[1.0]], [[1.0]])


@pytest.fixture
def scalar_rom() -> ParametricSystem:
    """Ĥ(s) = 1/(s + 2) sobre [0, 1]."""
    return ParametricSystem.constant([[1.0]], [[-2.0]], [[1.0]], [[1.0]])


@pytest.fixture
def shifted_family() -> ParametricSystem:
    """H(s; p) = 1/(s + p) sobre [1, 2]."""
    return ParametricSystem(
        E=ParamSepMatrix.constant([[1.0]]),
        A=ParamSepMatrix.of((ScalarCoeff.monomial([1]), np.array([[-1.0]]))),
        B=ParamSepMatrix.constant([[1.0]]),
        C=ParamSepMatrix.constant([[1.0]]),
        domain=ParamBox.interval(1.0, 2.0),
    )
