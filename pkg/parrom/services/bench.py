"""Generadores de modelos de prueba: sintético, Penzl paramétrico, triple
cadena amortiguada y el sistema de dos parámetros con norma conocida."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from scipy import linalg

from parrom.core.errors import ModelError
from parrom.services.psys import ParamBox, ParametricSystem, ParamSepMatrix, ScalarCoeff
from parrom.services.stability import global_max

logger = logging.getLogger(__name__)

_ONE = ScalarCoeff.constant()


def _linear(axis: int = 0, d: int = 1) -> ScalarCoeff:
    return ScalarCoeff.monomial([1 if k == axis else 0 for k in range(d)])


@dataclass
class BenchModel:
    name: str
    system: ParametricSystem
    params: dict
    description: str


def gen_synthetic(
    n: int = 100,
    box: tuple[float, float] = (0.02, 1.0),
    a_range: tuple[float, float] = (1e-1, 1e1),
    b_range: tuple[float, float] = (1e0, 1e3),
) -> ParametricSystem:
    """
    Modelo sintético con E = I, A(p) = A₁ + p·A₂ formado por n/2 bloques
    [[−p·aₖ, bₖ], [−bₖ, −p·aₖ]]; los polos −p·aₖ ± i·bₖ se acercan al eje
    imaginario al disminuir p.
    """
    if n < 2 or n % 2:
        raise ModelError(f"El modelo sintético requiere n par ≥ 2 (n={n})")
    half = n // 2
    a = np.logspace(np.log10(a_range[0]), np.log10(a_range[1]), half)
    b = np.logspace(np.log10(b_range[0]), np.log10(b_range[1]), half)
    A1 = linalg.block_diag(*[np.array([[0.0, bk], [-bk, 0.0]]) for bk in b])
    A2 = linalg.block_diag(*[-ak * np.eye(2) for ak in a])
    ones = np.ones((n, 1))
    return ParametricSystem(
        E=ParamSepMatrix.constant(np.eye(n)),
        A=ParamSepMatrix.of((_ONE, A1), (_linear(), A2)),
        B=ParamSepMatrix.constant(ones),
        C=ParamSepMatrix.constant(ones.T),
        domain=ParamBox.interval(*box),
    )


def gen_penzl_param(n_tail: int = 1000, box: tuple[float, float] = (10.0, 100.0)) -> ParametricSystem:
    """
    Penzl paramétrico de orden 6 + n_tail: un bloque [[−1, p], [−p, −1]],
    bloques fijos con ±200 y ±400 y la cola diagonal −linspace(1, 1000, n_tail).
    """
    if n_tail < 1:
        raise ModelError("La cola diagonal necesita al menos un estado")
    n = 6 + n_tail
    A1 = linalg.block_diag(
        -np.eye(2),
        np.array([[-1.0, 200.0], [-200.0, -1.0]]),
        np.array([[-1.0, 400.0], [-400.0, -1.0]]),
        np.diag(-np.linspace(1.0, 1000.0, n_tail)),
    )
    A2 = np.zeros((n, n))
    A2[0, 1], A2[1, 0] = 1.0, -1.0
    B = np.ones((n, 1))
    B[:6] = 10.0
    return ParametricSystem(
        E=ParamSepMatrix.constant(np.eye(n)),
        A=ParamSepMatrix.of((_ONE, A1), (_linear(), A2)),
        B=ParamSepMatrix.constant(B),
        C=ParamSepMatrix.constant(B.T),
        domain=ParamBox.interval(*box),
    )


@dataclass
class TripleChain:
    """Matrices de segundo orden M, K, B, C y el γ de la realización disipativa."""

    M: NDArray[np.float64]
    K: NDArray[np.float64]
    B: NDArray[np.float64]
    C: NDArray[np.float64]
    gamma: float

    def damping(self, p: float) -> NDArray[np.float64]:
        return p * (self.M + self.K)


def triple_chain_matrices(
    n_chain: int,
    masses: tuple[float, float, float] = (1.0, 2.0, 3.0),
    stiffness: tuple[float, float, float] = (10.0, 20.0, 1.0),
    ground_mass: float = 10.0,
    ground_stiffness: float = 50.0,
) -> tuple[NDArray, NDArray]:
    """Tres cadenas de n_chain masas unidas a una masa común; orden 3·n_chain + 1."""
    if n_chain < 1:
        raise ModelError("Cada cadena necesita al menos una masa")
    size = 3 * n_chain + 1
    M = np.diag(np.concatenate([np.full(n_chain, m) for m in masses] + [[ground_mass]]))
    K = np.zeros((size, size))
    tridiag = 2 * np.eye(n_chain) - np.eye(n_chain, k=1) - np.eye(n_chain, k=-1)
    for i, k in enumerate(stiffness):
        block = slice(i * n_chain, (i + 1) * n_chain)
        K[block, block] = k * tridiag
        last = (i + 1) * n_chain - 1
        K[last, -1] = K[-1, last] = -k
    K[-1, -1] = sum(stiffness) + ground_stiffness
    return M, K


def _dissipation_bound(M: NDArray, K: NDArray, box: ParamBox) -> float:
    """½·min_p λ_min(D(p), M + ¼·D(p)K⁻¹D(p))."""
    factor = linalg.cho_factor(K)

    def neg_lambda_min(p: NDArray) -> float:
        D = p[0] * (M + K)
        rhs = M + 0.25 * D @ linalg.cho_solve(factor, D)
        return -float(linalg.eigh(D, (rhs + rhs.T) / 2, eigvals_only=True, subset_by_index=[0, 0])[0])

    return -0.5 * global_max(neg_lambda_min, box).value


def gen_triple_chain(
    n_tilde: int = 1501, box: tuple[float, float] = (2e-3, 2e-2), **chain_options
) -> ParametricSystem:
    """
    Realización de primer orden estrictamente disipativa (orden 2ñ) de la
    triple cadena con amortiguamiento D(p) = p·(M + K), estado [x; ẋ].
    """
    return triple_chain(n_tilde, box, **chain_options)[0]


def triple_chain(
    n_tilde: int, box: tuple[float, float] = (2e-3, 2e-2), **chain_options
) -> tuple[ParametricSystem, TripleChain]:
    if n_tilde < 4 or (n_tilde - 1) % 3:
        raise ModelError(f"ñ debe ser 3·n_c + 1 con n_c ≥ 1 (ñ={n_tilde})")
    domain = ParamBox.interval(*box)
    M, K = triple_chain_matrices((n_tilde - 1) // 3, **chain_options)
    gamma = _dissipation_bound(M, K, domain)
    if not gamma > 0:
        raise ModelError(f"γ no positivo ({gamma:.3e}); la realización no es disipativa")
    Bs = np.ones((n_tilde, 1))
    Cs = Bs.T.copy()
    Z = np.zeros_like(M)
    MK = M + K
    system = ParametricSystem(
        E=ParamSepMatrix.constant(np.block([[K, gamma * M], [gamma * M, M]])),
        A=ParamSepMatrix.of(
            (_ONE, np.block([[-gamma * K, K], [-K, gamma * M]])),
            (_linear(), np.block([[Z, -gamma * MK], [Z, -MK]])),
        ),
        B=ParamSepMatrix.constant(np.vstack([gamma * Bs, Bs])),
        C=ParamSepMatrix.constant(np.hstack([Cs, np.zeros_like(Cs)])),
        domain=domain,
    )
    logger.info("Triple cadena ñ=%d con γ=%.6e", n_tilde, gamma)
    return system, TripleChain(M, K, Bs, Cs, gamma)


def second_order_transfer(chain: TripleChain, s: complex, p: float) -> NDArray[np.complex128]:
    """C(s²M + sD(p) + K)⁻¹B."""
    return chain.C @ linalg.solve(s**2 * chain.M + s * chain.damping(p) + chain.K, chain.B.astype(complex))


BAUR_L = np.array([[1.0, 0.0], [0.5, 1.0 / (2.0 * np.sqrt(3.0))]])


@dataclass
class BaurOracle:
    """FOM con B(p) = B₁ + p₁B₂, C(p) = C₁ + p₂C₂ sobre [0, 1]² y el sistema auxiliar G."""

    system: ParametricSystem
    G: ParametricSystem
    L: NDArray[np.float64]

    def weighted_system(self) -> ParametricSystem:
        """Realización constante de Lᵀ G L; su norma H2 es la norma H2⊗L2 del FOM."""
        E, A, B, C = self.G.matrices(self.G.domain.midpoint)
        m = B.shape[1] // 2
        p = C.shape[0] // 2
        L_in = np.kron(self.L, np.eye(m))
        L_out = np.kron(self.L.T, np.eye(p))
        return ParametricSystem.constant(E, A, B @ L_in, L_out @ C, self.G.domain)


def gen_baur_oracle(n: int, seed: int = 0, m: int = 1, p: int = 1) -> BaurOracle:
    """
    Sistema aleatorio estable con E, A constantes y B, C afines en parámetros
    distintos; E es SPD y A = −(GGᵀ/n + ½I) + parte antisimétrica.
    """
    if n < 2:
        raise ModelError("El oráculo requiere n ≥ 2")
    rng = np.random.default_rng(seed)
    F = rng.standard_normal((n, n))
    E = F @ F.T / n + np.eye(n)
    G = rng.standard_normal((n, n))
    S = rng.standard_normal((n, n))
    A = -(G @ G.T / n + 0.5 * np.eye(n)) + (S - S.T) / 2
    B1, B2 = rng.standard_normal((n, m)), rng.standard_normal((n, m))
    C1, C2 = rng.standard_normal((p, n)), rng.standard_normal((p, n))
    domain = ParamBox(np.zeros(2), np.ones(2))
    p1, p2 = _linear(0, 2), _linear(1, 2)
    one = ScalarCoeff.constant()
    system = ParametricSystem(
        E=ParamSepMatrix.constant(E),
        A=ParamSepMatrix.constant(A),
        B=ParamSepMatrix.of((one, B1), (p1, B2)),
        C=ParamSepMatrix.of((one, C1), (p2, C2)),
        domain=domain,
    )
    aux = ParametricSystem.constant(E, A, np.hstack([B1, B2]), np.vstack([C1, C2]), domain)
    return BaurOracle(system, aux, BAUR_L.copy())


_DESCRIPTIONS = {
    "synthetic": "Polos −p·aₖ ± i·bₖ; se acercan al eje imaginario al disminuir p",
    "penzl": "Un par conjugado −1 ± i·p se mueve con p; el resto de polos es fijo",
    "triple-chain": "Polos cerca del origen que se acercan al eje imaginario al bajar el amortiguamiento",
    "baur": "E, A constantes; B(p) = B₁ + p₁B₂ y C(p) = C₁ + p₂C₂ sobre [0, 1]²",
}


def generate(name: str, **params) -> BenchModel:
    """Construye un modelo de prueba por nombre, tal como lo expone la CLI."""
    if name == "synthetic":
        system = gen_synthetic(**params)
    elif name == "penzl":
        system = gen_penzl_param(**params)
    elif name == "triple-chain":
        system = gen_triple_chain(**params)
    elif name == "baur":
        system = gen_baur_oracle(**params).system
    else:
        raise ModelError(f"Modelo desconocido '{name}'")
    return BenchModel(name, system, params, _DESCRIPTIONS[name])


