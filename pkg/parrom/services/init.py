"""ROMs iniciales estables: IRKA tangencial local, pIRKA y la inicialización
trivial; plantillas de estructura paramétrica del ROM."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import linalg

from parrom.core.errors import ConfigError, InitError, ShiftSingularError
from parrom.core.parallel import parallel_map
from parrom.schemas.reports import StabilityReport
from parrom.services.psys import ParamBox, ParametricSystem, ParamSepMatrix, ScalarCoeff, project
from parrom.services.stability import max_abscissa_over_box

logger = logging.getLogger(__name__)

PRESETS = ("SP", "IO", "All")
PRESET_FROZEN: dict[str, frozenset[str]] = {
    "SP": frozenset(),
    "IO": frozenset({"E", "A"}),
    "All": frozenset(),
}


@dataclass(frozen=True, eq=False)
class RomStructure:
    """Funciones de coeficiente por familia y familias congeladas durante la optimización."""

    E: tuple[ScalarCoeff, ...]
    A: tuple[ScalarCoeff, ...]
    B: tuple[ScalarCoeff, ...]
    C: tuple[ScalarCoeff, ...]
    domain: ParamBox
    frozen: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        if self.frozen >= {"E", "A", "B", "C"}:
            raise ConfigError("La estructura necesita al menos una familia libre")
        for coeffs in (self.E, self.A, self.B, self.C):
            if not coeffs:
                raise ConfigError("Cada familia necesita al menos una función de coeficiente")
            for coeff in coeffs:
                coeff.validate(self.domain)

    def family(self, name: str) -> tuple[ScalarCoeff, ...]:
        return {"E": self.E, "A": self.A, "B": self.B, "C": self.C}[name]

    def with_frozen(self, frozen: Iterable[str]) -> "RomStructure":
        return RomStructure(self.E, self.A, self.B, self.C, self.domain, frozenset(frozen))

    @classmethod
    def preset(cls, name: str, fom: ParametricSystem, frozen: Iterable[str] | None = None) -> "RomStructure":
        """
        Variantes SP (conserva la estructura del FOM), IO (B̂ y Ĉ afines en p)
        y All (todas las familias afines en p).
        """
        affine = (ScalarCoeff.constant(),) + tuple(
            ScalarCoeff.monomial([1 if k == axis else 0 for k in range(fom.d)]) for axis in range(fom.d)
        )
        const = (ScalarCoeff.constant(),)
        if name == "SP":
            families = [tuple(fom.families[f].coeffs) for f in ("E", "A", "B", "C")]
        elif name == "IO":
            families = [const, const, affine, affine]
        elif name == "All":
            families = [affine, affine, affine, affine]
        else:
            raise ConfigError(f"Estructura desconocida '{name}'; usa una de {PRESETS}")
        locked = PRESET_FROZEN[name] if frozen is None else frozenset(frozen)
        return cls(*families, domain=fom.domain, frozen=locked)


def fit_structure(rom: ParametricSystem, structure: RomStructure) -> ParametricSystem:
    """
    Reescribe un ROM en la estructura indicada: los términos con coeficiente
    presente en la estructura se copian, los demás se evalúan en el punto
    medio de la caja y se suman al primer término; los que faltan quedan a 0.
    """
    midpoint = structure.domain.midpoint
    families = {}
    for name, source in rom.families.items():
        targets = structure.family(name)
        mats = [np.zeros(source.shape) for _ in targets]
        for coeff, mat in source.terms:
            for index, target in enumerate(targets):
                if target.same_as(coeff):
                    mats[index] = mats[index] + mat
                    break
            else:
                mats[0] = mats[0] + coeff(midpoint) / targets[0](midpoint) * mat
        families[name] = ParamSepMatrix(tuple(zip(targets, mats)))
    return ParametricSystem(domain=structure.domain, **families)


def trivial_init(
    structure: RomStructure, r: int, seed: int = 0, *, m: int = 1, n_outputs: int = 1
) -> ParametricSystem:
    """
    ROM estable trivial: Ê₁ = I, Â₁ = −diag(logspace(−1, 1, r)), resto de E/A a
    cero y B̂, Ĉ aleatorios de norma unitaria.

    Args:
        structure (RomStructure): Funciones de coeficiente del ROM.
        r (int): Orden reducido.
        seed (int): Semilla del generador aleatorio.
        m (int): Número de entradas.
        n_outputs (int): Número de salidas.

    Returns:
        ParametricSystem: ROM asintóticamente estable en toda la caja.
    """
    samples = structure.domain.grid(101)
    for name in ("E", "A"):
        values = np.array([structure.family(name)[0](p) for p in samples])
        if not np.all(values > 0):
            raise InitError(f"El primer coeficiente de {name} no es positivo en toda la caja")
    rng = np.random.default_rng(seed)

    def unit(shape: tuple[int, int]) -> NDArray:
        mat = rng.standard_normal(shape)
        return mat / np.linalg.norm(mat)

    def square(first: NDArray, count: int) -> list[NDArray]:
        return [first] + [np.zeros((r, r)) for _ in range(count - 1)]

    rom = ParametricSystem(
        E=ParamSepMatrix(tuple(zip(structure.E, square(np.eye(r), len(structure.E))))),
        A=ParamSepMatrix(tuple(zip(structure.A, square(-np.diag(np.logspace(-1, 1, r)), len(structure.A))))),
        B=ParamSepMatrix(tuple((coeff, unit((r, m))) for coeff in structure.B)),
        C=ParamSepMatrix(tuple((coeff, unit((n_outputs, r))) for coeff in structure.C)),
        domain=structure.domain,
    )
    return rom


@dataclass
class IrkaResult:
    V: NDArray[np.float64]
    W: NDArray[np.float64]
    rom: ParametricSystem
    shifts: NDArray[np.complex128]
    iterations: int
    converged: bool
    shift_changes: list[float] = field(default_factory=list)


def _real_basis(vectors: NDArray, rank: int) -> NDArray[np.float64]:
    U, _, _ = linalg.svd(np.hstack([vectors.real, vectors.imag]), full_matrices=False)
    return U[:, :rank]


def _tangential_bases(E, A, B, C, shifts, b, c) -> tuple[NDArray, NDArray]:
    n = A.shape[0]
    V = np.empty((n, shifts.size), dtype=complex)
    W = np.empty((n, shifts.size), dtype=complex)
    for i, sigma in enumerate(shifts):
        K = sigma * E - A
        try:
            V[:, i] = linalg.solve(K, B @ b[:, i])
            W[:, i] = linalg.solve(K.T, C.T @ c[:, i])
        except (linalg.LinAlgError, ValueError) as exc:
            raise ShiftSingularError(sigma) from exc
    return _real_basis(V, shifts.size), _real_basis(W, shifts.size)


def _poles_and_directions(Er, Ar, Br, Cr) -> tuple[NDArray, NDArray, NDArray]:
    poles, X = linalg.eig(Ar, Er)
    b = linalg.solve(Er @ X, Br.astype(complex))
    c = Cr @ X
    return poles, b.T, c


def irka(
    fom: ParametricSystem,
    r_s: int,
    p: ArrayLike | None = None,
    max_iter: int = 100,
    shift_tol: float = 1e-6,
) -> IrkaResult:
    """
    IRKA tangencial sobre el sistema no paramétrico H(·; p).

    Los polos inestables del ROM intermedio no se reflejan: sus espejos se usan
    tal cual como desplazamientos.

    Args:
        fom (ParametricSystem): Modelo de orden completo.
        r_s (int): Orden del ROM local.
        p (ArrayLike | None): Punto de parámetros; por defecto el centro de la caja.
        max_iter (int): Máximo de iteraciones.
        shift_tol (float): Cambio relativo de los desplazamientos para parar.

    Returns:
        IrkaResult: Bases ortonormales V, W, ROM local y desplazamientos finales.
    """
    point = fom.domain.midpoint if p is None else fom.domain.check(p)
    E, A, B, C = fom.matrices(point)
    if not 1 <= r_s <= fom.n:
        raise ConfigError(f"r_s={r_s} debe estar entre 1 y n={fom.n}")
    shifts = np.logspace(-1, 3, r_s).astype(complex)
    if fom.m == 1 and fom.n_outputs == 1:
        b, c = np.ones((1, r_s)), np.ones((1, r_s))
    else:
        rng = np.random.RandomState(0)
        b, c = rng.randn(fom.m, r_s), rng.randn(fom.n_outputs, r_s)

    changes: list[float] = []
    converged = False
    for iteration in range(1, max_iter + 1):
        used = shifts
        V, W = _tangential_bases(E, A, B, C, shifts, b, c)
        Er, Ar, Br, Cr = W.T @ E @ V, W.T @ A @ V, W.T @ B, C @ V
        poles, b_new, c_new = _poles_and_directions(Er, Ar, Br, Cr)
        new_shifts = -poles
        change = float(np.max(np.abs(np.sort(new_shifts) - np.sort(shifts)) / np.abs(np.sort(shifts))))
        changes.append(change)
        if change < shift_tol:
            converged = True
            break
        shifts, b, c = new_shifts, b_new, c_new
    else:
        logger.warning("IRKA en p=%s no convergió tras %d iteraciones", point.tolist(), max_iter)

    rom = ParametricSystem.constant(Er, Ar, Br, Cr, fom.domain)
    logger.info("IRKA en p=%s: %d iteraciones, cambio final %.3e", point.tolist(), iteration, changes[-1])
    return IrkaResult(V, W, rom, used, iteration, converged, changes)


@dataclass
class PirkaResult:
    rom: ParametricSystem
    basis: NDArray[np.float64]
    samples: NDArray[np.float64]
    local: list[IrkaResult]
    stability: StabilityReport


def sample_points(box: ParamBox, p_s: int) -> NDArray[np.float64]:
    """p_s puntos equiespaciados por eje con extremos incluidos; el centro si p_s = 1."""
    if p_s == 1:
        return box.midpoint[None, :]
    return box.linspace(p_s)


def pirka(fom: ParametricSystem, p_s: int, r_s: int, r: int, **irka_options) -> PirkaResult:
    """
    pIRKA: IRKA local en p_s puntos, base global con los r primeros vectores
    singulares izquierdos de [V⁽¹⁾ … W⁽ᵖˢ⁾] y proyección de un solo lado que
    conserva la estructura separable del FOM.
    """
    samples = sample_points(fom.domain, p_s)
    if r > 2 * len(samples) * r_s:
        raise ConfigError(f"r={r} supera 2·p_s·r_s={2 * len(samples) * r_s}")
    if r > fom.n:
        raise ConfigError(f"r={r} supera el orden del FOM n={fom.n}")
    local = parallel_map(lambda p: irka(fom, r_s, p, **irka_options), list(samples))
    stacked = np.hstack([run.V for run in local] + [run.W for run in local])
    U, _, _ = linalg.svd(stacked, full_matrices=False)
    basis = U[:, :r]
    rom = project(fom, basis)
    report = max_abscissa_over_box(rom)
    logger.info("pIRKA: r=%d, máx α=%.3e", r, report.max_alpha)
    return PirkaResult(rom, basis, samples, local, report)
