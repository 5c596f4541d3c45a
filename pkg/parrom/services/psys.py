"""Sistemas paramétricos en forma separable: cajas de parámetros, coeficientes
escalares, matrices Σ fᵢ(p)·Mᵢ y sistemas (E, A, B, C) sobre una caja."""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import linalg

from parrom.core.errors import ConfigError, DimensionError, DomainError, ShiftSingularError
from parrom.schemas.systems import (
    ConstantCoeff,
    CustomCoeff,
    DimsDocument,
    DomainDocument,
    MonomialCoeff,
    RationalShiftCoeff,
    SystemDocument,
    TermDocument,
)
from parrom.services.mateq import gen_eigvals

logger = logging.getLogger(__name__)

CoeffFunc = Callable[[NDArray[np.float64]], float]

_CUSTOM_COEFFS: dict[str, CoeffFunc] = {}


def register_coeff(tag: str, func: CoeffFunc) -> None:
    """Registra una función de coeficiente personalizada para poder leerla desde JSON."""
    _CUSTOM_COEFFS[tag] = func


def _as_point(p: ArrayLike) -> NDArray[np.float64]:
    return np.atleast_1d(np.asarray(p, dtype=float))


@dataclass(frozen=True, eq=False)
class ParamBox:
    """Caja cerrada no degenerada [lower, upper] ⊂ ℝ^d."""

    lower: NDArray[np.float64]
    upper: NDArray[np.float64]

    def __post_init__(self) -> None:
        lower = _as_point(self.lower)
        upper = _as_point(self.upper)
        if lower.ndim != 1 or lower.shape != upper.shape or lower.size == 0:
            raise DimensionError("Los límites de la caja deben ser vectores de igual longitud d ≥ 1")
        if not np.all(lower < upper):
            raise DomainError(f"Caja degenerada: lower={lower.tolist()}, upper={upper.tolist()}")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @classmethod
    def interval(cls, a: float, b: float) -> "ParamBox":
        return cls(np.array([a]), np.array([b]))

    @property
    def d(self) -> int:
        return self.lower.size

    @property
    def measure(self) -> float:
        return float(np.prod(self.upper - self.lower))

    @property
    def midpoint(self) -> NDArray[np.float64]:
        return (self.lower + self.upper) / 2

    def contains(self, p: ArrayLike) -> bool:
        point = _as_point(p)
        return point.shape == self.lower.shape and bool(
            np.all(point >= self.lower) and np.all(point <= self.upper)
        )

    def check(self, p: ArrayLike) -> NDArray[np.float64]:
        """Devuelve `p` como vector; lanza DomainError si está fuera de la caja."""
        point = _as_point(p)
        if not self.contains(point):
            raise DomainError(
                f"p={point.tolist()} fuera de la caja [{self.lower.tolist()}, {self.upper.tolist()}]"
            )
        return point

    def same_as(self, other: "ParamBox") -> bool:
        return np.array_equal(self.lower, other.lower) and np.array_equal(self.upper, other.upper)

    def linspace(self, count: int) -> NDArray[np.float64]:
        """Puntos equiespaciados por eje en malla tensorial, forma (count^d, d)."""
        axes = [np.linspace(lo, hi, count) for lo, hi in zip(self.lower, self.upper)]
        return np.array(list(itertools.product(*axes)), dtype=float).reshape(-1, self.d)

    def grid(self, total: int = 101) -> NDArray[np.float64]:
        """Malla por defecto: `total` puntos si d=1, ceil(total^(1/d)) por eje si d>1."""
        per_axis = total if self.d == 1 else int(np.ceil(total ** (1 / self.d)))
        return self.linspace(per_axis)


class CoeffKind(str, Enum):
    CONSTANT = "constant"
    MONOMIAL = "monomial"
    RATIONAL_SHIFT = "rational_shift"
    CUSTOM = "custom"


@dataclass(frozen=True, eq=False)
class ScalarCoeff:
    """Función escalar continua p ↦ f(p) de una forma separable."""

    kind: CoeffKind
    value: float = 1.0
    exponents: tuple[int, ...] = ()
    shift: float = 0.0
    axis: int = 0
    tag: str = ""
    func: CoeffFunc | None = field(default=None, repr=False)

    @classmethod
    def constant(cls, value: float = 1.0) -> "ScalarCoeff":
        return cls(CoeffKind.CONSTANT, value=float(value))

    @classmethod
    def monomial(cls, exponents: int | Sequence[int]) -> "ScalarCoeff":
        exps = (int(exponents),) if np.isscalar(exponents) else tuple(int(e) for e in exponents)
        if any(e < 0 for e in exps):
            raise ConfigError(f"Exponentes negativos no permitidos: {exps}")
        return cls(CoeffKind.MONOMIAL, exponents=exps)

    @classmethod
    def rational_shift(cls, shift: float, axis: int = 0) -> "ScalarCoeff":
        return cls(CoeffKind.RATIONAL_SHIFT, shift=float(shift), axis=int(axis))

    @classmethod
    def custom(cls, tag: str, func: CoeffFunc | None = None) -> "ScalarCoeff":
        if func is None:
            if tag not in _CUSTOM_COEFFS:
                raise ConfigError(f"Coeficiente personalizado no registrado: '{tag}'")
            func = _CUSTOM_COEFFS[tag]
        return cls(CoeffKind.CUSTOM, tag=tag, func=func)

    def __call__(self, p: ArrayLike) -> float:
        point = _as_point(p)
        if self.kind is CoeffKind.CONSTANT:
            return self.value
        if self.kind is CoeffKind.MONOMIAL:
            if len(self.exponents) != point.size:
                raise DimensionError(
                    f"Monomio con {len(self.exponents)} exponentes evaluado en p de dimensión {point.size}"
                )
            return float(np.prod(point ** np.asarray(self.exponents)))
        if self.kind is CoeffKind.RATIONAL_SHIFT:
            return float(1.0 / (point[self.axis] - self.shift))
        return float(self.func(point))

    @property
    def key(self) -> tuple | None:
        """Clave estructural para fusionar términos; None para funciones personalizadas."""
        if self.kind is CoeffKind.CONSTANT:
            return (CoeffKind.CONSTANT, self.value)
        if self.kind is CoeffKind.MONOMIAL:
            if not any(self.exponents):
                return (CoeffKind.CONSTANT, 1.0)
            return (CoeffKind.MONOMIAL, self.exponents)
        if self.kind is CoeffKind.RATIONAL_SHIFT:
            return (CoeffKind.RATIONAL_SHIFT, self.shift, self.axis)
        return None

    def same_as(self, other: "ScalarCoeff") -> bool:
        if self is other:
            return True
        if self.key is not None:
            return self.key == other.key
        return other.kind is CoeffKind.CUSTOM and other.tag == self.tag and other.func is self.func

    def validate(self, box: ParamBox) -> None:
        if self.kind is CoeffKind.MONOMIAL and len(self.exponents) != box.d:
            raise DimensionError(f"El monomio {self.exponents} no coincide con d={box.d}")
        if self.kind is CoeffKind.RATIONAL_SHIFT:
            if not 0 <= self.axis < box.d:
                raise DimensionError(f"Eje {self.axis} fuera de rango para d={box.d}")
            if box.lower[self.axis] <= self.shift <= box.upper[self.axis]:
                raise DomainError(f"El polo π={self.shift} de 1/(p-π) está dentro de la caja")

    def __repr__(self) -> str:
        if self.kind is CoeffKind.CONSTANT:
            return f"const({self.value:g})"
        if self.kind is CoeffKind.MONOMIAL:
            return f"p^{self.exponents}"
        if self.kind is CoeffKind.RATIONAL_SHIFT:
            return f"1/(p{self.axis}-{self.shift:g})"
        return f"custom({self.tag})"


Term = tuple[ScalarCoeff, NDArray[np.float64]]


@dataclass(frozen=True, eq=False)
class ParamSepMatrix:
    """Función matricial Σᵢ fᵢ(p)·Mᵢ con todas las Mᵢ de la misma forma."""

    terms: tuple[Term, ...]

    def __post_init__(self) -> None:
        terms = tuple((coeff, np.atleast_2d(np.array(mat, dtype=float))) for coeff, mat in self.terms)
        if not terms:
            raise DimensionError("Una forma separable necesita al menos un término")
        shapes = {mat.shape for _, mat in terms}
        if len(shapes) != 1:
            raise DimensionError(f"Formas inconsistentes entre términos: {sorted(shapes)}")
        for _, mat in terms:
            mat.setflags(write=False)
        object.__setattr__(self, "terms", terms)

    @classmethod
    def of(cls, *terms: Term) -> "ParamSepMatrix":
        return cls(tuple(terms))

    @classmethod
    def constant(cls, matrix: ArrayLike) -> "ParamSepMatrix":
        return cls(((ScalarCoeff.constant(), np.asarray(matrix, dtype=float)),))

    @property
    def shape(self) -> tuple[int, int]:
        return self.terms[0][1].shape

    @property
    def coeffs(self) -> list[ScalarCoeff]:
        return [coeff for coeff, _ in self.terms]

    @property
    def matrices(self) -> list[NDArray[np.float64]]:
        return [mat for _, mat in self.terms]

    def __len__(self) -> int:
        return len(self.terms)

    def coefficient_values(self, p: ArrayLike) -> NDArray[np.float64]:
        return np.array([coeff(p) for coeff in self.coeffs])

    def evaluate(self, p: ArrayLike) -> NDArray[np.float64]:
        """Σ fᵢ(p)·Mᵢ sin comprobar el dominio."""
        values = self.coefficient_values(p)
        return np.tensordot(values, np.stack(self.matrices), axes=1)

    def with_matrices(self, matrices: Iterable[ArrayLike]) -> "ParamSepMatrix":
        mats = list(matrices)
        if len(mats) != len(self.terms):
            raise DimensionError("El número de matrices no coincide con el de términos")
        return ParamSepMatrix(tuple((coeff, mat) for coeff, mat in zip(self.coeffs, mats)))

    def map(self, fn: Callable[[NDArray[np.float64]], ArrayLike]) -> "ParamSepMatrix":
        return self.with_matrices(fn(mat) for mat in self.matrices)

    def merged(self) -> "ParamSepMatrix":
        """Suma los términos con la misma función de coeficiente estructural."""
        merged: list[list] = []
        for coeff, mat in self.terms:
            for entry in merged:
                if coeff.key is not None and entry[0].same_as(coeff):
                    entry[1] = entry[1] + mat
                    break
            else:
                merged.append([coeff, mat.copy()])
        return ParamSepMatrix(tuple((coeff, mat) for coeff, mat in merged))

    def validate(self, box: ParamBox) -> None:
        for coeff in self.coeffs:
            coeff.validate(box)


def eval_matrix(M: ParamSepMatrix, p: ArrayLike, box: ParamBox | None = None) -> NDArray[np.float64]:
    """
    Evalúa la forma separable en `p`.

    Args:
        M (ParamSepMatrix): Función matricial.
        p (ArrayLike): Punto de parámetros.
        box (ParamBox | None): Si se indica, `p` debe pertenecer a la caja.

    Returns:
        NDArray: Σ fᵢ(p)·Mᵢ.
    """
    point = box.check(p) if box is not None else _as_point(p)
    return M.evaluate(point)


@dataclass(frozen=True, eq=False)
class ParametricSystem:
    """Sistema E(p)x' = A(p)x + B(p)u, y = C(p)x sobre una caja de parámetros."""

    E: ParamSepMatrix
    A: ParamSepMatrix
    B: ParamSepMatrix
    C: ParamSepMatrix
    domain: ParamBox

    def __post_init__(self) -> None:
        n = self.A.shape[0]
        if self.A.shape != (n, n) or self.E.shape != (n, n):
            raise DimensionError(f"E y A deben ser cuadradas del mismo orden: {self.E.shape}, {self.A.shape}")
        if self.B.shape[0] != n or self.C.shape[1] != n:
            raise DimensionError(f"B {self.B.shape} o C {self.C.shape} no encajan con n={n}")
        for family in (self.E, self.A, self.B, self.C):
            family.validate(self.domain)

    @classmethod
    def constant(
        cls,
        E: ArrayLike,
        A: ArrayLike,
        B: ArrayLike,
        C: ArrayLike,
        domain: ParamBox | None = None,
    ) -> "ParametricSystem":
        """Sistema no paramétrico; por defecto sobre la caja [0, 1]."""
        return cls(
            ParamSepMatrix.constant(E),
            ParamSepMatrix.constant(A),
            ParamSepMatrix.constant(B),
            ParamSepMatrix.constant(C),
            domain or ParamBox.interval(0.0, 1.0),
        )

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def m(self) -> int:
        return self.B.shape[1]

    @property
    def n_outputs(self) -> int:
        return self.C.shape[0]

    @property
    def d(self) -> int:
        return self.domain.d

    @property
    def families(self) -> dict[str, ParamSepMatrix]:
        return {"E": self.E, "A": self.A, "B": self.B, "C": self.C}

    @property
    def is_constant(self) -> bool:
        return all(
            coeff.key is not None and coeff.key[0] is CoeffKind.CONSTANT
            for family in self.families.values()
            for coeff in family.coeffs
        )

    def at(self, name: str, p: ArrayLike) -> NDArray[np.float64]:
        """Evalúa la familia `name` en `p`; DomainError si `p` está fuera de la caja."""
        return eval_matrix(self.families[name], p, self.domain)

    def matrices(self, p: ArrayLike) -> tuple[NDArray, NDArray, NDArray, NDArray]:
        point = self.domain.check(p)
        return tuple(self.at(name, point) for name in ("E", "A", "B", "C"))

    def replace(self, **families: ParamSepMatrix) -> "ParametricSystem":
        current = self.families | families
        return ParametricSystem(current["E"], current["A"], current["B"], current["C"], self.domain)


def transfer_eval(sys: ParametricSystem, s: complex, p: ArrayLike) -> NDArray[np.complex128]:
    """Evalúa H(s; p) = C(p)(sE(p) − A(p))⁻¹B(p)."""
    E, A, B, C = sys.matrices(p)
    try:
        X = linalg.solve(s * E - A, B.astype(complex))
    except (linalg.LinAlgError, ValueError) as exc:
        raise ShiftSingularError(s) from exc
    if not np.all(np.isfinite(X)):
        raise ShiftSingularError(s)
    return C @ X


def _embed(mat: NDArray, shape: tuple[int, int], row: int, col: int) -> NDArray:
    out = np.zeros(shape)
    out[row : row + mat.shape[0], col : col + mat.shape[1]] = mat
    return out


def _assemble(parts: list[tuple[ParamSepMatrix, int, int, float]], shape: tuple[int, int]) -> ParamSepMatrix:
    terms = [
        (coeff, sign * _embed(mat, shape, row, col))
        for family, row, col, sign in parts
        for coeff, mat in family.terms
    ]
    return ParamSepMatrix(tuple(terms)).merged()


def error_system(fom: ParametricSystem, rom: ParametricSystem) -> ParametricSystem:
    """
    Realización del sistema error H − Ĥ con bloques diagonales en E y A,
    B apilada y C = [C, −Ĉ]; los coeficientes repetidos se fusionan.
    """
    if fom.m != rom.m or fom.n_outputs != rom.n_outputs:
        raise DimensionError(
            f"Entradas/salidas distintas: FOM ({fom.m}, {fom.n_outputs}), ROM ({rom.m}, {rom.n_outputs})"
        )
    if not fom.domain.same_as(rom.domain):
        raise DimensionError("FOM y ROM deben compartir la caja de parámetros")
    n, r = fom.n, rom.n
    size = n + r
    return ParametricSystem(
        E=_assemble([(fom.E, 0, 0, 1.0), (rom.E, n, n, 1.0)], (size, size)),
        A=_assemble([(fom.A, 0, 0, 1.0), (rom.A, n, n, 1.0)], (size, size)),
        B=_assemble([(fom.B, 0, 0, 1.0), (rom.B, n, 0, 1.0)], (size, fom.m)),
        C=_assemble([(fom.C, 0, 0, 1.0), (rom.C, 0, n, -1.0)], (fom.n_outputs, size)),
        domain=fom.domain,
    )


def poles(sys: ParametricSystem, p: ArrayLike) -> NDArray[np.complex128]:
    E, A, _, _ = sys.matrices(p)
    return gen_eigvals(A, E)


def project(fom: ParametricSystem, V: ArrayLike, W: ArrayLike | None = None) -> ParametricSystem:
    """
    Proyección de Petrov–Galerkin (Galerkin si W es None) término a término,
    conservando las funciones de coeficiente del FOM.
    """
    V = np.asarray(V, dtype=float)
    W = V if W is None else np.asarray(W, dtype=float)
    if V.shape != W.shape or V.shape[0] != fom.n:
        raise DimensionError(f"Bases incompatibles: V {V.shape}, W {W.shape}, n={fom.n}")
    return ParametricSystem(
        E=fom.E.map(lambda M: W.T @ M @ V),
        A=fom.A.map(lambda M: W.T @ M @ V),
        B=fom.B.map(lambda M: W.T @ M),
        C=fom.C.map(lambda M: M @ V),
        domain=fom.domain,
    )


def _coeff_to_document(coeff: ScalarCoeff):
    if coeff.kind is CoeffKind.CONSTANT:
        return ConstantCoeff(value=coeff.value)
    if coeff.kind is CoeffKind.MONOMIAL:
        return MonomialCoeff(exponents=list(coeff.exponents))
    if coeff.kind is CoeffKind.RATIONAL_SHIFT:
        return RationalShiftCoeff(shift=coeff.shift, axis=coeff.axis)
    return CustomCoeff(tag=coeff.tag)


def _coeff_from_document(doc) -> ScalarCoeff:
    if isinstance(doc, ConstantCoeff):
        return ScalarCoeff.constant(doc.value)
    if isinstance(doc, MonomialCoeff):
        return ScalarCoeff.monomial(doc.exponents)
    if isinstance(doc, RationalShiftCoeff):
        return ScalarCoeff.rational_shift(doc.shift, doc.axis)
    return ScalarCoeff.custom(doc.tag)


def system_to_document(sys: ParametricSystem) -> SystemDocument:
    def terms(family: ParamSepMatrix) -> list[TermDocument]:
        return [
            TermDocument(coeff=_coeff_to_document(coeff), matrix=mat.tolist()) for coeff, mat in family.terms
        ]

    return SystemDocument(
        dims=DimsDocument(n=sys.n, m=sys.m, p=sys.n_outputs, d=sys.d),
        domain=DomainDocument(lower=sys.domain.lower.tolist(), upper=sys.domain.upper.tolist()),
        E=terms(sys.E),
        A=terms(sys.A),
        B=terms(sys.B),
        C=terms(sys.C),
    )


def system_from_document(doc: SystemDocument) -> ParametricSystem:
    def family(terms: list[TermDocument]) -> ParamSepMatrix:
        return ParamSepMatrix(
            tuple((_coeff_from_document(term.coeff), np.array(term.matrix, dtype=float)) for term in terms)
        )

    sys = ParametricSystem(
        E=family(doc.E),
        A=family(doc.A),
        B=family(doc.B),
        C=family(doc.C),
        domain=ParamBox(np.array(doc.domain.lower), np.array(doc.domain.upper)),
    )
    if (sys.n, sys.m, sys.n_outputs, sys.d) != (doc.dims.n, doc.dims.m, doc.dims.p, doc.dims.d):
        raise DimensionError(f"dims declaradas {doc.dims.model_dump()} no coinciden con las matrices")
    return sys
