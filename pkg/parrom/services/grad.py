"""Gradientes analíticos de 𝒥 respecto a las matrices de coeficientes del ROM
y residuos de las condiciones de optimalidad de primer orden."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterator

import numpy as np
from numpy.typing import NDArray

from parrom.core.errors import ParromError
from parrom.schemas.config import QuadSpec
from parrom.schemas.reports import ResidualItem
from parrom.services.gramians import GramianBlocks, GramianCache, gramian_blocks, objective_integrand
from parrom.services.psys import ParametricSystem
from parrom.services.quad import integrate

logger = logging.getLogger(__name__)

FAMILIES = ("E", "A", "B", "C")


@dataclass
class GradientSet:
    """Una matriz gradiente por matriz de coeficientes del ROM, familia por familia."""

    dE: list[NDArray[np.float64]]
    dA: list[NDArray[np.float64]]
    dB: list[NDArray[np.float64]]
    dC: list[NDArray[np.float64]]

    @classmethod
    def zeros_like(cls, rom: ParametricSystem) -> "GradientSet":
        return cls(*[[np.zeros_like(mat) for mat in rom.families[f].matrices] for f in FAMILIES])

    @classmethod
    def from_flat(cls, rom: ParametricSystem, flat: NDArray) -> "GradientSet":
        mats, offset = {}, 0
        for family in FAMILIES:
            mats[family] = []
            for mat in rom.families[family].matrices:
                mats[family].append(flat[offset : offset + mat.size].reshape(mat.shape))
                offset += mat.size
        return cls(mats["E"], mats["A"], mats["B"], mats["C"])

    def family(self, name: str) -> list[NDArray[np.float64]]:
        return {"E": self.dE, "A": self.dA, "B": self.dB, "C": self.dC}[name]

    def items(self) -> Iterator[tuple[str, NDArray[np.float64]]]:
        """Pares (etiqueta, matriz) como E1, A1, A2, B1, C1…"""
        for name in FAMILIES:
            for index, mat in enumerate(self.family(name), start=1):
                yield f"{name}{index}", mat

    def flatten(self) -> NDArray[np.float64]:
        parts = [mat.ravel() for _, mat in self.items()]
        return np.concatenate(parts) if parts else np.zeros(0)

    def norm(self) -> float:
        return float(np.linalg.norm(self.flatten()))


def _point_gradients(
    fom: ParametricSystem, rom: ParametricSystem, p: NDArray, blocks: GramianBlocks
) -> list[NDArray]:
    """Integrandos de Q̂ᵀÂP̂ + Q̃ᵀAP̃ etc. ponderados por cada coeficiente del ROM, sin el factor 2."""
    E, A, B, C = fom.matrices(p)
    Er, Ar, Br, Cr = rom.matrices(p)
    Pt, Ph, Qt, Qh = blocks.p_mix, blocks.p_red, blocks.q_mix, blocks.q_red
    base = {
        "E": Qh.T @ Ar @ Ph + Qt.T @ A @ Pt,
        "A": Qh.T @ Er @ Ph + Qt.T @ E @ Pt,
        "B": Qh.T @ Br + Qt.T @ B,
        "C": Cr @ Ph - C @ Pt,
    }
    return [
        value * base[family]
        for family in FAMILIES
        for value in rom.families[family].coefficient_values(p)
    ]


def gradient(
    fom: ParametricSystem,
    rom: ParametricSystem,
    spec: QuadSpec | None = None,
    cache: GramianCache | None = None,
) -> tuple[float, GradientSet]:
    """
    Evalúa 𝒥ₛ y su gradiente en una sola pasada de cuadratura.

    El integrando apila [tr(ĈP̂Ĉᵀ − 2CP̃Ĉᵀ), vec de cada gradiente], de modo
    que todas las componentes comparten los mismos puntos.

    Args:
        fom (ParametricSystem): Modelo de orden completo.
        rom (ParametricSystem): Modelo reducido estable en toda la caja.
        spec (QuadSpec | None): Regla de cuadratura.
        cache (GramianCache | None): Caché de bloques de esta evaluación.

    Returns:
        tuple[float, GradientSet]: (𝒥ₛ, gradiente); (+inf, ceros) si falla algún punto.
    """
    cache = cache or GramianCache()

    def integrand(p: NDArray) -> NDArray:
        blocks = cache.get_or_compute(p, lambda: gramian_blocks(fom, rom, p, "both"))
        if blocks.q_mix is None:
            blocks = gramian_blocks(fom, rom, p, "both")
        value = objective_integrand(blocks, fom.at("C", p), rom.at("C", p))
        parts = [mat.ravel() for mat in _point_gradients(fom, rom, p, blocks)]
        return np.concatenate([[value], *parts])

    try:
        result = integrate(integrand, fom.domain, spec)
    except ParromError as exc:
        logger.info("𝒥ₛ = +inf en el gradiente: %s", exc.detail)
        return float("inf"), GradientSet.zeros_like(rom)
    return float(result.value[0]), GradientSet.from_flat(rom, 2 * result.value[1:])


def fonc_residuals(
    fom: ParametricSystem,
    rom: ParametricSystem,
    spec: QuadSpec | None = None,
    grads: GradientSet | None = None,
) -> list[ResidualItem]:
    """‖∇‖_F / 2 por matriz de coeficientes, con etiquetas E1, A1, … B1, C1."""
    if grads is None:
        value, grads = gradient(fom, rom, spec)
        if not np.isfinite(value):
            raise ParromError("No se pudieron evaluar las condiciones de optimalidad")
    return [ResidualItem(label=label, norm=float(np.linalg.norm(mat)) / 2) for label, mat in grads.items()]


def nonparametric_gradient(
    fom: ParametricSystem, rom: ParametricSystem
) -> tuple[NDArray, NDArray, NDArray, NDArray]:
    """Gradientes respecto a Ê, Â, B̂, Ĉ de sistemas no paramétricos, sin cuadratura."""
    if not (fom.is_constant and rom.is_constant):
        raise ParromError("El gradiente no paramétrico requiere coeficientes constantes")
    p = fom.domain.midpoint
    blocks = gramian_blocks(fom, rom, p, "both")
    E, A, B, C = fom.matrices(p)
    Er, Ar, Br, Cr = rom.matrices(p)
    Pt, Ph, Qt, Qh = blocks.p_mix, blocks.p_red, blocks.q_mix, blocks.q_red
    return (
        2 * (Qh.T @ Ar @ Ph + Qt.T @ A @ Pt),
        2 * (Qh.T @ Er @ Ph + Qt.T @ E @ Pt),
        2 * (Qh.T @ Br + Qt.T @ B),
        2 * (Cr @ Ph - C @ Pt),
    )
