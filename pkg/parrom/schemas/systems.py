from typing import Annotated, Literal, Union

from pydantic import BaseModel, Field


class ConstantCoeff(BaseModel):
    kind: Literal["constant"] = "constant"
    value: float = 1.0


class MonomialCoeff(BaseModel):
    kind: Literal["monomial"] = "monomial"
    exponents: list[int]


class RationalShiftCoeff(BaseModel):
    kind: Literal["rational_shift"] = "rational_shift"
    shift: float
    axis: int = 0


class CustomCoeff(BaseModel):
    kind: Literal["custom"] = "custom"
    tag: str


CoeffDocument = Annotated[
    Union[ConstantCoeff, MonomialCoeff, RationalShiftCoeff, CustomCoeff],
    Field(discriminator="kind"),
]


class TermDocument(BaseModel):
    coeff: CoeffDocument
    matrix: list[list[float]]


class DomainDocument(BaseModel):
    lower: list[float]
    upper: list[float]


class DimsDocument(BaseModel):
    n: int
    m: int
    p: int
    d: int


class SystemDocument(BaseModel):
    """Documento JSON de un sistema paramétrico (FOM o ROM)."""

    dims: DimsDocument
    domain: DomainDocument
    E: list[TermDocument]
    A: list[TermDocument]
    B: list[TermDocument]
    C: list[TermDocument]
