"""Jerarquía de errores de la librería con su código de salida para la CLI."""

from __future__ import annotations

from typing import Any


class ParromError(Exception):
    """Error base; `detail` es el mensaje legible y `exit_code` el código de la CLI."""

    default_detail = "Fallo numérico"
    exit_code = 4

    def __init__(self, detail: str | None = None):
        self.detail = detail or self.default_detail
        super().__init__(self.detail)


class ConfigError(ParromError):
    default_detail = "Configuración inválida"
    exit_code = 2


class DomainError(ParromError, ValueError):
    default_detail = "Punto fuera del dominio de parámetros"
    exit_code = 2


class DimensionError(ParromError, ValueError):
    default_detail = "Dimensiones inconsistentes"
    exit_code = 2


class ModelError(ParromError):
    default_detail = "No se pudo generar el modelo"
    exit_code = 2


class InitError(ParromError):
    default_detail = "El ROM inicial no es asintóticamente estable"
    exit_code = 3


class InstabilityError(ParromError):
    default_detail = "El sistema no es estable en todo el dominio"
    exit_code = 3


class MatEqFailure(ParromError):
    default_detail = "No se pudo resolver la ecuación matricial"


class ConditionError(ParromError):
    default_detail = "Matriz E singular a precisión de trabajo"

    def __init__(self, rcond: float, detail: str | None = None):
        self.rcond = rcond
        super().__init__(detail or f"{self.default_detail} (rcond={rcond:.3e})")


class ShiftSingularError(ParromError):
    default_detail = "sE - A es singular"

    def __init__(self, shift: complex, detail: str | None = None):
        self.shift = shift
        super().__init__(detail or f"{self.default_detail} en s={shift}")


class IntegrandFailure(ParromError):
    default_detail = "Integrando no finito"

    def __init__(self, point: Any, detail: str | None = None):
        self.point = point
        super().__init__(detail or f"{self.default_detail} en p={point}")


class FeasibilityViolation(ParromError):
    default_detail = "Se aceptó un iterado inestable"
