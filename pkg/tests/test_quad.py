import numpy as np
import pytest

from parrom.core.errors import DomainError, IntegrandFailure
from parrom.schemas.config import QuadSpec
from parrom.services.psys import ParamBox
from parrom.services.quad import GAUSS_WEIGHTS, KRONROD_NODES, KRONROD_WEIGHTS, integrate

UNIT = ParamBox.interval(0.0, 1.0)


@pytest.mark.parametrize(
    ("f", "box", "spec", "expected", "tol"),
    [
        (lambda p: p[0] ** 2, UNIT, None, 1 / 3, 1e-12),
        (lambda p: 1 / (2 * p[0]), ParamBox.interval(1.0, 2.0), None, np.log(2) / 2, 1e-9),
        (lambda p: p[0], UNIT, QuadSpec.discrete([0.2, 0.8]), 1.0, 1e-14),
        (lambda p: p[0] ** 3, UNIT, QuadSpec.tensor(2), 0.25, 1e-14),
        (lambda p: np.exp(p[0]), ParamBox.interval(-1.0, 1.0), None, np.e - 1 / np.e, 1e-10),
    ],
)
def test_integrate_cases(f, box, spec, expected, tol):
    result = integrate(f, box, spec)
    assert result.value[0] == pytest.approx(expected, abs=tol)


@pytest.mark.parametrize("n", [2, 4, 8])
def test_tensor_rule_exact_to_degree_2n_minus_1(n):
    degree = 2 * n - 1
    line = integrate(lambda p: p[0] ** degree, UNIT, QuadSpec.tensor(n))
    assert line.value[0] == pytest.approx(1 / (degree + 1), abs=1e-13)
    square = integrate(lambda p: p[0] ** degree * p[1] ** degree, ParamBox(np.zeros(2), np.ones(2)), QuadSpec.tensor(n))
    assert square.value[0] == pytest.approx(1 / (degree + 1) ** 2, abs=1e-13)


def test_rules_integrate_constants():
    assert KRONROD_WEIGHTS.sum() == pytest.approx(2.0)
    assert GAUSS_WEIGHTS.sum() == pytest.approx(2.0)
    assert KRONROD_NODES == pytest.approx(-KRONROD_NODES[::-1])


def test_vector_integrand_shares_points():
    calls = []

    def f(p):
        calls.append(p[0])
        return [1.0, p[0], p[0] ** 2]

    result = integrate(f, UNIT)
    assert result.value == pytest.approx([1.0, 0.5, 1 / 3])
    assert len(calls) == result.evaluations


def test_two_dimensional_box():
    box = ParamBox(np.zeros(2), np.ones(2))
    value, error = integrate(lambda p: p[0] * p[1] ** 2, box)
    assert value[0] == pytest.approx(1 / 6, abs=1e-12)
    assert error[0] <= 1e-10


def test_adaptive_refines_singular_derivative():
    result = integrate(lambda p: np.sqrt(p[0]), UNIT, QuadSpec.adaptive(abs_tol=1e-10, rel_tol=1e-10))
    assert result.converged
    assert result.panels > 1
    assert result.value[0] == pytest.approx(2 / 3, abs=1e-9)


def test_panel_cap_reports_non_convergence():
    spec = QuadSpec(max_panels=1, abs_tol=1e-14, rel_tol=1e-14)
    result = integrate(lambda p: np.sqrt(p[0]), UNIT, spec)
    assert not result.converged
    assert result.panels == 1


def test_linearity():
    f = lambda p: np.sin(3 * p[0])  # noqa: E731
    g = lambda p: np.exp(-p[0])  # noqa: E731
    combined = integrate(lambda p: 2 * f(p) - 0.5 * g(p), UNIT).value[0]
    separate = 2 * integrate(f, UNIT).value[0] - 0.5 * integrate(g, UNIT).value[0]
    assert combined == pytest.approx(separate, abs=2e-9)


def test_non_finite_integrand_reports_point():
    with pytest.raises(IntegrandFailure):
        integrate(lambda p: 1 / p[0] if p[0] > 0.5 else np.inf, UNIT)


def test_discrete_point_outside_box():
    with pytest.raises(DomainError):
        integrate(lambda p: p[0], UNIT, QuadSpec.discrete([0.5, 1.5]))


def test_discrete_mode_requires_points():
    with pytest.raises(ValueError):
        QuadSpec(mode="discrete")
