import numpy as np
import pytest
from conftest import random_system

from parrom.core.errors import ConfigError, DimensionError, DomainError, ShiftSingularError
from parrom.services.psys import (
    ParamBox,
    ParametricSystem,
    ParamSepMatrix,
    ScalarCoeff,
    error_system,
    eval_matrix,
    poles,
    project,
    register_coeff,
    system_from_document,
    system_to_document,
    transfer_eval,
)

ONE = ScalarCoeff.constant()
P = ScalarCoeff.monomial([1])


@pytest.mark.parametrize(
    ("terms", "box", "p", "expected"),
    [
        ([(ONE, [[2.0]])], (0.0, 1.0), 0.5, [[2.0]]),
        ([(ONE, [[1.0, 2.0]]), (P, [[5.0, 7.0]])], (0.0, 1.0), 0.0, [[1.0, 2.0]]),
        ([(ONE, [[1.0]]), (P, [[3.0]])], (0.0, 3.0), 2.0, [[7.0]]),
    ],
)
def test_eval_matrix_cases(terms, box, p, expected):
    M = ParamSepMatrix(tuple((coeff, np.array(mat)) for coeff, mat in terms))
    assert eval_matrix(M, p, ParamBox.interval(*box)) == pytest.approx(np.array(expected))


def test_eval_matrix_outside_box():
    with pytest.raises(DomainError):
        eval_matrix(ParamSepMatrix.constant([[1.0]]), 1.5, ParamBox.interval(0.0, 1.0))


@pytest.mark.parametrize("p", [-0.1, 1.5])
def test_system_evaluation_checks_its_domain(scalar_fom, p):
    with pytest.raises(DomainError):
        scalar_fom.at("A", p)
    with pytest.raises(DomainError):
        scalar_fom.matrices(p)
    with pytest.raises(DomainError):
        transfer_eval(scalar_fom, 1j, p)
    assert scalar_fom.at("A", 1.0) == pytest.approx(np.array([[-1.0]]))


def test_eval_matrix_is_linear_in_matrices():
    rng = np.random.default_rng(3)
    coeffs = [ONE, P, ScalarCoeff.monomial([2])]
    first = [rng.standard_normal((3, 2)) for _ in coeffs]
    second = [rng.standard_normal((3, 2)) for _ in coeffs]
    M = ParamSepMatrix(tuple(zip(coeffs, first)))
    N = ParamSepMatrix(tuple(zip(coeffs, second)))
    total = ParamSepMatrix(tuple(zip(coeffs, [a + b for a, b in zip(first, second)])))
    for p in (0.0, 0.3, 1.0):
        assert total.evaluate(p) == pytest.approx(M.evaluate(p) + N.evaluate(p))


@pytest.mark.parametrize(
    ("system", "s", "expected"),
    [
        (ParametricSystem.constant([[1.0]], [[-1.0]], [[1.0]], [[1.0]]), 0.0, 1.0),
        (ParametricSystem.constant([[1.0]], [[-1.0]], [[1.0]], [[1.0]]), 1j, 1 / (1 + 1j)),
        (ParametricSystem.constant(np.eye(2), np.diag([-1.0, -2.0]), np.ones((2, 1)), np.ones((1, 2))), 0.0, 1.5),
    ],
)
def test_transfer_eval_cases(system, s, expected):
    value = transfer_eval(system, s, 0.5)
    assert value.shape == (1, 1)
    assert value[0, 0] == pytest.approx(expected)


def test_transfer_eval_singular_shift_reports_shift():
    system = ParametricSystem.constant([[1.0]], [[-1.0]], [[1.0]], [[1.0]])
    with pytest.raises(ShiftSingularError) as info:
        transfer_eval(system, -1.0, 0.5)
    assert info.value.shift == -1.0


def test_error_system_scalar_blocks(scalar_fom, scalar_rom):
    err = error_system(scalar_fom, scalar_rom)
    E, A, B, C = err.matrices(0.5)
    assert E == pytest.approx(np.eye(2))
    assert A == pytest.approx(np.diag([-1.0, -2.0]))
    assert B == pytest.approx(np.array([[1.0], [1.0]]))
    assert C == pytest.approx(np.array([[1.0, -1.0]]))


def test_error_system_merges_shared_coefficients():
    fom = random_system(0, 3, q_A=2)
    rom = ParametricSystem.constant(
        np.eye(2), np.array([[-1.0, 0.5], [-0.5, -1.0]]), np.ones((2, 1)), np.ones((1, 2))
    )
    err = error_system(fom, rom)
    assert len(err.A) == 2
    constant, linear = err.A.terms
    assert constant[0].same_as(ONE)
    assert np.count_nonzero(constant[1][3:, 3:]) == 4
    assert np.count_nonzero(linear[1][3:, 3:]) == 0


def test_error_system_transfer_is_difference():
    fom = random_system(1, 12, m=2, p=2, q_A=3, q_B=2)
    rom = project(fom, np.linalg.qr(np.random.default_rng(2).standard_normal((12, 4)))[0])
    err = error_system(fom, rom)
    rng = np.random.default_rng(4)
    for _ in range(5):
        s = complex(rng.uniform(0, 2), rng.uniform(-5, 5))
        p = rng.uniform()
        expected = transfer_eval(fom, s, p) - transfer_eval(rom, s, p)
        assert np.linalg.norm(transfer_eval(err, s, p) - expected) <= 1e-10 * np.linalg.norm(expected)


def test_error_system_of_identical_systems_vanishes():
    fom = random_system(5, 6)
    err = error_system(fom, fom)
    for s, p in [(1j, 0.1), (2.0, 0.5), (0.5 + 3j, 0.9)]:
        assert np.abs(transfer_eval(err, s, p)).max() <= 1e-10


def test_error_system_rejects_mismatched_io():
    fom = random_system(0, 4, m=2)
    rom = random_system(0, 2, m=1)
    with pytest.raises(DimensionError):
        error_system(fom, rom)


@pytest.mark.parametrize(
    ("E", "A", "expected"),
    [
        (np.eye(2), np.array([[-1.0, 10.0], [-10.0, -1.0]]), [-1 - 10j, -1 + 10j]),
        (np.array([[2.0]]), np.array([[-2.0]]), [-1.0]),
        (np.eye(3), np.diag([-1.0, -2.0, -3.0]), [-3.0, -2.0, -1.0]),
    ],
)
def test_poles_cases(E, A, expected):
    system = ParametricSystem.constant(E, A, np.ones((len(E), 1)), np.ones((1, len(E))))
    values = np.sort_complex(poles(system, 0.5))
    assert values == pytest.approx(np.sort_complex(np.array(expected, dtype=complex)))


def test_poles_match_characteristic_polynomial_roots():
    rng = np.random.default_rng(7)
    A = rng.standard_normal((5, 5))
    system = ParametricSystem.constant(np.eye(5), A, np.ones((5, 1)), np.ones((1, 5)))
    computed = poles(system, 0.0)
    for root in np.roots(np.poly(A)):
        assert np.min(np.abs(computed - root)) <= 1e-6 * max(1.0, abs(root))


def test_error_system_poles_are_union():
    fom = random_system(8, 5)
    rom = project(fom, np.linalg.qr(np.random.default_rng(9).standard_normal((5, 2)))[0])
    union = np.concatenate([poles(fom, 0.3), poles(rom, 0.3)])
    computed = poles(error_system(fom, rom), 0.3)
    assert len(computed) == len(union)
    for value in union:
        assert np.min(np.abs(computed - value)) <= 1e-8 * max(1.0, abs(value))


def test_rational_shift_pole_inside_box_rejected():
    with pytest.raises(DomainError):
        ParametricSystem(
            E=ParamSepMatrix.constant([[1.0]]),
            A=ParamSepMatrix.of((ScalarCoeff.rational_shift(0.5), np.array([[-1.0]]))),
            B=ParamSepMatrix.constant([[1.0]]),
            C=ParamSepMatrix.constant([[1.0]]),
            domain=ParamBox.interval(0.0, 1.0),
        )


def test_inconsistent_term_shapes_rejected():
    with pytest.raises(DimensionError):
        ParamSepMatrix.of((ONE, np.eye(2)), (P, np.eye(3)))


def test_unregistered_custom_coefficient_rejected():
    with pytest.raises(ConfigError):
        ScalarCoeff.custom("sin-no-registrado")


def test_box_grid_and_linspace():
    box = ParamBox(np.zeros(2), np.ones(2))
    assert box.linspace(3).shape == (9, 2)
    assert box.grid(101).shape == (121, 2)
    assert ParamBox.interval(0.0, 2.0).grid().shape == (101, 1)
    assert box.measure == pytest.approx(1.0)


def test_document_conversion_keeps_structure():
    register_coeff("cuadrado", lambda p: float(p[0] ** 2))
    system = ParametricSystem(
        E=ParamSepMatrix.constant(np.eye(2)),
        A=ParamSepMatrix.of(
            (ONE, -np.eye(2)),
            (ScalarCoeff.rational_shift(-1.0), np.diag([-1.0, -0.5])),
            (ScalarCoeff.custom("cuadrado"), np.diag([-0.2, -0.1])),
        ),
        B=ParamSepMatrix.constant(np.ones((2, 1))),
        C=ParamSepMatrix.constant(np.ones((1, 2))),
        domain=ParamBox.interval(0.0, 1.0),
    )
    restored = system_from_document(system_to_document(system))
    assert restored.A.evaluate(0.7) == pytest.approx(system.A.evaluate(0.7))
    assert [repr(c) for c in restored.A.coeffs] == [repr(c) for c in system.A.coeffs]


def test_document_dims_must_match():
    document = system_to_document(random_system(0, 3))
    document.dims.n = 4
    with pytest.raises(DimensionError):
        system_from_document(document)
