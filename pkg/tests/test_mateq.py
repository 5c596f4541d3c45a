import numpy as np
import pytest
from conftest import dissipative, spd

from parrom.core.errors import ConditionError, DimensionError, MatEqFailure
from parrom.services.mateq import (
    LyapProblem,
    SylvProblem,
    gen_eigvals,
    lyap_residual,
    pencil_rcond,
    solve_lyap,
    solve_sylv,
    sylv_residual,
)


def kron_lyap(A, E, R, transposed=False):
    """vec-Kronecker: A X Eᵀ + E X Aᵀ = −R (o la variante transpuesta)."""
    if transposed:
        A, E = A.T, E.T
    n = A.shape[0]
    K = np.kron(E, A) + np.kron(A, E)
    return np.linalg.solve(K, -R.reshape(-1, order="F")).reshape((n, n), order="F")


def kron_sylv(A, E, Ar, Er, M, transposed=False):
    if transposed:
        A, E, Ar, Er = A.T, E.T, Ar.T, Er.T
    n, r = M.shape
    K = np.kron(Er, A) + np.kron(Ar, E)
    return np.linalg.solve(K, -M.reshape(-1, order="F")).reshape((n, r), order="F")


@pytest.mark.parametrize(
    ("A", "E", "rhs", "expected"),
    [
        ([[-2.0]], [[1.0]], [[1.0]], [[0.25]]),
        (np.diag([-1.0, -2.0]), np.eye(2), np.eye(2), np.diag([0.5, 0.25])),
        ([[-2.0]], [[4.0]], [[1.0]], [[1 / 16]]),
    ],
)
def test_solve_lyap_cases(A, E, rhs, expected):
    X = solve_lyap(LyapProblem(np.array(A), np.array(E), np.array(rhs)))
    assert X == pytest.approx(np.array(expected))


@pytest.mark.parametrize("transposed", [False, True])
def test_solve_lyap_matches_kronecker(transposed):
    rng = np.random.default_rng(11)
    A, E = dissipative(rng, 8), spd(rng, 8)
    B = rng.standard_normal((8, 2))
    prob = LyapProblem(A, E, B @ B.T, transposed=transposed)
    X = solve_lyap(prob)
    oracle = kron_lyap(A, E, B @ B.T, transposed)
    assert np.linalg.norm(X - oracle) <= 1e-9 * np.linalg.norm(oracle)
    assert np.array_equal(X, X.T)
    assert lyap_residual(prob, X) <= 1e-10


def test_controllability_gramian_is_psd():
    rng = np.random.default_rng(12)
    A, E = dissipative(rng, 10), spd(rng, 10)
    B = rng.standard_normal((10, 1))
    X = solve_lyap(LyapProblem(A, E, B @ B.T))
    assert np.linalg.eigvalsh(X).min() >= -1e-10 * np.linalg.norm(X, 2)


@pytest.mark.parametrize(
    ("A", "E", "Ar", "Er", "M", "expected"),
    [
        ([[-1.0]], [[1.0]], [[-2.0]], [[1.0]], [[3.0]], [[1.0]]),
        (np.diag([-1.0, -3.0]), np.eye(2), [[-2.0]], [[1.0]], np.zeros((2, 1)), np.zeros((2, 1))),
    ],
)
def test_solve_sylv_cases(A, E, Ar, Er, M, expected):
    X = solve_sylv(SylvProblem(*(np.array(x, dtype=float) for x in (A, E, Ar, Er, M))))
    assert X == pytest.approx(np.array(expected))


@pytest.mark.parametrize(("seed", "transposed"), [(21, False), (22, True), (23, False), (24, True)])
def test_solve_sylv_matches_kronecker(seed, transposed):
    rng = np.random.default_rng(seed)
    n, r = 10, 3
    A, E = dissipative(rng, n), spd(rng, n)
    Ar, Er = dissipative(rng, r), spd(rng, r)
    M = rng.standard_normal((n, r))
    prob = SylvProblem(A, E, Ar, Er, M, transposed=transposed)
    X = solve_sylv(prob)
    oracle = kron_sylv(A, E, Ar, Er, M, transposed)
    assert np.linalg.norm(X - oracle) <= 1e-9 * np.linalg.norm(oracle)
    assert sylv_residual(prob, X) <= 1e-10


def test_solve_sylv_with_complex_reduced_spectrum():
    rng = np.random.default_rng(25)
    A, E = dissipative(rng, 6), np.eye(6)
    Ar = np.array([[-1.0, 5.0, 0.0], [-5.0, -1.0, 0.0], [0.0, 0.0, -2.0]])
    M = rng.standard_normal((6, 3))
    X = solve_sylv(SylvProblem(A, E, Ar, np.eye(3), M))
    oracle = kron_sylv(A, E, Ar, np.eye(3), M)
    assert np.linalg.norm(X - oracle) <= 1e-9 * np.linalg.norm(oracle)


def test_solve_sylv_rejects_shapes():
    with pytest.raises(DimensionError):
        solve_sylv(SylvProblem(-np.eye(3), np.eye(3), -np.eye(2), np.eye(2), np.ones((3, 3))))


ORTHO = np.linalg.qr(np.random.default_rng(31).standard_normal((3, 3)))[0]
SPIRAL = np.array([[-1.0, 5.0], [-5.0, -1.0]])


@pytest.mark.parametrize(
    ("A", "Ar", "transposed"),
    [
        (np.array([[-1.0]]), np.array([[1.0]]), False),
        (np.array([[-1.0]]), np.array([[1.0]]), True),
        (ORTHO @ np.diag([-1.0, -2.0, -3.0]) @ ORTHO.T, np.array([[1.0, 0.0], [4.0, 5.0]]), False),
        (SPIRAL, -SPIRAL.T, False),
        (SPIRAL, -SPIRAL.T, True),
    ],
)
def test_solve_sylv_overlapping_spectra_fail(A, Ar, transposed):
    n, r = len(A), len(Ar)
    M = np.random.default_rng(32).standard_normal((n, r))
    with pytest.raises(MatEqFailure):
        solve_sylv(SylvProblem(A, np.eye(n), Ar, np.eye(r), M, transposed=transposed))


@pytest.mark.parametrize(
    ("A", "E"),
    [
        (np.diag([1.0, -1.0]), np.eye(2)),
        (np.diag([0.0, -1.0]), np.eye(2)),
        (np.diag([-1.0, -1.0]), np.diag([1.0, -2.0])),
    ],
)
def test_solve_lyap_unstable_pencil_fails(A, E):
    with pytest.raises(MatEqFailure):
        solve_lyap(LyapProblem(A, E, np.eye(2)))


@pytest.mark.parametrize("where", ["A", "E", "rhs"])
def test_solve_lyap_rejects_non_finite_data(where):
    data = {"A": -np.eye(2), "E": np.eye(2), "rhs": np.eye(2)}
    data[where] = data[where].copy()
    data[where][0, 1] = np.nan
    with pytest.raises(MatEqFailure):
        solve_lyap(LyapProblem(data["A"], data["E"], data["rhs"]))


def test_singular_e_reports_rcond():
    with pytest.raises(ConditionError) as info:
        gen_eigvals(-np.eye(2), np.array([[1.0, 0.0], [0.0, 0.0]]))
    assert info.value.rcond == 0.0


def test_gen_eigvals_generalized_pencil():
    values = gen_eigvals(np.diag([-2.0, -6.0]), np.diag([2.0, 3.0]))
    assert np.sort(values.real) == pytest.approx([-2.0, -1.0])


def test_pencil_rcond_identity():
    assert pencil_rcond(np.eye(4)) == pytest.approx(1.0)
