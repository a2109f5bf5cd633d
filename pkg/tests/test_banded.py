import numpy as np
import pytest

from kompakton import (LinearSolveError, ParameterError, PeriodicBandedMatrix,
                       Scheme, operator_A, solve_periodic_banded)


def _random_matrix(m, seed=0, shift=6.0):
    rng = np.random.default_rng(seed)
    diags = rng.normal(size=(5, m))
    diags[2] += shift  # keep it comfortably nonsingular
    return PeriodicBandedMatrix(diags), rng


def test_identity_solve():
    m = 24
    diags = np.zeros((5, m))
    diags[2] = 1.0
    rhs = np.sin(np.arange(m, dtype=float))
    x = solve_periodic_banded(PeriodicBandedMatrix(diags), rhs)
    np.testing.assert_array_equal(x, rhs)


def test_random_roundtrip_m50():
    mat, rng = _random_matrix(50, seed=42)
    x = rng.normal(size=50)
    rhs = mat.matvec(x)
    recovered = solve_periodic_banded(mat, rhs)
    rel = np.max(np.abs(recovered - x)) / np.max(np.abs(x))
    assert rel < 1e-10


@pytest.mark.parametrize("m", [5, 8, 37, 200])
def test_matches_dense_solve(m):
    mat, rng = _random_matrix(m, seed=m)
    rhs = rng.normal(size=m)
    x = solve_periodic_banded(mat, rhs)
    dense = np.linalg.solve(mat.to_dense(), rhs)
    np.testing.assert_allclose(x, dense, rtol=1e-9, atol=1e-12)
    residual = np.max(np.abs(mat.matvec(x) - rhs))
    assert residual <= 1e-10 * np.max(np.abs(rhs))


def test_matvec_matches_dense():
    mat, rng = _random_matrix(17, seed=3)
    x = rng.normal(size=17)
    np.testing.assert_allclose(mat.matvec(x), mat.to_dense() @ x, rtol=1e-13)


def test_singular_periodic_second_difference():
    m = 20
    diags = np.zeros((5, m))
    diags[1] = 1.0
    diags[2] = -2.0
    diags[3] = 1.0
    rng = np.random.default_rng(1)
    with pytest.raises(LinearSolveError):
        solve_periodic_banded(PeriodicBandedMatrix(diags), rng.normal(size=m))


def test_from_stencil_matches_operator():
    m = 40
    op = operator_A(Scheme.PADE6)
    mat = PeriodicBandedMatrix.from_stencil(op, m)
    rng = np.random.default_rng(5)
    values = rng.normal(size=m)
    np.testing.assert_allclose(mat.matvec(values), op(values), rtol=1e-14)


def test_input_validation():
    mat, _ = _random_matrix(10)
    with pytest.raises(ParameterError):
        solve_periodic_banded(mat, np.zeros(9))
    with pytest.raises(LinearSolveError):
        solve_periodic_banded(mat, np.full(10, np.nan))
    with pytest.raises(ParameterError):
        PeriodicBandedMatrix(np.zeros((4, 10)))
    with pytest.raises(ParameterError):
        PeriodicBandedMatrix(np.zeros((5, 3)))
