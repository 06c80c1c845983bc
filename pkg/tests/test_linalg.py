import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from drpsylvester.errors import DimensionError
from drpsylvester.linalg import complete_orthonormal, numerical_rank, svd_small


def check(A, r, tol=1e-10):
    m, n = A.shape
    scale = max(1.0, np.linalg.norm(A))
    assert r.U.shape == (m, m) and r.V.shape == (n, n) and r.s.shape == (min(m, n),)
    np.testing.assert_allclose(r.U.T @ r.U, np.eye(m), atol=tol)
    np.testing.assert_allclose(r.V.T @ r.V, np.eye(n), atol=tol)
    np.testing.assert_allclose(r.reconstruct(), A, atol=tol * scale)
    assert np.all(np.diff(r.s) <= 0) and np.all(r.s >= 0)
    ev = np.clip(np.sort(np.linalg.eigvalsh(A.T @ A))[::-1][: min(m, n)], 0, None)
    np.testing.assert_allclose(r.s**2, ev, atol=1e-8 * scale**2)


@settings(max_examples=60, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(1, 12), st.integers(1, 12)), elements=st.floats(-100, 100)))
def test_svd_properties(A):
    check(A, svd_small(A))


@pytest.mark.parametrize("shape", [(1, 1), (1, 7), (7, 1), (5, 5), (20, 6), (6, 20)])
def test_svd_shapes(shape):
    A = np.random.default_rng(0).normal(size=shape)
    check(A, svd_small(A))


def test_zero_matrix():
    r = svd_small(np.zeros((4, 3)))
    assert np.all(r.s == 0)
    check(np.zeros((4, 3)), r)


def test_rank_deficient():
    rng = np.random.default_rng(1)
    A = rng.normal(size=(8, 2)) @ rng.normal(size=(2, 6))
    r = svd_small(A)
    check(A, r)
    assert numerical_rank(r.s) == 2


def test_graded_columns():
    # one column many orders below the others
    A = np.array([[1.0, 1e-170, 0.0], [0.0, 1e-170, 2.0], [1.0, 0.0, 1.0]])
    with np.errstate(over="raise", invalid="raise", divide="raise"):
        r = svd_small(A)
    check(A, r)


@pytest.mark.parametrize("scale", [1e-200, 1e-160, 1e150, 1e200])
def test_extreme_scales(scale):
    A = np.random.default_rng(2).normal(size=(5, 4))
    r = svd_small(A * scale)
    np.testing.assert_allclose(r.s / scale, svd_small(A).s, rtol=1e-12)


def test_known_values():
    r = svd_small(np.diag([3.0, -5.0, 1.0]))
    np.testing.assert_allclose(r.s, [5, 3, 1])


def test_tridiagonal_toeplitz_singular_values():
    # symmetric case: eigenvalues b + 2 d cos(k pi / (m + 1))
    m, b, d = 9, 0.3, 1.2
    A = b * np.eye(m) + d * (np.eye(m, k=1) + np.eye(m, k=-1))
    exact = np.sort(np.abs(b + 2 * d * np.cos(np.arange(1, m + 1) * np.pi / (m + 1))))[::-1]
    np.testing.assert_allclose(svd_small(A).s, exact, atol=1e-12)


def test_rejects():
    with pytest.raises(DimensionError):
        svd_small(np.zeros(3))
    with pytest.raises(DimensionError):
        svd_small(np.zeros((513, 2)))
    with pytest.raises(DimensionError):
        svd_small(np.zeros((0, 2)))
    with pytest.raises(ValueError):
        svd_small(np.array([[1.0, np.nan]]))


def test_numerical_rank():
    assert numerical_rank(np.array([])) == 0
    assert numerical_rank(np.array([0.0, 0.0])) == 0
    assert numerical_rank(np.array([1.0, 1e-11, 1e-13])) == 2
    assert numerical_rank(np.array([1.0, 1e-11]), rtol=1e-10) == 1


def test_complete_orthonormal():
    q = np.array([[1.0], [1.0], [0.0]]) / np.sqrt(2)
    Q = complete_orthonormal(q, 3)
    np.testing.assert_allclose(Q.T @ Q, np.eye(3), atol=1e-14)
    np.testing.assert_allclose(Q[:, 0], q[:, 0])
    assert complete_orthonormal(np.zeros((4, 0)), 4).shape == (4, 4)
