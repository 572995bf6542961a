# tests/test_linalg.py

import numpy as np
import pytest
from numpy.testing import assert_allclose

from core.errors import (
    BadParameterError,
    DimensionMismatchError,
    NotSymmetricError,
    SingularMatrixError,
)
from core.linalg import (
    as_matrix,
    block_eigenvalues,
    expm,
    orthonormalize,
    real_schur,
    solve,
    spectral_abscissa_of,
    spectral_radius,
    svd,
    symmetric_eig,
)


def test_as_matrix_shapes():
    assert as_matrix(3.0).shape == (1, 1)
    assert as_matrix([1.0, 2.0]).shape == (1, 2)
    with pytest.raises(BadParameterError):
        as_matrix([[np.nan]])
    with pytest.raises(DimensionMismatchError):
        as_matrix(np.zeros((2, 2, 2)))


@pytest.mark.parametrize('seed', [0, 1, 2])
def test_real_schur_reconstructs(seed):
    M = np.random.default_rng(seed).standard_normal((6, 6))
    Q, T = real_schur(M)
    assert_allclose(Q @ T @ Q.T, M, atol=1e-12)
    assert_allclose(Q.T @ Q, np.eye(6), atol=1e-12)
    assert np.allclose(np.tril(T, -2), 0.0)


def test_block_eigenvalues_complex_pair():
    re, im = block_eigenvalues(np.array([[0.0, 1.0], [-1.0, 0.0]]))
    assert_allclose(re, [0.0, 0.0])
    assert_allclose(sorted(im), [-1.0, 1.0])


def test_spectral_abscissa_and_radius():
    assert spectral_abscissa_of(np.diag([-1.0, -3.0])) == pytest.approx(-1.0)
    assert spectral_radius(np.diag([-1.0, -3.0])) == pytest.approx(3.0)


def test_svd_descending_and_reconstructs():
    M = np.random.default_rng(3).standard_normal((5, 3))
    U, s, V = svd(M)
    assert np.all(np.diff(s) <= 0.0)
    assert_allclose((U * s) @ V.T, M, atol=1e-12)


def test_symmetric_eig_descending():
    w, V = symmetric_eig(np.diag([1.0, 3.0, 2.0]))
    assert_allclose(w, [3.0, 2.0, 1.0])
    assert_allclose(np.abs(V[:, 0]), [0.0, 1.0, 0.0])


def test_symmetric_eig_rejects_asymmetric():
    with pytest.raises(NotSymmetricError):
        symmetric_eig(np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_expm():
    assert_allclose(expm(np.zeros((3, 3))), np.eye(3))
    assert_allclose(expm([[-1.0]], 2.0), [[np.exp(-2.0)]], rtol=1e-14)


def test_solve_and_singular():
    x = solve(np.array([[2.0, 0.0], [0.0, 4.0]]), np.array([2.0, 2.0]))
    assert_allclose(x, [1.0, 0.5])
    with pytest.raises(SingularMatrixError):
        solve(np.ones((2, 2)), np.array([1.0, 2.0]))


def test_orthonormalize():
    Q = orthonormalize(np.array([[1.0, 1.0], [0.0, 1.0], [0.0, 0.0]]))
    assert_allclose(Q.T @ Q, np.eye(2), atol=1e-14)
    with pytest.raises(DimensionMismatchError):
        orthonormalize(np.array([[1.0, 2.0], [1.0, 2.0]]))
