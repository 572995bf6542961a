# tests/test_gramian.py

import numpy as np
import pytest
from numpy.testing import assert_allclose

from core.errors import NonConvergenceError, NumericalError, SylvesterSingularError, UnstableSystemError
from core.gramian import gramians, lyapunov, lyapunov_factor, sylvester
from core.system import LtiSystem, adjoint
from tests.conftest import TWO_STATE_GRAMIAN


def _residual(A, X, W):
    return np.linalg.norm(A @ X + X @ A.T + W) / (
        2.0 * np.linalg.norm(A) * np.linalg.norm(X) + np.linalg.norm(W))


def test_one_state(one_state):
    G = gramians(one_state)
    assert_allclose(G.P, [[0.5]], rtol=1e-14)
    assert_allclose(G.Q, [[0.5]], rtol=1e-14)


def test_two_state_closed_form(two_state):
    G = gramians(two_state)
    assert_allclose(G.P, TWO_STATE_GRAMIAN, atol=1e-14)
    assert_allclose(G.Q, TWO_STATE_GRAMIAN, atol=1e-14)


def test_corpus_residuals(small_corpus):
    for sys in small_corpus:
        G = gramians(sys)
        assert _residual(sys.A, G.P, sys.B @ sys.B.T) <= 1e-10
        assert _residual(sys.A.T, G.Q, sys.C.T @ sys.C) <= 1e-10
        assert np.array_equal(G.P, G.P.T)
        assert np.linalg.eigvalsh(G.P).min() >= -1e-10 * np.linalg.norm(G.P, 2)


def test_unstable_rejected():
    with pytest.raises(UnstableSystemError):
        lyapunov(np.array([[0.5]]), np.array([[1.0]]))


def test_sylvester_solves_equation():
    rng = np.random.default_rng(7)
    A1 = -np.eye(3) + 0.1 * rng.standard_normal((3, 3))
    A2 = -2.0 * np.eye(2) + 0.1 * rng.standard_normal((2, 2))
    W = rng.standard_normal((3, 2))
    X = sylvester(A1, A2, W)
    assert_allclose(A1 @ X + X @ A2 + W, np.zeros((3, 2)), atol=1e-12)


def test_sylvester_singular():
    with pytest.raises(SylvesterSingularError):
        sylvester(np.array([[1.0]]), np.array([[-1.0]]), np.array([[1.0]]))


def test_zero_input_gives_zero_controllability(zero_input):
    G = gramians(zero_input)
    assert np.all(G.P == 0.0)
    assert G.residP == 0.0


def test_gramians_need_stability():
    with pytest.raises(UnstableSystemError):
        gramians(LtiSystem([[1.0]], [[1.0]], [[1.0]]))


def test_sylvester_bad_argument_is_numerical(monkeypatch):
    def broken_trsyl(T1, T2, F):
        return F, 1.0, -3

    monkeypatch.setattr('core.gramian.get_lapack_funcs', lambda names, arrays: (broken_trsyl,))
    with pytest.raises(NonConvergenceError) as info:
        sylvester(-np.eye(2), -np.eye(2), np.eye(2))
    assert isinstance(info.value, NumericalError)


def test_factors_reproduce_gramians(small_corpus, two_state):
    for sys in [two_state] + small_corpus:
        G = gramians(sys)
        scale_p = np.linalg.norm(G.P, 2)
        scale_q = np.linalg.norm(G.Q, 2)
        assert_allclose(G.RP.T @ G.RP, G.P, atol=1e-12 * scale_p)
        assert_allclose(G.RQ.T @ G.RQ, G.Q, atol=1e-12 * scale_q)
        assert np.allclose(G.RP, np.triu(G.RP))


def test_lyapunov_factor_complex_spectrum():
    # пара комплексно-сопряженных собственных значений -0.5 +- 3i и жорданов блок
    A = np.array([[-0.5, 3.0, 0.0, 0.0],
                  [-3.0, -0.5, 1.0, 0.0],
                  [0.0, 0.0, -2.0, 1.0],
                  [0.0, 0.0, 0.0, -2.0]])
    C = np.array([[1.0, 0.0, 1.0, 1.0], [0.0, 1.0, 0.0, 2.0]])
    R = lyapunov_factor(A, C)
    X = R.T @ R
    assert _residual(A.T, X, C.T @ C) <= 1e-13
    assert_allclose(X, lyapunov(A.T, C.T @ C), atol=1e-12 * np.linalg.norm(X, 2))


def test_lyapunov_factor_rank_deficient(zero_input):
    assert np.all(lyapunov_factor(zero_input.A.T, zero_input.B.T) == 0.0)
    with pytest.raises(UnstableSystemError):
        lyapunov_factor(np.array([[0.5]]), np.array([[1.0]]))


def test_symmetric_realization_has_equal_gramians():
    rng = np.random.default_rng(11)
    M = rng.standard_normal((5, 5))
    A = -(M @ M.T + np.eye(5))
    B = rng.standard_normal((5, 2))
    sys = LtiSystem(A, B, B.T, name="symmetric")
    G = gramians(sys)
    assert_allclose(G.P, G.Q, atol=1e-12 * np.linalg.norm(G.P, 2))


def test_adjoint_swaps_gramians(small_corpus):
    for sys in small_corpus:
        G = gramians(sys)
        Gadj = gramians(adjoint(sys))
        assert_allclose(Gadj.P, G.Q, atol=1e-13 * np.linalg.norm(G.Q, 2))
        assert_allclose(Gadj.Q, G.P, atol=1e-13 * np.linalg.norm(G.P, 2))
