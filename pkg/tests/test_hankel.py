# tests/test_hankel.py

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from core.errors import BadParameterError, IndexOutOfRangeError, ZeroSingularValueError
from core.gramian import gramians
from core.hankel import (
    apply_hankel_to_f,
    cluster_bounds,
    discretize,
    graded_panels,
    hankel_norm,
    hankel_spectrum,
    schmidt_pair,
)
from core.system import LtiSystem
from core.tolerances import DEFAULT_TOLERANCES
from tests.conftest import TWO_STATE_SIGMA


def test_one_state_closed_form(one_state):
    spec = hankel_spectrum(one_state)
    assert spec.sigma[0] == pytest.approx(0.5, abs=1e-12)
    assert_allclose(spec.V[:, 0], [math.sqrt(2.0)], rtol=1e-12)
    assert spec.rank == 1
    assert spec.sigma_at(2) == 0.0


def test_two_state_closed_form(two_state):
    spec = hankel_spectrum(two_state)
    assert_allclose(spec.sigma, TWO_STATE_SIGMA, atol=1e-10)
    assert hankel_norm(two_state) == pytest.approx(TWO_STATE_SIGMA[0], abs=1e-10)


def test_zero_input_has_zero_spectrum(zero_input):
    spec = hankel_spectrum(zero_input)
    assert np.all(spec.sigma == 0.0)
    assert spec.rank == 0
    with pytest.raises(ZeroSingularValueError):
        schmidt_pair(spec, 1)


def test_singular_functions_one_state(one_state):
    pair = schmidt_pair(hankel_spectrum(one_state), 1)
    assert_allclose(pair.g([0.0, 1.0])[:, 0], math.sqrt(2.0) * np.exp([0.0, -1.0]), rtol=1e-12)
    assert_allclose(pair.f([-1.0])[:, 0], [math.sqrt(2.0) * math.exp(-1.0)], rtol=1e-12)
    with pytest.raises(BadParameterError):
        pair.g(-1.0)
    with pytest.raises(BadParameterError):
        pair.f(0.5)


def test_schmidt_pairs_are_orthonormal(two_state):
    spec = hankel_spectrum(two_state)
    pairs = [schmidt_pair(spec, i) for i in (1, 2)]
    gram_out = np.array([[a.output_inner(b) for b in pairs] for a in pairs])
    gram_in = np.array([[a.input_inner(b) for b in pairs] for a in pairs])
    assert_allclose(gram_out, np.eye(2), atol=1e-8)
    assert_allclose(gram_in, np.eye(2), atol=1e-8)


def test_index_out_of_range(two_state):
    spec = hankel_spectrum(two_state)
    with pytest.raises(IndexOutOfRangeError):
        schmidt_pair(spec, 0)
    with pytest.raises(IndexOutOfRangeError):
        schmidt_pair(spec, 3)


def test_hankel_action(small_corpus):
    for sys in small_corpus:
        spec = hankel_spectrum(sys)
        record = apply_hankel_to_f(spec, 1)
        assert record.passed
        assert record.sigma == spec.sigma_at(1)


def test_eigen_residuals_small(small_corpus):
    for sys in small_corpus:
        spec = hankel_spectrum(sys)
        assert spec.eig_residuals[0] <= 1e-8
        assert spec.q_orthonormality_defect(1) <= 1e-8


def test_cluster_bounds():
    sigma = np.array([3.0, 2.0, 2.0, 1.0])
    assert cluster_bounds(sigma, 1, 1e-9) == (1, 3)
    assert cluster_bounds(sigma, 2, 1e-9) == (1, 3)
    assert cluster_bounds(sigma, 0, 1e-9) == (0, 1)


def test_graded_panels():
    edges = graded_panels(10.0, 4, 2.0)
    assert edges[0] == 0.0
    assert edges[-1] == pytest.approx(10.0)
    assert np.all(np.diff(np.diff(edges)) > 0.0)


def test_discretization_matches_sigma(two_state, small_corpus):
    for sys in [two_state] + small_corpus[:1]:
        spec = hankel_spectrum(sys)
        top = min(spec.order, 5)
        disc = discretize(sys)
        assert_allclose(disc.singular_values()[:top], spec.sigma[:top],
                        rtol=1e-3, atol=1e-6 * spec.sigma[0])


def test_discretization_refines(one_state):
    fine = discretize(one_state, nodes_per_panel=16, panels=24)
    assert fine.singular_values()[0] == pytest.approx(0.5, rel=1e-5)


def test_quadrature_gramians(two_state):
    disc = discretize(two_state)
    G = gramians(two_state)
    assert_allclose(disc.controllability_gramian(), G.P, atol=1e-8)
    assert_allclose(disc.observability_gramian(), G.Q, atol=1e-8)
    v = hankel_spectrum(two_state).V[:, 0]
    assert disc.output_inner(v, v) == pytest.approx(1.0, abs=1e-6)


def test_discretize_rejects_bad_grid(one_state):
    with pytest.raises(BadParameterError):
        discretize(one_state, nodes_per_panel=0)


def test_certified_vectors_resolve_below_old_cut(small_corpus):
    tol = DEFAULT_TOLERANCES
    for sys in small_corpus:
        spec = hankel_spectrum(sys)
        count = spec.certifiable(tol.hankel_eig, tol.rounding_margin)
        assert count >= np.count_nonzero(spec.sigma > 1e-4 * spec.sigma[0])
        assert spec.q_orthonormality_defect(count) <= 1e-8
        for i in range(1, count + 1):
            assert apply_hankel_to_f(spec, i).defect <= 1e-8


def test_tiny_sigma_is_nonzero_but_not_certifiable():
    b = np.array([[1.0], [1e-5]])
    sys = LtiSystem(np.diag([-1.0, -2.0]), b, b.T, name="weak_mode")
    spec = hankel_spectrum(sys)
    assert spec.rank == 2
    assert spec.sigma[1] < 1e-10 * spec.sigma[0]
    assert spec.certifiable(1e-8, 10.0) == 1


def test_left_vectors_are_observability_images(small_corpus):
    tol = DEFAULT_TOLERANCES
    for sys in small_corpus:
        spec = hankel_spectrum(sys)
        count = spec.certifiable(tol.hankel_eig, tol.rounding_margin)
        assert_allclose(spec.gramians.RQ @ spec.V[:, :count], spec.U[:, :count], atol=1e-8)


def test_unobservable_direction_completes_basis():
    sys = LtiSystem(np.diag([-1.0, -2.0]), [[1.0], [1.0]], [[1.0, 0.0]], name="hidden_mode")
    spec = hankel_spectrum(sys)
    assert spec.rank == 1
    assert spec.q_orthonormality_defect(1) <= 1e-10
    hidden = spec.V[:, 1]
    assert abs(hidden[1]) == pytest.approx(1.0, abs=1e-8)
    assert_allclose(spec.gramians.RQ @ hidden, 0.0, atol=1e-10)
