# tests/test_system.py

import logging

import numpy as np
import pytest
from numpy.testing import assert_allclose

from core.errors import EXIT_DOMAIN, BadParameterError, DimensionMismatchError, UnstableSystemError, exit_code_for
from core.hankel import hankel_norm, hankel_spectrum
from core.system import (
    LtiSystem,
    ParameterRange,
    adjoint,
    error_system,
    instantiate,
    parallel,
    require_stable,
    scaled,
    series,
)
from models import generate


def test_dimensions_checked():
    with pytest.raises(DimensionMismatchError):
        LtiSystem(np.eye(2), np.ones((3, 1)), np.ones((1, 2)))
    with pytest.raises(DimensionMismatchError):
        LtiSystem(np.eye(2), np.ones((2, 1)), np.ones((1, 3)))
    with pytest.raises(DimensionMismatchError):
        LtiSystem(np.eye(2), np.ones((2, 1)), np.ones((1, 2)), np.zeros((2, 2)))


def test_missing_feedthrough_is_zero(two_state):
    assert two_state.D.shape == (1, 1)
    assert two_state.D[0, 0] == 0.0


def test_matrices_are_read_only(one_state):
    with pytest.raises(ValueError):
        one_state.A[0, 0] = 5.0


def test_stability(one_state):
    assert require_stable(one_state) == pytest.approx(-1.0)
    with pytest.raises(UnstableSystemError) as info:
        require_stable(LtiSystem([[1.0]], [[1.0]], [[1.0]]))
    assert exit_code_for(info.value) == EXIT_DOMAIN


def test_marginal_system_is_unstable():
    assert not LtiSystem([[0.0]], [[1.0]], [[1.0]]).is_stable()


def test_adjoint_transposes(small_corpus):
    sys = small_corpus[3]
    adj = adjoint(sys)
    assert (adj.n_inputs, adj.n_outputs) == (sys.n_outputs, sys.n_inputs)
    assert_allclose(adj.A, sys.A.T)
    assert_allclose(hankel_spectrum(adj).sigma, hankel_spectrum(sys).sigma, rtol=1e-9)


def test_error_system_with_itself_has_no_hankel_norm(two_state, small_corpus):
    err = error_system(two_state, two_state)
    assert err.n_states == 4
    assert hankel_norm(err) <= 1e-10 * hankel_norm(two_state)
    for seed in range(3):
        sys = generate('random_stable', 8, seed=seed, inputs=2, outputs=2)
        assert hankel_norm(error_system(sys, sys)) <= 1e-10 * hankel_norm(sys)


def test_adjoint_is_an_involution(small_corpus):
    for sys in small_corpus:
        twice = adjoint(adjoint(sys))
        assert twice.allclose(sys)
        assert all(np.array_equal(a, b) for a, b in zip(twice.matrices(), sys.matrices()))


def test_parallel_rejects_channel_mismatch(one_state, small_corpus):
    with pytest.raises(DimensionMismatchError):
        parallel(one_state, small_corpus[2])


def test_series_shapes(one_state, two_state):
    chain = series(one_state, two_state)
    assert chain.n_states == 3
    assert (chain.n_inputs, chain.n_outputs) == (1, 1)


def test_scaled_multiplies_sigma(two_state):
    assert_allclose(hankel_spectrum(scaled(two_state, -3.0)).sigma, 3.0 * hankel_spectrum(two_state).sigma,
                    rtol=1e-10)


def test_parameter_range_validated():
    with pytest.raises(BadParameterError):
        ParameterRange('p', 2.0, 1.0)


def test_instantiate_and_clamp(scalar_family, caplog):
    assert_allclose(instantiate(scalar_family, [1.5]).A, [[-1.5]])
    with caplog.at_level(logging.WARNING):
        sys = instantiate(scalar_family, [3.0])
    assert_allclose(sys.A, [[-2.0]])
    assert "обрезана" in caplog.text
    with pytest.raises(DimensionMismatchError):
        instantiate(scalar_family, [1.0, 2.0])


def test_instantiate_is_affine():
    psys = generate('heat1d', 4, diffusivity_min=0.5, diffusivity_max=4.0)
    a, b = instantiate(psys, [0.5]), instantiate(psys, [4.0])
    mid = instantiate(psys, [0.5 + 0.25 * 3.5])
    for Ma, Mb, Mm in zip(a.matrices(), b.matrices(), mid.matrices()):
        assert_allclose(Mm, 0.75 * Ma + 0.25 * Mb, rtol=1e-14, atol=1e-12)
    for Mbase, Mterm, Ma in zip(psys.base.matrices(), psys.terms[0].matrices(), a.matrices()):
        assert_allclose(Ma, Mbase + 0.5 * Mterm, rtol=1e-15)
