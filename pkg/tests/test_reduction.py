# tests/test_reduction.py

import numpy as np
import pytest
from numpy.testing import assert_allclose

from core.errors import BadOrderError, BadParameterError
from core.gramian import gramians
from core.hankel import hankel_spectrum
from core.reduction import (
    BALANCED_TRUNCATION,
    OPTIMAL_HANKEL,
    balance,
    balanced_truncation,
    hankel_error,
    optimal_hankel,
    perturbation_search,
    reduce,
)
from models import generate
from tests.conftest import TWO_STATE_SIGMA


def _gap_orders(spec):
    s1 = spec.sigma_at(1)
    return [n for n in range(1, spec.order) if spec.sigma_at(n) - spec.sigma_at(n + 1) > 1e-3 * s1]


def test_balanced_gramians_are_diagonal(small_corpus):
    for sys in small_corpus:
        bal = balance(sys)
        G = gramians(bal.system)
        D = np.diag(bal.sigma)
        assert_allclose(G.P, D, atol=1e-9 * bal.sigma[0])
        assert_allclose(G.Q, D, atol=1e-9 * bal.sigma[0])
        assert bal.inverse_defect <= 1e-8


def test_balance_drops_nonminimal_states(zero_input, two_state):
    with pytest.raises(BadOrderError):
        balance(zero_input)
    doubled = generate('diag', 3, eigenvalues=[-1.0, -2.0, -5.0], b=[1.0, 1.0, 0.0], c=[1.0, 1.0, 1.0])
    bal = balance(doubled)
    assert bal.order == 2
    assert bal.truncated == 1
    assert_allclose(bal.sigma, TWO_STATE_SIGMA, rtol=1e-9)


def test_two_state_reductions(two_state):
    ohna = optimal_hankel(two_state, 1)
    bt = balanced_truncation(two_state, 1)
    s2 = TWO_STATE_SIGMA[1]
    assert ohna.method == OPTIMAL_HANKEL
    assert bt.method == BALANCED_TRUNCATION
    assert ohna.order == 1
    assert ohna.system.is_stable()
    assert ohna.hankel_error == pytest.approx(s2, rel=1e-6)
    assert s2 - 1e-10 <= bt.hankel_error <= 2.0 * s2 + 1e-10
    assert ohna.hankel_error <= bt.hankel_error + 1e-10


def test_optimal_error_on_corpus(small_corpus):
    for sys in small_corpus:
        spec = hankel_spectrum(sys)
        s1 = spec.sigma_at(1)
        for n in _gap_orders(spec):
            ohna = optimal_hankel(sys, n)
            bt = balanced_truncation(sys, n)
            target = spec.sigma_at(n + 1)
            assert abs(ohna.hankel_error - target) <= 1e-6 * target + 1e-8 * s1
            assert ohna.hankel_error <= bt.hankel_error + 1e-8 * s1
            assert (ohna.system.n_inputs, ohna.system.n_outputs) == (sys.n_inputs, sys.n_outputs)


def test_full_order_is_exact(one_state, two_state, small_corpus):
    for sys in [one_state, two_state] + small_corpus[:3]:
        red = optimal_hankel(sys, sys.n_states)
        assert red.order == sys.n_states
        assert red.hankel_error <= 1e-10 * hankel_spectrum(sys).sigma_at(1)
    red = optimal_hankel(two_state, 2)
    assert hankel_error(two_state, red) == pytest.approx(red.hankel_error, abs=1e-14)


def test_ohna_error_at_weak_gap(small_corpus):
    # малое sigma_{n+1} при хорошем зазоре: ошибка должна совпадать с ним до 1e-6 относительно
    for sys in small_corpus:
        spec = hankel_spectrum(sys)
        n = spec.order - 1
        target = spec.sigma_at(n + 1)
        if spec.sigma_at(n) - target <= 1e-3 * spec.sigma_at(1):
            continue
        ohna = optimal_hankel(sys, n)
        assert abs(ohna.hankel_error - target) <= 1e-6 * target + 1e-10 * spec.sigma_at(1)


def test_order_range(two_state):
    with pytest.raises(BadOrderError):
        reduce(two_state, 0, 'bt')
    with pytest.raises(BadOrderError):
        reduce(two_state, 3, 'ohna')


def test_repeated_sigma_has_no_truncation(repeated_sigma):
    with pytest.raises(BadOrderError):
        balanced_truncation(repeated_sigma, 1)
    with pytest.raises(BadOrderError):
        optimal_hankel(repeated_sigma, 1)


def test_reduce_dispatch(two_state):
    assert reduce(two_state, 1, 'bt').method == BALANCED_TRUNCATION
    assert reduce(two_state, 1, OPTIMAL_HANKEL).method == OPTIMAL_HANKEL
    with pytest.raises(BadParameterError):
        reduce(two_state, 1, 'modal')


def test_perturbation_search(two_state):
    red = optimal_hankel(two_state, 1)
    report = perturbation_search(two_state, red, trials=30, scale=1e-2, seed=5)
    assert report.passed
    assert report.trials == 30
    assert report.stable_trials > 0
    assert report.min_error >= report.reference_error - 1e-8 * TWO_STATE_SIGMA[0]


def test_perturbation_search_arguments(two_state):
    red = optimal_hankel(two_state, 1)
    with pytest.raises(BadParameterError):
        perturbation_search(two_state, red, trials=0)
