# tests/test_models.py

import numpy as np
import pytest
from numpy.testing import assert_allclose

import models
from core.errors import BadParameterError
from core.hankel import hankel_spectrum
from core.system import ParametricLtiSystem, instantiate
from tests.conftest import TWO_STATE_SIGMA


def test_registry_discovers_generators():
    assert {'random_stable', 'rc_ladder', 'heat1d', 'diag'} <= set(models.available_models)


@pytest.mark.parametrize('seed', [0, 1, 42])
@pytest.mark.parametrize('order', [2, 5, 10, 20])
def test_random_stable_is_stable(order, seed):
    sys = models.generate('random_stable', order, seed=seed)
    assert sys.n_states == order
    assert sys.spectral_abscissa() <= -0.5 + 1e-9


def test_random_stable_is_reproducible():
    a = models.generate('random_stable', 5, seed=7, inputs=2, outputs=3)
    b = models.generate('random_stable', 5, seed=7, inputs=2, outputs=3)
    assert a.allclose(b)
    assert (a.n_inputs, a.n_outputs) == (2, 3)
    assert not a.allclose(models.generate('random_stable', 5, seed=8, inputs=2, outputs=3))


def test_rc_ladder():
    sys = models.generate('rc_ladder', 4, resistance=2.0, capacitance=0.5)
    assert sys.is_stable()
    assert_allclose(sys.B[:, 0], [1.0, 0.0, 0.0, 0.0])
    assert_allclose(sys.C, sys.B.T)
    assert sys.A[-1, -1] == -1.0


def test_diag_reproduces_two_state():
    sys = models.generate('diag', 2)
    assert_allclose(hankel_spectrum(sys).sigma, TWO_STATE_SIGMA, atol=1e-10)


def test_heat1d_family():
    psys = models.generate('heat1d', 5)
    assert isinstance(psys, ParametricLtiSystem)
    assert psys.parameter_names == ['kappa']
    slow = hankel_spectrum(instantiate(psys, [0.1])).sigma
    fast = hankel_spectrum(instantiate(psys, [10.0])).sigma
    # P и Q убывают как 1/kappa, sigma_i тоже
    assert_allclose(slow[:2], 100.0 * fast[:2], rtol=1e-8)
    assert_allclose(psys.base.B[:, 0], np.eye(5)[0] * 6.0)
    assert np.all(psys.terms[0].B == 0.0)


def test_bad_requests():
    with pytest.raises(BadParameterError):
        models.generate('unknown', 3)
    with pytest.raises(BadParameterError):
        models.generate('random_stable', 0)
    with pytest.raises(BadParameterError):
        models.generate('rc_ladder', 3, inductance=1.0)
    with pytest.raises(BadParameterError):
        models.generate('diag', 3, eigenvalues=[-1.0, -2.0])
