# tests/conftest.py

# 🧪 Общие фикстуры тестов 🧪
#
# Системы с известными ответами и небольшой детерминированный корпус random_stable.
#
# Версия: 1.0
#

import os

import numpy as np
import pytest

from core.system import LtiSystem, ParameterRange, ParametricLtiSystem
from models import generate

# Грамиан двухмерного примера: P = Q = [[1/2, 1/3], [1/3, 1/4]]
TWO_STATE_GRAMIAN = np.array([[1.0 / 2.0, 1.0 / 3.0], [1.0 / 3.0, 1.0 / 4.0]])
TWO_STATE_SIGMA = np.linalg.eigvalsh(TWO_STATE_GRAMIAN)[::-1]

SYSTEMS_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'data', 'systems')


@pytest.fixture
def one_state():
    return LtiSystem([[-1.0]], [[1.0]], [[1.0]], [[0.0]], name="one_state")


@pytest.fixture
def two_state():
    return LtiSystem(np.diag([-1.0, -2.0]), [[1.0], [1.0]], [[1.0, 1.0]], name="two_state")


@pytest.fixture
def scalar_family():
    base = LtiSystem([[0.0]], [[1.0]], [[1.0]], name="scalar_base")
    term = LtiSystem([[-1.0]], [[0.0]], [[0.0]], name="scalar_p")
    return ParametricLtiSystem(base, (term,), (ParameterRange('p', 1.0, 2.0),), name="scalar_family")


@pytest.fixture
def repeated_sigma():
    """sigma_1 = sigma_2 = 0.5."""
    return LtiSystem(-np.eye(2), np.eye(2), np.eye(2), name="repeated")


@pytest.fixture
def zero_input():
    return LtiSystem(np.diag([-1.0, -3.0]), np.zeros((2, 1)), [[1.0, 1.0]], name="zero_input")


@pytest.fixture(scope='session')
def small_corpus():
    return [
        generate('random_stable', N, seed=seed, inputs=m, outputs=p)
        for seed, (N, m, p) in enumerate([(2, 1, 1), (5, 1, 1), (5, 2, 2), (6, 2, 1), (8, 1, 3)])
    ]
