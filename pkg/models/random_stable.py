# models/random_stable.py

# 🎲 Случайная устойчивая система 🎲
#
# A = R - (rho(R) + margin) I, где R - гауссова матрица и rho - спектральный радиус.
# Сдвиг гарантирует, что спектральная абсцисса A не больше -margin.
#
# Версия: 1.0
#

import numpy as np

from core.errors import BadParameterError
from core.linalg import spectral_radius
from core.system import LtiSystem
from .base_model import BaseModel


class RandomStableModel(BaseModel):
    name = 'random_stable'
    defaults = dict(
        margin=0.5,     # запас устойчивости
        inputs=1,
        outputs=1,
    )

    def build(self, order, rng, **params):
        p = self.resolve(**params)
        if p['margin'] <= 0.0 or p['inputs'] < 1 or p['outputs'] < 1:
            raise BadParameterError(f"Некорректные параметры random_stable: {p}")
        R = rng.standard_normal((order, order))
        A = R - (spectral_radius(R) + p['margin']) * np.eye(order)
        B = rng.standard_normal((order, int(p['inputs'])))
        C = rng.standard_normal((int(p['outputs']), order))
        return LtiSystem(A, B, C, name=f"random_stable_N{order}")
