# models/diagonal.py

# 🔢 Диагональная система для аналитических проверок 🔢
#
# A = diag(lambda), B и C задаются списками. По умолчанию lambda = (-1, ..., -N), b = c = 1.
# Пример: diag(lambda=[-1], b=[1], c=[1]) дает sigma_1 = bc/(2|a|) = 0.5.
#
# Версия: 1.0
#

import numpy as np

from core.errors import BadParameterError
from core.system import LtiSystem
from .base_model import BaseModel


class DiagonalModel(BaseModel):
    name = 'diag'
    defaults = dict(
        eigenvalues=None,
        b=None,
        c=None,
    )

    def build(self, order, rng, **params):
        p = self.resolve(**params)
        lam = np.asarray(p['eigenvalues'] if p['eigenvalues'] is not None else -np.arange(1.0, order + 1.0),
                         dtype=float)
        b = np.asarray(p['b'] if p['b'] is not None else np.ones(order), dtype=float)
        c = np.asarray(p['c'] if p['c'] is not None else np.ones(order), dtype=float)
        if not lam.size == b.size == c.size == order:
            raise BadParameterError(f"Длины eigenvalues, b, c ({lam.size}, {b.size}, {c.size}) "
                                    f"должны совпадать с порядком {order}")
        return LtiSystem(np.diag(lam), b.reshape(-1, 1), c.reshape(1, -1), name=f"diag_N{order}")
