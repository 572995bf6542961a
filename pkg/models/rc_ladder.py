# models/rc_ladder.py

# 🔌 RC-линия 🔌
#
# Цепочка из N RC-звеньев: ток подается в первый узел, измеряется напряжение первого узла.
# A = tridiag(1, -2, 1) / (R C), последний диагональный элемент -1 (открытый конец).
# Реализация симметрична (A = A^T, B = C^T), поэтому P = Q.
#
# Версия: 1.0
#

import numpy as np

from core.errors import BadParameterError
from core.system import LtiSystem
from .base_model import BaseModel


class RcLadderModel(BaseModel):
    name = 'rc_ladder'
    defaults = dict(
        resistance=1.0,
        capacitance=1.0,
    )

    def build(self, order, rng, **params):
        p = self.resolve(**params)
        if p['resistance'] <= 0.0 or p['capacitance'] <= 0.0:
            raise BadParameterError(f"R и C должны быть положительными: {p}")
        A = (np.diag(np.full(order, -2.0))
             + np.diag(np.ones(order - 1), 1)
             + np.diag(np.ones(order - 1), -1))
        A[-1, -1] = -1.0
        A /= p['resistance'] * p['capacitance']
        B = np.zeros((order, 1))
        B[0, 0] = 1.0
        return LtiSystem(A, B, B.T, name=f"rc_ladder_N{order}")
