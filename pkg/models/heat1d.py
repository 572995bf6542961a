# models/heat1d.py

# 🌡️ Одномерное уравнение теплопроводности с параметром диффузии 🌡️
#
# Разностная схема на N внутренних узлах, h = 1/(N+1). Заданный тепловой поток подается
# в левую ячейку (не зависит от kappa), выход - средняя температура. Коэффициент диффузии
# kappa входит аффинно только в A:
#     A(kappa) = kappa * L / h^2,  B = e_1 / h,  C = (1/N) * ones.
#
# Версия: 1.0
#
# P(kappa) = P(1)/kappa и Q(kappa) = Q(1)/kappa, поэтому sigma_i(kappa) = sigma_i(1)/kappa:
# при медленной диффузии тот же поток сильнее и дольше прогревает стержень.
#

import numpy as np

from core.errors import BadParameterError
from core.system import LtiSystem, ParameterRange, ParametricLtiSystem
from .base_model import BaseModel


class Heat1dModel(BaseModel):
    name = 'heat1d'
    parametric = True
    defaults = dict(
        diffusivity_min=0.1,
        diffusivity_max=10.0,
    )

    def build(self, order, rng, **params):
        p = self.resolve(**params)
        if not 0.0 < p['diffusivity_min'] <= p['diffusivity_max']:
            raise BadParameterError(f"Диапазон диффузии должен быть положительным: {p}")
        h = 1.0 / (order + 1)
        L = (np.diag(np.full(order, -2.0))
             + np.diag(np.ones(order - 1), 1)
             + np.diag(np.ones(order - 1), -1))
        e1 = np.zeros((order, 1))
        e1[0, 0] = 1.0
        C = np.full((1, order), 1.0 / order)

        base = LtiSystem(np.zeros((order, order)), e1 / h, C, name="heat1d_base")
        term = LtiSystem(L / h ** 2, np.zeros((order, 1)), np.zeros((1, order)), name="heat1d_kappa")
        box = (ParameterRange('kappa', float(p['diffusivity_min']), float(p['diffusivity_max'])),)
        return ParametricLtiSystem(base, (term,), box, name=f"heat1d_N{order}")
