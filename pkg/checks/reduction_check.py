# checks/reduction_check.py

# ✂️ Проверки понижения порядка ✂️
#
# - Сбалансированная реализация: P = Q = diag(sigma).
# - Ошибка Гловера равна sigma_{n+1}; она не больше ошибки сбалансированного усечения.
# - Ошибка усечения лежит в [sigma_{n+1}, 2 * sum_{i>n} sigma_i].
# - Случайные возмущения оптимальной модели не уменьшают ошибку.
#
# Версия: 1.0
#

import numpy as np

from core.gramian import gramians
from core.reduction import balance, balanced_truncation, optimal_hankel, perturbation_search
from .base_check import BaseCheck


class ReductionCheck(BaseCheck):
    name = 'reduction'
    order = 40
    params = dict(
        separation=1e-3,    # относительный зазор sigma_n - sigma_{n+1}, при котором порядок n проверяется
        trials=200,
        scale=1e-2,
    )

    def evaluate(self, ctx):
        sys, spec, tol = ctx.item, ctx.spectrum, ctx.tol
        sigma = spec.sigma
        s1 = float(sigma[0])
        slack = tol.lower_bound * s1

        bal = balance(sys, tol)
        Gb = gramians(bal.system, tol)
        target = np.diag(bal.sigma)
        balance_error = max(float(np.abs(Gb.P - target).max()), float(np.abs(Gb.Q - target).max())) / s1

        orders = [n for n in ctx.orders() if sigma[n - 1] - sigma[n] > self.p['separation'] * s1]
        optimal_defect = 0.0
        ohna_vs_bt = True
        sandwich = True
        perturbed = None
        for n in orders:
            s = float(sigma[n])
            ohna = optimal_hankel(sys, n, tol)
            bt = balanced_truncation(sys, n, tol)
            optimal_defect = max(optimal_defect, abs(ohna.hankel_error - s) / (tol.optimal_error * s + slack))
            ohna_vs_bt &= ohna.hankel_error <= bt.hankel_error + slack
            sandwich &= s - slack <= bt.hankel_error <= 2.0 * float(sigma[n:].sum()) + slack
            if perturbed is None:
                perturbed = perturbation_search(sys, ohna, self.p['trials'], self.p['scale'], ctx.seed, tol)

        metrics = {
            'balanced_gramian_error': balance_error,
            'orders': orders,
            'optimal_error_ratio': optimal_defect,
            'optimal_not_worse_than_truncation': bool(ohna_vs_bt),
            'truncation_bounds': bool(sandwich),
            'perturbation_min_error': None if perturbed is None else perturbed.min_error,
            'perturbation_stable_trials': None if perturbed is None else perturbed.stable_trials,
        }
        passed = (balance_error <= tol.hankel_eig and optimal_defect <= 1.0 and ohna_vs_bt and sandwich
                  and (perturbed is None or perturbed.passed))
        return passed, metrics
