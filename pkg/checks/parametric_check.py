# checks/parametric_check.py

# 🗺️ Проверки параметрических семейств 🗺️
#
# - Развертка по сетке, нижняя граница max_p sigma_{n+1}(p) и ее монотонность при измельчении сетки.
# - Непрерывность кривых sigma_i(p).
# - Ошибка трех глобальных базисов (pod, greedy, random) не меньше нижней границы.
#
# Версия: 1.0
#

from core.errors import CertificateError
from core.parametric import CONSTRUCTIONS, continuity_check, global_basis_gap, sweep
from .base_check import BaseCheck


class ParametricCheck(BaseCheck):
    name = 'parametric'
    kind = 'parametric'
    order = 50
    params = dict(
        points=21,
        coarse=6,
        order_n=3,
        draws=5,
    )

    def evaluate(self, ctx):
        psys, tol = ctx.item, ctx.tol
        fine = sweep(psys, counts=self.p['points'], tol=tol)
        coarse = sweep(psys, counts=self.p['coarse'], tol=tol)
        N = fine.order
        n = min(self.p['order_n'], N - 1) if N > 1 else 0

        slack = tol.lower_bound * fine.lower_bound(0)
        nested = (self.p['points'] - 1) % (self.p['coarse'] - 1) == 0
        refinement = not nested or all(
            coarse.lower_bound(k) <= fine.lower_bound(k) + slack for k in range(N + 1))
        continuity = [continuity_check(fine, i, tol) for i in range(1, N + 1)]
        flags = sum(len(c.flagged) for c in continuity)

        gaps = {}
        certified = True
        for construction in CONSTRUCTIONS:
            try:
                report = global_basis_gap(psys, n, counts=self.p['points'], draws=self.p['draws'],
                                          seed=ctx.seed, construction=construction, tol=tol,
                                          res=fine)
                gaps[construction] = report.gap
            except CertificateError:
                certified = False
                gaps[construction] = None

        metrics = {
            'lower_bound': fine.lower_bound(n),
            'order': n,
            'refinement_monotone': refinement,
            'continuity_flags': flags,
            'global_basis_gaps': gaps,
        }
        return refinement and certified, metrics
