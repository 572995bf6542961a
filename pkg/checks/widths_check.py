# checks/widths_check.py

# 📐 Проверки поперечников и активных подпространств 📐
#
# - Жадный базис дает ошибку sigma_{n+1} для всех 0 <= n <= N.
# - Случайные n-мерные подпространства не опускаются ниже sigma_{n+1} (n из 1, N//2, N-1).
# - Активное подпространство дает ту же ошибку, что и n-поперечник.
# - Ошибки не возрастают по n; сертификат жадной последовательности выполнен.
# - Двойственность вход/выход для n из {1, N//2, N-1}, если sigma_n хорошо отделено от sigma_{n+1}.
#
# Версия: 1.0
#

from core.widths import active_subspace, duality_check, greedy_sequence, nwidth
from .base_check import BaseCheck


class WidthsCheck(BaseCheck):
    name = 'widths'
    order = 30
    params = dict(
        separation=1e-3,    # относительный зазор sigma_n - sigma_{n+1} для проверки двойственности
    )

    def evaluate(self, ctx):
        spec, tol = ctx.spectrum, ctx.tol
        s1 = spec.sigma_at(1)
        N = spec.order

        errors = [nwidth(spec, n, draws=0, tol=tol).error for n in range(N + 1)]
        attainment = max(abs(e - spec.sigma_at(n + 1)) for n, e in enumerate(errors)) / max(s1, 1e-300)
        monotone = all(a >= b for a, b in zip(errors, errors[1:]))

        lower_gap = 0.0
        symmetry = 0.0
        for n in ctx.orders():
            report = nwidth(spec, n, draws=ctx.draws, seed=ctx.seed + n, tol=tol)
            active = active_subspace(spec, n, draws=ctx.draws, seed=ctx.seed + n, tol=tol)
            for r in (report, active):
                if r.empirical_infimum is not None:
                    lower_gap = min(lower_gap, (r.empirical_infimum - r.reference) / max(s1, 1e-300))
            symmetry = max(symmetry, abs(active.error - report.error) / max(s1, 1e-300))

        certificate = greedy_sequence(spec, N, draws=min(ctx.draws, 200), seed=ctx.seed, tol=tol).certificate

        duality_angle = None
        duality_orders = []
        duality_ok = True
        if s1 > 0:
            for n in sorted({1} | set(ctx.orders())):
                if n >= N or spec.sigma_at(n) - spec.sigma_at(n + 1) <= self.p['separation'] * s1:
                    continue
                dual = duality_check(ctx.item, n, tol)
                duality_angle = max(duality_angle or 0.0, dual.max_angle)
                duality_orders.append(n)
                duality_ok = duality_ok and dual.passed

        metrics = {
            'attainment': attainment,
            'monotone': monotone,
            'lower_bound_margin': lower_gap,
            'input_output_symmetry': symmetry,
            'greedy_certificate': certificate.passed,
            'duality_angle': duality_angle,
            'duality_orders': duality_orders,
        }
        passed = (attainment <= tol.attainment and monotone and lower_gap >= -tol.lower_bound
                  and symmetry <= tol.attainment and certificate.passed and duality_ok)
        return passed, metrics
