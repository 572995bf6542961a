# checks/hankel_check.py

# 🎼 Проверки спектра Ганкеля и функций Шмидта 🎼
#
# - PQ v_i = sigma_i^2 v_i и v_i^T Q v_j = delta_ij для всех разрешимых sigma_i.
# - Psi_c f_i = sigma_i v_i.
# - Ведущие сингулярные числа квадратурной матрицы совпадают с sigma_i.
# - Квадратурные грамианы и квадратурное <g_1, g_1> совпадают с точными.
# - Отсчеты g_i на сетке совпадают по направлению с левыми сингулярными векторами дискретизации.
#
# Версия: 1.0
#
# Разрешимыми считаются sigma_i, у которых шум округления N eps ||R_P|| ||R_Q|| / sigma_i
# в rounding_margin раз меньше допуска hankel_eig. Угол для g_i проверяется, если зазор
# до соседних sigma в rounding_margin / angle раз больше погрешности квадратуры.
#

import numpy as np

from core.hankel import apply_hankel_to_f, discretize
from core.linalg import svd
from .base_check import BaseCheck


class HankelCheck(BaseCheck):
    name = 'hankel'
    order = 20
    params = dict(
        nodes_per_panel=8,
        panels=12,
        quadrature_gramian=1e-6,
        top=5,
        angle=1e-3,         # угол между g_i и левым сингулярным вектором дискретизации
    )

    def evaluate(self, ctx):
        spec, tol = ctx.spectrum, ctx.tol
        sigma = spec.sigma
        s1 = spec.sigma_at(1)
        resolved = spec.certifiable(tol.hankel_eig, tol.rounding_margin)

        eig_residual = float(spec.eig_residuals[:spec.rank].max()) if spec.rank else 0.0
        orthonormality = spec.q_orthonormality_defect(resolved)
        defects = [apply_hankel_to_f(spec, i, tol).defect for i in range(1, resolved + 1)]
        action_defect = max(defects) if defects else 0.0

        disc = discretize(ctx.item, self.p['nodes_per_panel'], self.p['panels'], tol=tol)
        U, disc_sigma, _ = svd(disc.matrix, tol)
        top = min(spec.order, self.p['top'])
        floor = 1e-6 * s1
        disc_error = float(np.max(np.abs(disc_sigma[:top] - sigma[:top]) / np.maximum(sigma[:top], floor))) if s1 > 0 else 0.0

        G = spec.gramians
        gram_error = max(
            float(np.linalg.norm(disc.controllability_gramian() - G.P, 2) / max(np.linalg.norm(G.P, 2), 1e-300)),
            float(np.linalg.norm(disc.observability_gramian() - G.Q, 2) / max(np.linalg.norm(G.Q, 2), 1e-300)),
        )
        inner_error = abs(disc.output_inner(spec.V[:, 0], spec.V[:, 0]) - 1.0) if spec.rank else 0.0
        angle, angles_checked = self._singular_vector_angles(spec, disc, U, disc_sigma, tol)

        metrics = {
            'resolved': resolved,
            'eig_residual': eig_residual,
            'q_orthonormality': orthonormality,
            'hankel_action_defect': action_defect,
            'discretization_error': disc_error,
            'quadrature_gramian_error': gram_error,
            'quadrature_inner_error': inner_error,
            'singular_vector_angle': angle,
            'angles_checked': angles_checked,
        }
        passed = (eig_residual <= tol.hankel_eig and orthonormality <= tol.hankel_eig
                  and action_defect <= tol.hankel_eig and disc_error <= tol.discretization
                  and gram_error <= self.p['quadrature_gramian']
                  and inner_error <= self.p['quadrature_gramian']
                  and angle <= self.p['angle'])
        return passed, metrics

    def _singular_vector_angles(self, spec, disc, U, disc_sigma, tol):
        """
        Наибольший угол между отсчетами g_i на квадратурной сетке и левыми сингулярными
        векторами матрицы. Индекс i проверяется, если зазор до соседей превосходит
        rounding_margin * eps_q / angle, где eps_q = max_i |sigma_i(M) - sigma_i|.
        """
        count = min(spec.rank, disc_sigma.size)
        if not count:
            return 0.0, 0
        eps_q = float(np.max(np.abs(disc_sigma[:count] - spec.sigma[:count])))
        required_gap = tol.rounding_margin * eps_q / self.p['angle']
        worst, checked = 0.0, 0
        for i in range(1, count + 1):
            gap = spec.sigma_at(i) - spec.sigma_at(i + 1)
            if i > 1:
                gap = min(gap, spec.sigma_at(i - 1) - spec.sigma_at(i))
            if gap <= required_gap:
                continue
            samples = disc.observability_factor @ spec.V[:, i - 1]
            cos = abs(float(U[:, i - 1] @ samples)) / float(np.linalg.norm(samples))
            worst = max(worst, float(np.sqrt(max(1.0 - cos ** 2, 0.0))))
            checked += 1
        return worst, checked
