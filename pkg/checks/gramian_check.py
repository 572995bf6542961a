# checks/gramian_check.py

# ⚖️ Проверки грамианов ⚖️
#
# - Невязка Ляпунова: ||A P + P A^T + B B^T||_F <= lyapunov * (2||A||_F ||P||_F + ||B||_F^2), то же для Q.
# - Та же невязка для R_P^T R_P и R_Q^T R_Q из множителей Хаммарлинга.
# - P и Q симметричны и неотрицательно определены.
# - Сопряженная система имеет те же sigma_i.
#
# Версия: 1.0
#

import numpy as np

from core.hankel import hankel_spectrum
from core.system import adjoint
from .base_check import BaseCheck


def _fro(m):
    return float(np.linalg.norm(m, 'fro'))


class GramianCheck(BaseCheck):
    name = 'gramian'
    order = 10

    def evaluate(self, ctx):
        sys, tol = ctx.item, ctx.tol
        G = ctx.spectrum.gramians
        A, B, C = sys.A, sys.B, sys.C
        resid_p = _fro(A @ G.P + G.P @ A.T + B @ B.T) / max(2 * _fro(A) * _fro(G.P) + _fro(B) ** 2, 1e-300)
        resid_q = _fro(A.T @ G.Q + G.Q @ A + C.T @ C) / max(2 * _fro(A) * _fro(G.Q) + _fro(C) ** 2, 1e-300)
        FP, FQ = G.RP.T @ G.RP, G.RQ.T @ G.RQ
        factor_p = _fro(A @ FP + FP @ A.T + B @ B.T) / max(2 * _fro(A) * _fro(FP) + _fro(B) ** 2, 1e-300)
        factor_q = _fro(A.T @ FQ + FQ @ A + C.T @ C) / max(2 * _fro(A) * _fro(FQ) + _fro(C) ** 2, 1e-300)
        min_eig = min(float(np.linalg.eigvalsh(G.P).min()), float(np.linalg.eigvalsh(G.Q).min()))
        scale = max(_fro(G.P), _fro(G.Q), 1e-300)
        asym = max(_fro(G.P - G.P.T), _fro(G.Q - G.Q.T)) / scale

        sigma = ctx.spectrum.sigma
        dual = hankel_spectrum(adjoint(sys), tol).sigma
        adjoint_defect = float(np.abs(sigma - dual).max()) / max(sigma[0], 1e-300)

        metrics = {
            'lyapunov_residual_P': resid_p,
            'lyapunov_residual_Q': resid_q,
            'factor_residual_P': factor_p,
            'factor_residual_Q': factor_q,
            'min_eigenvalue_relative': min_eig / scale,
            'asymmetry': asym,
            'adjoint_sigma_defect': adjoint_defect,
        }
        passed = (resid_p <= tol.lyapunov and resid_q <= tol.lyapunov
                  and factor_p <= tol.lyapunov and factor_q <= tol.lyapunov
                  and min_eig >= -tol.psd_clip * scale and asym == 0.0
                  and adjoint_defect <= tol.attainment)
        return passed, metrics
