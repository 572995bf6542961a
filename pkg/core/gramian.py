# core/gramian.py

# ⚖️ Грамианы и уравнения Ляпунова ⚖️
#
# Решение уравнений Ляпунова A P + P A^T + B B^T = 0 и A^T Q + Q A + C^T C = 0
# по схеме Бартелса-Стюарта: обе матрицы приводятся к вещественной форме Шура,
# после чего LAPACK (trsyl) выполняет обратную подстановку по парам блоков 1x1/2x2.
# Та же процедура решает уравнение Сильвестра для перекрестных грамианов двух разных систем.
#
# Функционал:
# - sylvester(): A1 X + X A2 + W = 0 с проверкой разделенности спектров.
# - lyapunov(): A X + X A^T + W = 0 для устойчивой A, с сертификатом невязки и PSD-коррекцией.
# - lyapunov_factor(): треугольный множитель R, X = R^T R, методом Хаммарлинга без вычисления X.
# - gramians(): пара (P, Q) системы с относительными невязками и множители R_P, R_Q.
#
# Версия: 1.0
#

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
from scipy.linalg import get_lapack_funcs

from core.errors import (
    DimensionMismatchError,
    NonConvergenceError,
    NotPositiveSemidefiniteError,
    SingularMatrixError,
    SylvesterSingularError,
    UnstableSystemError,
)
from core.linalg import (
    as_matrix,
    block_eigenvalues,
    real_schur,
    spectral_abscissa_of,
    symmetric_eig,
    symmetrize,
)
from core.system import require_stable
from core.tolerances import DEFAULT_TOLERANCES

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class GramianPair:
    P: np.ndarray       # грамиан управляемости
    Q: np.ndarray       # грамиан наблюдаемости
    residP: float
    residQ: float
    RP: np.ndarray = None   # P = RP^T RP
    RQ: np.ndarray = None   # Q = RQ^T RQ


def _fro(m):
    return float(np.linalg.norm(m, 'fro'))


def _separation(T1, T2):
    """min |lambda_i(T1) + mu_j(T2)| по собственным значениям из блоков Шура."""
    re1, im1 = block_eigenvalues(T1)
    re2, im2 = block_eigenvalues(T2)
    lam = (re1 + 1j * im1)[:, None]
    mu = (re2 + 1j * im2)[None, :]
    return float(np.abs(lam + mu).min())


def sylvester(A1, A2, W, tol=DEFAULT_TOLERANCES):
    """Решает A1 X + X A2 + W = 0 (спектры A1 и -A2 не должны пересекаться)."""
    A1 = as_matrix(A1, "A1")
    A2 = as_matrix(A2, "A2")
    W = as_matrix(W, "W")
    if A1.shape[0] != A1.shape[1] or A2.shape[0] != A2.shape[1]:
        raise DimensionMismatchError(f"A1 {A1.shape} и A2 {A2.shape} должны быть квадратными")
    if W.shape != (A1.shape[0], A2.shape[0]):
        raise DimensionMismatchError(f"W имеет форму {W.shape}, ожидалось {(A1.shape[0], A2.shape[0])}")

    Q1, T1 = real_schur(A1, tol)
    Q2, T2 = real_schur(A2, tol)
    scale_norm = _fro(A1) + _fro(A2)
    sep = _separation(T1, T2)
    if sep * tol.max_condition <= scale_norm:
        raise SylvesterSingularError(
            f"Спектры A1 и -A2 пересекаются: min|lambda + mu| = {sep:.3e} при ||A1||+||A2|| = {scale_norm:.3e}")

    F = -(Q1.T @ W @ Q2)
    trsyl, = get_lapack_funcs(('trsyl',), (T1, T2, F))
    Y, scale, info = trsyl(T1, T2, F)
    if info < 0:
        raise NonConvergenceError(f"trsyl: некорректный аргумент {-info}")
    if info > 0:
        # LAPACK был вынужден возмущать близкие собственные значения
        raise SylvesterSingularError(f"trsyl сообщил о близких собственных значениях (info={info})")
    return Q1 @ (Y / scale) @ Q2.T


def lyapunov(A, W, tol=DEFAULT_TOLERANCES):
    """Решает A X + X A^T + W = 0 для устойчивой A и симметричной W >= 0."""
    A = as_matrix(A, "A")
    W = as_matrix(W, "W")
    if W.shape != A.shape:
        raise DimensionMismatchError(f"W имеет форму {W.shape}, ожидалось {A.shape}")

    alpha = spectral_abscissa_of(A, tol)
    if alpha >= -tol.stability_margin:
        raise UnstableSystemError(alpha, tol.stability_margin)

    try:
        X = symmetrize(sylvester(A, A.T, symmetrize(W), tol))
    except SylvesterSingularError as e:
        raise SingularMatrixError(f"Уравнение Ляпунова плохо обусловлено: {e}") from e

    residual = _relative_residual(A, X, W)
    if residual > tol.lyapunov:
        raise SingularMatrixError(f"Невязка уравнения Ляпунова {residual:.3e} больше допуска {tol.lyapunov:.1e}")

    # PSD-коррекция: мелкие отрицательные собственные числа обнуляются
    w, V = symmetric_eig(X, tol)
    scale = max(abs(w[0]), abs(w[-1]))
    if w[-1] < -tol.psd_clip * scale:
        raise NotPositiveSemidefiniteError(
            f"Решение уравнения Ляпунова не PSD: lambda_min = {w[-1]:.3e}, ||X|| = {scale:.3e}")
    if w[-1] < 0.0:
        X = symmetrize((V * np.clip(w, 0.0, None)) @ V.T)
    return X


def _relative_residual(A, X, W):
    denom = 2.0 * _fro(A) * _fro(X) + _fro(W)
    return _fro(A @ X + X @ A.T + W) / denom if denom > 0.0 else 0.0


def _triangular_rows(M):
    """Верхнетреугольный множитель R из QR-разложения M (строк не больше, чем столбцов)."""
    R = sla.qr(M, mode='r')[0]
    return R[:min(M.shape)]


def lyapunov_factor(A, C, tol=DEFAULT_TOLERANCES):
    """
    Множитель R решения A^T X + X A + C^T C = 0 в виде X = R^T R (устойчивая A).
    Метод Хаммарлинга на комплексной форме Шура: R строится построчно, сам X не вычисляется,
    поэтому малые сингулярные числа R не теряют точность на квадратном корне.
    """
    A = as_matrix(A, "A")
    C = as_matrix(C, "C")
    n = A.shape[0]
    if A.shape[1] != n or C.shape[1] != n:
        raise DimensionMismatchError(f"A {A.shape} и C {C.shape} не согласованы")
    alpha = spectral_abscissa_of(A, tol)
    if alpha >= -tol.stability_margin:
        raise UnstableSystemError(alpha, tol.stability_margin)
    if n == 0:
        return np.zeros((0, 0))

    Qs, T = real_schur(A, tol)
    S, Z = sla.rsf2csf(T, Qs)
    R = _triangular_rows(C.astype(complex) @ Z)
    U = np.zeros((n, n), dtype=complex)
    for j in range(n):
        R = _triangular_rows(R)
        rho, r, R1 = R[0, 0], R[0, 1:], R[1:, 1:]
        lam, s, S1 = S[j, j], S[j, j + 1:], S[j + 1:, j + 1:]
        if rho == 0.0:
            mu, u, y = 0.0, np.zeros_like(r), r
        else:
            mu = abs(rho) / np.sqrt(-2.0 * lam.real)
            a = rho / mu
            rhs = -(mu * s + np.conj(a) * r)
            u = sla.solve_triangular(S1 + np.conj(lam) * np.eye(n - j - 1), rhs, trans='T') if r.size else r
            y = r - a * u
        U[j, j] = mu
        U[j, j + 1:] = u
        R = np.vstack([R1, y[None, :]])

    F = U @ Z.conj().T
    R = _triangular_rows(np.vstack([F.real, F.imag]))
    X = R.T @ R
    CC = C.T @ C
    residual = _relative_residual(A.T, X, CC)
    if residual > tol.lyapunov:
        raise SingularMatrixError(
            f"Невязка множителя уравнения Ляпунова {residual:.3e} больше допуска {tol.lyapunov:.1e}")
    return R


def gramians(sys, tol=DEFAULT_TOLERANCES):
    """Грамианы управляемости и наблюдаемости устойчивой системы."""
    require_stable(sys, tol)
    BB = sys.B @ sys.B.T
    CC = sys.C.T @ sys.C
    P = lyapunov(sys.A, BB, tol)
    Q = lyapunov(sys.A.T, CC, tol)
    RP = lyapunov_factor(sys.A.T, sys.B.T, tol)
    RQ = lyapunov_factor(sys.A, sys.C, tol)
    pair = GramianPair(P, Q, _relative_residual(sys.A, P, BB), _relative_residual(sys.A.T, Q, CC), RP, RQ)
    logger.debug(f"Грамианы {sys.name}: невязки P={pair.residP:.2e}, Q={pair.residQ:.2e}")
    return pair
