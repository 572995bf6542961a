# core/linalg.py

# 🧮 Плотная линейная алгебра 🧮
#
# Вычислительное ядро, на котором стоят все остальные модули: форма Шура, SVD,
# симметричная задача на собственные значения, матричная экспонента и решение систем.
# Сами разложения выполняет LAPACK через scipy.linalg, а этот модуль добавляет контракт:
# проверку входа (конечные вещественные числа), контроль невязок и перевод ошибок LAPACK
# в исключения пакета.
#
# Функционал:
# - as_matrix(): приведение входа к плотной вещественной матрице с проверкой.
# - real_schur(), svd(), symmetric_eig(), expm(), solve() с проверкой невязок.
# - Собственные значения из блоков 1x1/2x2 формы Шура (только вещественные части и модули).
# - orthonormalize(): ортонормированный базис столбцов (QR).
#
# Версия: 1.0
#

import logging

import numpy as np
import scipy.linalg as sla

from core.errors import (
    DimensionMismatchError,
    BadParameterError,
    MatrixOverflowError,
    NonConvergenceError,
    NotSymmetricError,
    SingularMatrixError,
)
from core.tolerances import DEFAULT_TOLERANCES

logger = logging.getLogger(__name__)


def as_matrix(value, name="M"):
    """Плотная вещественная матрица float64 из вложенных списков/массивов."""
    m = np.array(value, dtype=float)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    elif m.ndim == 1:
        m = m.reshape(1, -1)
    elif m.ndim != 2:
        raise DimensionMismatchError(f"{name}: ожидается матрица, получен массив размерности {m.ndim}")
    if m.shape[0] < 1 or m.shape[1] < 1:
        raise DimensionMismatchError(f"{name}: пустая матрица {m.shape}")
    if not np.all(np.isfinite(m)):
        raise BadParameterError(f"{name}: матрица содержит NaN или Inf")
    return m


def _require_square(m, name):
    if m.shape[0] != m.shape[1]:
        raise DimensionMismatchError(f"{name} должна быть квадратной, получено {m.shape}")


def _fro(m):
    return float(np.linalg.norm(m, 'fro'))


def real_schur(M, tol=DEFAULT_TOLERANCES):
    """Вещественная форма Шура M = Q T Q^T с блоками 1x1 и 2x2 на диагонали."""
    m = as_matrix(M)
    _require_square(m, "M")
    n = m.shape[0]
    try:
        T, Q = sla.schur(m, output='real')
    except sla.LinAlgError as e:
        raise NonConvergenceError(
            f"QR-итерация не сошлась за {tol.schur_sweeps * n} проходов: {e}") from e

    scale = max(_fro(m), 1.0) * n
    residual = _fro(m - Q @ T @ Q.T)
    orthogonality = _fro(Q.T @ Q - np.eye(n))
    if residual > tol.factorization * scale or orthogonality > tol.factorization * n:
        raise NonConvergenceError(
            f"Форма Шура неточна: невязка {residual:.3e}, ортогональность {orthogonality:.3e}")
    return Q, T


def block_eigenvalues(T):
    """
    Собственные значения квазитреугольной матрицы T по ее диагональным блокам.
    Возвращает пару массивов (вещественные части, мнимые части).
    """
    n = T.shape[0]
    re = np.empty(n)
    im = np.zeros(n)
    i = 0
    while i < n:
        if i + 1 < n and T[i + 1, i] != 0.0:
            a, b, c, d = T[i, i], T[i, i + 1], T[i + 1, i], T[i + 1, i + 1]
            half_trace = 0.5 * (a + d)
            disc = 0.25 * (a - d) ** 2 + b * c
            if disc >= 0.0:
                root = np.sqrt(disc)
                re[i], re[i + 1] = half_trace + root, half_trace - root
            else:
                root = np.sqrt(-disc)
                re[i] = re[i + 1] = half_trace
                im[i], im[i + 1] = root, -root
            i += 2
        else:
            re[i] = T[i, i]
            i += 1
    return re, im


def spectral_abscissa_of(M, tol=DEFAULT_TOLERANCES):
    """Максимальная вещественная часть собственных значений M."""
    _, T = real_schur(M, tol)
    re, _ = block_eigenvalues(T)
    return float(re.max())


def spectral_radius(M, tol=DEFAULT_TOLERANCES):
    _, T = real_schur(M, tol)
    re, im = block_eigenvalues(T)
    return float(np.hypot(re, im).max())


def svd(M, tol=DEFAULT_TOLERANCES):
    """Тонкое SVD: M = U diag(s) V^T, s по невозрастанию."""
    m = as_matrix(M)
    try:
        U, s, Vt = sla.svd(m, full_matrices=False, lapack_driver='gesdd')
    except sla.LinAlgError:
        # gesdd иногда не сходится там, где gesvd справляется
        logger.debug("gesdd не сошелся, повтор через gesvd")
        try:
            U, s, Vt = sla.svd(m, full_matrices=False, lapack_driver='gesvd')
        except sla.LinAlgError as e:
            raise NonConvergenceError(f"SVD не сошлось: {e}") from e

    norm = _fro(m)
    if norm > 0.0:
        residual = _fro(m - (U * s) @ Vt) / norm
        if residual > tol.factorization * max(m.shape):
            raise NonConvergenceError(f"SVD неточно: относительная невязка {residual:.3e}")
    return U, s, Vt.T


def singular_values(M):
    return sla.svdvals(as_matrix(M))


def symmetrize(M):
    return 0.5 * (M + M.T)


def symmetric_eig(M, tol=DEFAULT_TOLERANCES):
    """Собственные значения (по невозрастанию) и ортонормированные собственные векторы."""
    m = as_matrix(M)
    _require_square(m, "M")
    norm = _fro(m)
    asym = _fro(m - m.T)
    if asym > tol.symmetry * max(norm, np.finfo(float).tiny):
        raise NotSymmetricError(f"Матрица несимметрична: ||M - M^T|| = {asym:.3e}, ||M|| = {norm:.3e}")
    m = symmetrize(m)
    try:
        w, V = sla.eigh(m)
    except sla.LinAlgError as e:
        raise NonConvergenceError(f"eigh не сошлось: {e}") from e
    w, V = w[::-1], V[:, ::-1]
    if norm > 0.0:
        residual = _fro(m @ V - V * w) / norm
        if residual > tol.factorization * m.shape[0]:
            raise NonConvergenceError(f"eigh неточно: относительная невязка {residual:.3e}")
    return w, V


def expm(M, t=1.0):
    """exp(t M) методом масштабирования и возведения в квадрат с аппроксимацией Паде."""
    m = as_matrix(M)
    _require_square(m, "M")
    result = sla.expm(t * m)
    if not np.all(np.isfinite(result)):
        raise MatrixOverflowError(f"exp(tM) переполнилось при t={t}, ||M||={_fro(m):.3e}")
    return result


def solve(M, rhs, tol=DEFAULT_TOLERANCES):
    """Решение M X = rhs с оценкой обусловленности."""
    m = as_matrix(M)
    _require_square(m, "M")
    b = np.array(rhs, dtype=float)
    if b.shape[0] != m.shape[0]:
        raise DimensionMismatchError(f"Правая часть {b.shape} не согласована с матрицей {m.shape}")
    cond = np.linalg.cond(m)
    if not np.isfinite(cond) or cond > tol.max_condition:
        raise SingularMatrixError(f"Матрица вырождена: число обусловленности {cond:.3e}")
    try:
        x = sla.solve(m, b)
    except sla.LinAlgError as e:
        raise SingularMatrixError(f"Матрица вырождена: {e}") from e
    residual = np.linalg.norm(m @ x - b)
    if residual > tol.solve * max(np.linalg.norm(m, 2) * np.linalg.norm(x), np.linalg.norm(b)):
        raise SingularMatrixError(f"Решение неточно: невязка {residual:.3e}")
    return x


def orthonormalize(M, tol=DEFAULT_TOLERANCES):
    """Ортонормированный базис столбцов M; столбцы должны быть линейно независимы."""
    m = as_matrix(M)
    Q, R = sla.qr(m, mode='economic')
    diag = np.abs(np.diag(R))
    if diag.size and diag.min() <= tol.factorization * max(diag.max(), 1.0) * max(m.shape):
        raise DimensionMismatchError(f"Столбцы линейно зависимы: ранг меньше {m.shape[1]}")
    return Q
