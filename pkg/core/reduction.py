# core/reduction.py

# ✂️ Понижение порядка: сбалансированное усечение и оптимальная аппроксимация по норме Ганкеля ✂️
#
# Модуль строит модели порядка n двумя способами. Сбалансированное усечение служит базовым
# вариантом для сравнения. Конструкция Гловера дает устойчивую модель, ошибка которой по норме
# Ганкеля в точности равна sigma_{n+1}, то есть достигает n-поперечника.
#
# Функционал:
# - balance(): сбалансированная реализация методом квадратных корней (P = Q = diag(sigma)).
# - balanced_truncation(): ведущие n x n блоки сбалансированной реализации.
# - optimal_hankel(): конструкция Гловера с выделением устойчивой части через упорядоченную форму Шура.
# - hankel_error(): норма Ганкеля системы ошибки.
# - perturbation_search(): случайные возмущения оптимальной модели не уменьшают ошибку.
#
# Версия: 1.0
#

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from core.errors import (
    BadOrderError,
    BadParameterError,
    DegenerateGammaError,
    NonConvergenceError,
    SylvesterSingularError,
)
from core.gramian import gramians, sylvester
from core.hankel import cluster_bounds, hankel_norm
from core.linalg import svd
from core.system import LtiSystem, error_system, require_stable
from core.tolerances import DEFAULT_TOLERANCES
from utils.run_config import parallel_map, spawn_generators

logger = logging.getLogger(__name__)

BALANCED_TRUNCATION = 'balanced_truncation'
OPTIMAL_HANKEL = 'optimal_hankel'


@dataclass(frozen=True, eq=False)
class BalancedRealization:
    system: LtiSystem
    T: np.ndarray           # N x r, x = T z
    Tinv: np.ndarray        # r x N, Tinv T = I
    sigma: np.ndarray       # балансированный грамиан diag(sigma)
    truncated: int          # число отброшенных неминимальных состояний
    inverse_defect: float   # max |Tinv T - I|

    @property
    def order(self):
        return self.sigma.size


@dataclass(frozen=True, eq=False)
class ReducedModel:
    system: LtiSystem
    method: str
    hankel_error: float = None
    requested_order: int = None

    @property
    def order(self):
        return self.system.n_states


def balance(sys, tol=DEFAULT_TOLERANCES):
    """
    Метод квадратных корней по множителям Хаммарлинга: U_P = R_P^T, U_Q = R_Q^T, U_Q^T U_P = W S V^T,
    T = U_P V S^{-1/2}, T^{-1} = S^{-1/2} W^T U_Q^T.
    Состояния с sigma <= minimality * sigma_1 отбрасываются сразу.
    """
    require_stable(sys, tol)
    G = gramians(sys, tol)
    UP, UQ = G.RP.T, G.RQ.T
    W, s, V = svd(UQ.T @ UP, tol)

    if s[0] <= 0.0:
        raise BadOrderError(f"{sys.name}: все сингулярные числа Ганкеля равны нулю, балансировать нечего")
    r = int(np.count_nonzero(s > tol.minimality * s[0]))
    if r < s.size:
        logger.warning(f"{sys.name}: реализация неминимальна, отброшено {s.size - r} состояний "
                       f"(sigma <= {tol.minimality:.0e} * sigma_1)")

    root = 1.0 / np.sqrt(s[:r])
    T = UP @ V[:, :r] * root
    Tinv = (W[:, :r] * root).T @ UQ.T
    defect = float(np.abs(Tinv @ T - np.eye(r)).max())
    if defect > tol.solve * s[0] / s[r - 1]:
        logger.warning(f"{sys.name}: балансирующее преобразование неточно, |Tinv T - I| = {defect:.3e}")

    balanced = LtiSystem(Tinv @ sys.A @ T, Tinv @ sys.B, sys.C @ T, sys.D, name=f"{sys.name}_bal")
    return BalancedRealization(balanced, T, Tinv, s[:r].copy(), s.size - r, defect)


def hankel_error(sys, red, tol=DEFAULT_TOLERANCES):
    model = red.system if isinstance(red, ReducedModel) else red
    return hankel_norm(error_system(sys, model), tol)


def _check_order(sys, n):
    if not 1 <= n <= sys.n_states:
        raise BadOrderError(f"Порядок модели n={n} вне диапазона 1..{sys.n_states}")


def balanced_truncation(sys, n, tol=DEFAULT_TOLERANCES, with_error=True):
    _check_order(sys, n)
    bal = balance(sys, tol)
    sigma = bal.sigma
    requested = n
    if n < bal.order:
        threshold = tol.truncation_gap * sigma[0]
        if sigma[n - 1] - sigma[n] < threshold:
            lo, _ = cluster_bounds(sigma, n - 1, threshold)
            if lo == 0:
                raise BadOrderError(f"{sys.name}: sigma_1..sigma_{n + 1} образуют один кластер, "
                                    f"усечение до порядка {n} невозможно")
            logger.warning(f"{sys.name}: sigma_{n} почти равно sigma_{n + 1}, порядок понижен с {n} до {lo}")
            n = lo
    n = min(n, bal.order)

    A, B, C, D = bal.system.matrices()
    model = LtiSystem(A[:n, :n], B[:n], C[:, :n], D, name=f"{sys.name}_bt{n}")
    err = hankel_error(sys, model, tol) if with_error else None
    return ReducedModel(model, BALANCED_TRUNCATION, err, requested)


def _procrustes_unitary(B2, C2, tol):
    """Ортогональная U с минимальной невязкой C2^T U + B2 (SVD матрицы -C2 B2)."""
    X, _, Y = svd(-C2 @ B2, tol)
    return X @ Y.T


def _stable_part(A, B, C, tol):
    """
    Устойчивая часть (A, B, C): упорядоченная форма Шура переносит устойчивые собственные
    значения в левый верхний блок, уравнение Сильвестра убирает внедиагональный блок.
    """
    T, Z, k = sla.schur(A, output='real', sort='lhp')
    if k == 0:
        return None
    Bz = Z.T @ B
    Cz = C @ Z
    if k == A.shape[0]:
        return T, Bz, Cz
    T11, T12, T22 = T[:k, :k], T[:k, k:], T[k:, k:]
    try:
        # T11 X - X T22 + T12 = 0
        X = sylvester(T11, -T22, T12, tol)
    except SylvesterSingularError as e:
        raise NonConvergenceError(f"Не удалось разделить устойчивую и неустойчивую части: {e}") from e
    return T11, Bz[:k] - X @ Bz[k:], Cz[:, :k]


def optimal_hankel(sys, n, tol=DEFAULT_TOLERANCES, with_error=True):
    """
    Оптимальная аппроксимация по норме Ганкеля (конструкция Гловера).
    Состояния с sigma, равными sigma_{n+1} (кластер), переставляются в конец; для них
    B2 = -C2^T U. Возвращается устойчивая часть порядка, равного числу sigma_i > sigma_{n+1}.
    """
    _check_order(sys, n)
    if n == sys.n_states:
        # ничего не отбрасывается: исходная реализация и есть оптимальная модель
        model = sys.renamed(f"{sys.name}_ohna{n}")
        err = hankel_error(sys, model, tol) if with_error else None
        return ReducedModel(model, OPTIMAL_HANKEL, err, n)
    bal = balance(sys, tol)
    sigma = bal.sigma
    if n >= bal.order:
        model = bal.system.renamed(f"{sys.name}_ohna{bal.order}")
        err = hankel_error(sys, model, tol) if with_error else None
        return ReducedModel(model, OPTIMAL_HANKEL, err, n)

    s = float(sigma[n])
    lo, hi = cluster_bounds(sigma, n, tol.multiplicity * sigma[0])
    if lo == 0:
        raise BadOrderError(f"{sys.name}: sigma_{n + 1} совпадает с sigma_1, устойчивой части нет")
    if hi - lo > 1:
        logger.info(f"{sys.name}: sigma_{n + 1} имеет кратность {hi - lo}")
    kept = np.r_[0:lo, hi:bal.order]
    cut = np.r_[lo:hi]

    A, B, C, D = bal.system.matrices()
    m, p = sys.n_inputs, sys.n_outputs
    k = max(m, p)
    # дополнение нулевыми входами/выходами до квадратной системы
    Bp = np.zeros((bal.order, k))
    Bp[:, :m] = B
    Cp = np.zeros((k, bal.order))
    Cp[:p, :] = C
    Dp = np.zeros((k, k))
    Dp[:p, :m] = D

    A11 = A[np.ix_(kept, kept)]
    B1, B2 = Bp[kept], Bp[cut]
    C1, C2 = Cp[:, kept], Cp[:, cut]
    S1 = np.diag(sigma[kept])
    U = _procrustes_unitary(B2, C2, tol)

    gamma = sigma[kept] ** 2 - s ** 2
    if np.abs(gamma).min() <= tol.multiplicity * sigma[0] * s:
        raise DegenerateGammaError(f"{sys.name}: Gamma = Sigma_1^2 - sigma^2 I вырождена")
    Ahat = (s ** 2 * A11.T + S1 @ A11 @ S1 - s * C1.T @ U @ B1.T) / gamma[:, None]
    Bhat = (S1 @ B1 + s * C1.T @ U) / gamma[:, None]
    Chat = C1 @ S1 + s * U @ B1.T
    Dhat = Dp - s * U

    stable = _stable_part(Ahat, Bhat, Chat, tol)
    if stable is None:
        raise BadOrderError(f"{sys.name}: аппроксимация порядка {n} не имеет устойчивой части")
    As, Bs, Cs = stable
    if As.shape[0] != lo:
        logger.warning(f"{sys.name}: устойчивая часть имеет порядок {As.shape[0]}, ожидалось {lo}")

    model = LtiSystem(As, Bs[:, :m], Cs[:p, :], Dhat[:p, :m], name=f"{sys.name}_ohna{As.shape[0]}")
    require_stable(model, tol)
    err = hankel_error(sys, model, tol) if with_error else None
    if err is not None:
        logger.info(f"{sys.name}: ошибка Гловера {err:.6e}, sigma_{n + 1} = {s:.6e}")
    return ReducedModel(model, OPTIMAL_HANKEL, err, n)


def reduce(sys, n, method=OPTIMAL_HANKEL, tol=DEFAULT_TOLERANCES):
    methods = {
        'bt': balanced_truncation, BALANCED_TRUNCATION: balanced_truncation,
        'ohna': optimal_hankel, OPTIMAL_HANKEL: optimal_hankel,
    }
    if method not in methods:
        raise BadParameterError(f"Неизвестный метод понижения порядка '{method}'")
    return methods[method](sys, n, tol)


@dataclass(frozen=True)
class PerturbationReport:
    trials: int
    stable_trials: int
    min_error: float
    reference_error: float
    passed: bool


def perturbation_search(sys, red, trials=200, scale=1e-2, seed=42, tol=DEFAULT_TOLERANCES, threads=None):
    """Ни одно устойчивое случайное возмущение (A, B, C) модели не уменьшает ошибку Ганкеля."""
    if trials < 1 or scale <= 0.0:
        raise BadParameterError(f"Некорректные параметры пробы: trials={trials}, scale={scale}")
    reference = red.hankel_error if red.hankel_error is not None else hankel_error(sys, red, tol)
    A, B, C, D = red.system.matrices()

    def trial(rng):
        def bump(M):
            return M + scale * max(np.abs(M).max(), 1.0) * rng.standard_normal(M.shape)

        candidate = LtiSystem(bump(A), bump(B), bump(C), D)
        if not candidate.is_stable(tol):
            return None
        return hankel_error(sys, candidate, tol)

    errors = [e for e in parallel_map(trial, spawn_generators(seed, trials), threads) if e is not None]
    min_error = min(errors) if errors else None
    slack = tol.lower_bound * hankel_norm(sys, tol)
    passed = min_error is None or min_error >= reference - slack
    return PerturbationReport(trials, len(errors), min_error, reference, passed)
