# core/hankel.py

# 🎼 Оператор Ганкеля: сингулярные числа и функции Шмидта 🎼
#
# Оператор Ганкеля переводит прошлые входы u на (-inf, 0] в будущие выходы на [0, inf).
# Его сингулярные числа - квадратные корни собственных чисел произведения грамианов PQ;
# они вычисляются как сингулярные числа R_Q R_P^T по треугольным множителям грамианов,
# а сингулярные функции выражаются через векторы v_i:
#     g_i(t) = C exp(A t) v_i,                      t >= 0
#     f_i(s) = (1/sigma_i) B^T exp(-A^T s) Q v_i,   s <= 0
# Независимой проверкой служит дискретизация оператора квадратурой Гаусса-Лежандра.
#
# Функционал:
# - hankel_spectrum(): sigma_i и векторы Шмидта v_i (v_i^T Q v_j = delta_ij).
# - hankel_norm(): норма Ганкеля sigma_1.
# - schmidt_pair(): вычислители f_i, g_i и их скалярные произведения через грамианы.
# - apply_hankel_to_f(): проверка тождества Psi_c f_i = sigma_i v_i.
# - discretize(): квадратурная матрица оператора на градуированной сетке.
#
# Версия: 1.0
#

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import null_space

from core.errors import (
    BadParameterError,
    IndexOutOfRangeError,
    ZeroSingularValueError,
)
from core.gramian import GramianPair, gramians
from core.linalg import expm, singular_values, svd
from core.system import LtiSystem, require_stable
from core.tolerances import DEFAULT_TOLERANCES

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class HankelSpectrum:
    sigma: np.ndarray           # sigma_1 >= ... >= sigma_N >= 0
    V: np.ndarray               # столбцы - векторы Шмидта v_i
    sys: LtiSystem
    gramians: GramianPair
    rank: int                   # число sigma_i > zero_sigma * sigma_1
    eig_residuals: np.ndarray   # ||PQ v_i - sigma_i^2 v_i|| / (sigma_1^2 ||v_i||)
    U: np.ndarray = None        # u_i = R_Q v_i, левые сингулярные векторы R_Q R_P^T
    W: np.ndarray = None        # w_i = R_P Q v_i / sigma_i, правые сингулярные векторы

    @property
    def order(self):
        return self.sigma.size

    def sigma_at(self, k):
        """sigma_k с нумерацией с единицы; sigma_{N+1} = 0."""
        if k < 1:
            raise IndexOutOfRangeError(f"Индекс сингулярного числа {k} < 1")
        return float(self.sigma[k - 1]) if k <= self.order else 0.0

    def q_orthonormality_defect(self, count=None):
        """max |V^T Q V - I| по первым count векторам (по умолчанию по ненулевым)."""
        count = self.rank if count is None else count
        Vk = self.V[:, :count]
        if not count:
            return 0.0
        Y = self.gramians.RQ @ Vk
        return float(np.abs(Y.T @ Y - np.eye(count)).max())

    def rounding_floor(self):
        """Абсолютная погрешность sigma_i в двойной точности: N eps ||R_P|| ||R_Q||."""
        G = self.gramians
        scale = float(np.linalg.norm(G.RP, 2) * np.linalg.norm(G.RQ, 2)) if self.order else 0.0
        return max(self.order, 1) * np.finfo(float).eps * scale

    def certifiable(self, threshold, margin):
        """
        Число ведущих sigma_i, для которых шум округления rounding_floor / sigma_i
        меньше threshold / margin; метрики векторов Шмидта для них проверяемы с допуском threshold.
        """
        if not self.rank:
            return 0
        floor = margin * self.rounding_floor() / threshold
        return int(np.count_nonzero(self.sigma[:self.rank] > floor))


def cluster_bounds(sigma, k, threshold):
    """
    Границы кластера почти равных sigma вокруг позиции k (с нуля): полуинтервал [lo, hi).
    Соседние значения объединяются, если отличаются не более чем на threshold.
    """
    lo = k
    while lo > 0 and sigma[lo - 1] - sigma[lo] <= threshold:
        lo -= 1
    hi = k + 1
    while hi < sigma.size and sigma[hi - 1] - sigma[hi] <= threshold:
        hi += 1
    return lo, hi


def _sign_convention(V):
    # знак вектора выбирается так, чтобы наибольшая по модулю компонента была положительной
    idx = np.argmax(np.abs(V), axis=0)
    signs = np.sign(V[idx, np.arange(V.shape[1])])
    signs[signs == 0] = 1.0
    return signs


def hankel_spectrum(sys, tol=DEFAULT_TOLERANCES):
    """
    Сингулярные числа Ганкеля как сингулярные числа произведения множителей R_Q R_P^T
    (P = R_P^T R_P, Q = R_Q^T R_Q); векторы Шмидта v_i = R_P^T w_i / sigma_i.
    """
    require_stable(sys, tol)
    G = gramians(sys, tol)
    RP, RQ = G.RP, G.RQ
    U, sigma, W = svd(RQ @ RP.T, tol)

    n = sigma.size
    s1 = sigma[0] if n else 0.0
    rank = int(np.count_nonzero(sigma > tol.zero_sigma * s1)) if s1 > 0.0 else 0

    V = np.zeros((n, n))
    Vr = (RP.T @ W[:, :rank]) / sigma[:rank]
    signs = _sign_convention(Vr)
    V[:, :rank] = Vr * signs
    U[:, :rank] *= signs
    W[:, :rank] *= signs

    if rank < n:
        V[:, rank:] = _zero_sigma_completion(RQ, U[:, rank:])
        logger.info(f"{sys.name}: {n - rank} нулевых сингулярных чисел Ганкеля (ранг {rank})")

    residuals = np.zeros(n)
    if rank:
        Vr = V[:, :rank]
        res = np.linalg.norm(G.P @ (G.Q @ Vr) - Vr * sigma[:rank] ** 2, axis=0)
        residuals[:rank] = res / (s1 ** 2 * np.linalg.norm(Vr, axis=0))

    return HankelSpectrum(sigma, V, sys, G, rank, residuals, U, W)


def _zero_sigma_completion(RQ, U0):
    """
    Векторы для нулевых sigma: решения R_Q x = u_i (Q-ортонормируются Грамом-Шмидтом
    в Q-скалярном произведении) и ненаблюдаемые направления ker R_Q (евклидово ортонормированы).
    """
    count = U0.shape[1]
    floor = math.sqrt(np.finfo(float).eps) * max(np.linalg.norm(RQ, 2), 1.0)
    candidates = np.hstack([np.linalg.lstsq(RQ, U0, rcond=None)[0], null_space(RQ)])
    observed, hidden = [], []
    for x in candidates.T:
        x = x.copy()
        for y in observed:
            x -= ((RQ @ y) @ (RQ @ x)) * y
        q_norm = float(np.linalg.norm(RQ @ x))
        if q_norm > floor:
            observed.append(x / q_norm)
            continue
        for y in hidden:
            x -= (y @ x) * y
        norm = float(np.linalg.norm(x))
        if norm > floor:
            hidden.append(x / norm)
    basis = (observed + hidden)[:count]
    completion = np.zeros((RQ.shape[1], count))
    if basis:
        completion[:, :len(basis)] = np.column_stack(basis)
    return completion


def hankel_norm(sys, tol=DEFAULT_TOLERANCES):
    return float(hankel_spectrum(sys, tol).sigma[0])


class SingularFunctionEvaluator:
    """Пара Шмидта (f_i, g_i) с H f_i = sigma_i g_i."""

    def __init__(self, spectrum, index):
        self.spectrum = spectrum
        self.index = index
        self.sigma = spectrum.sigma_at(index)
        self.v = spectrum.V[:, index - 1]
        self.u = spectrum.U[:, index - 1]

    def g(self, t):
        """g_i(t) = C exp(A t) v_i; возвращает массив (len(t), p)."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        if np.any(t < 0.0):
            raise BadParameterError("g_i определена только при t >= 0")
        sys = self.spectrum.sys
        return np.array([sys.C @ (expm(sys.A, tk) @ self.v) for tk in t])

    def f(self, s):
        """f_i(s) = (1/sigma_i) B^T exp(-A^T s) Q v_i; возвращает массив (len(s), m)."""
        s = np.atleast_1d(np.asarray(s, dtype=float))
        if np.any(s > 0.0):
            raise BadParameterError("f_i определена только при s <= 0")
        sys = self.spectrum.sys
        qv = self.spectrum.gramians.RQ.T @ self.u
        return np.array([sys.B.T @ (expm(sys.A.T, -sk) @ qv) for sk in s]) / self.sigma

    def output_inner(self, other):
        """<g_i, g_j> в L2[0, inf) = v_i^T Q v_j."""
        RQ = self.spectrum.gramians.RQ
        return float((RQ @ self.v) @ (RQ @ other.v))

    def input_inner(self, other):
        """<f_i, f_j> в L2(-inf, 0] = v_i^T Q P Q v_j / (sigma_i sigma_j)."""
        return float(self._input_image() @ other._input_image()) / (self.sigma * other.sigma)

    def _input_image(self):
        # R_P Q v_i
        G = self.spectrum.gramians
        return G.RP @ (G.RQ.T @ self.u)


def schmidt_pair(spectrum, i, tol=DEFAULT_TOLERANCES):
    if not 1 <= i <= spectrum.order:
        raise IndexOutOfRangeError(f"Индекс {i} вне диапазона 1..{spectrum.order}")
    if spectrum.sigma_at(i) <= tol.zero_sigma * spectrum.sigma_at(1):
        raise ZeroSingularValueError(f"sigma_{i} = {spectrum.sigma_at(i):.3e} равно нулю: f_{i} не определена")
    return SingularFunctionEvaluator(spectrum, i)


@dataclass(frozen=True)
class HankelActionRecord:
    index: int
    sigma: float
    defect: float       # ||Psi_c f_i - sigma_i v_i||_{P^-1} / ||sigma_i v_i||_{P^-1}
    passed: bool


def apply_hankel_to_f(spectrum, i, tol=DEFAULT_TOLERANCES):
    """
    Psi_c f_i = (1/sigma_i) P Q v_i должно совпасть с sigma_i v_i.
    Разность измеряется в норме достижимости ||x||_{P^-1} = ||R_P^{-T} x||: в ней Psi_c
    сохраняет норму на дополнении к ядру, и тождество сводится к R_P Q v_i / sigma_i = w_i.
    """
    pair = schmidt_pair(spectrum, i, tol)
    G = spectrum.gramians
    reached = G.RP @ (G.RQ.T @ pair.u) / pair.sigma
    target = spectrum.W[:, i - 1]
    defect = float(np.linalg.norm(reached - target) / np.linalg.norm(target))
    return HankelActionRecord(i, pair.sigma, defect, defect <= tol.hankel_eig)


@dataclass(frozen=True, eq=False)
class DiscretizedHankel:
    horizon: float
    nodes: np.ndarray           # узлы будущей сетки t_k (прошлая сетка: s_j = -t_j)
    weights: np.ndarray
    observability_factor: np.ndarray    # строки sqrt(w_k) C exp(A t_k), блоками по p
    controllability_factor: np.ndarray  # столбцы sqrt(w_j) exp(A t_j) B, блоками по m
    matrix: np.ndarray

    def singular_values(self):
        return singular_values(self.matrix)

    def controllability_gramian(self):
        R = self.controllability_factor
        return R @ R.T

    def observability_gramian(self):
        O = self.observability_factor
        return O.T @ O

    def output_inner(self, x, y):
        """Квадратура для int_0^T (C e^{At} x)^T (C e^{At} y) dt."""
        return float((self.observability_factor @ x) @ (self.observability_factor @ y))


def graded_panels(horizon, panels, grading):
    """Границы панелей на [0, T]; ширины растут в geometric-прогрессии (мельче у нуля)."""
    widths = grading ** np.arange(panels, dtype=float)
    edges = np.concatenate([[0.0], np.cumsum(widths)])
    return horizon * edges / edges[-1]


def gauss_legendre_grid(edges, nodes_per_panel):
    x, w = np.polynomial.legendre.leggauss(nodes_per_panel)
    a, b = edges[:-1, None], edges[1:, None]
    nodes = 0.5 * (a * (1.0 - x) + b * (1.0 + x))
    weights = 0.5 * (b - a) * w
    return nodes.ravel(), weights.ravel()


def discretize(sys, nodes_per_panel=8, panels=12, grading=1.5, tol=DEFAULT_TOLERANCES):
    """Матрица M[k, j] = sqrt(w_k) h(t_k + t_j) sqrt(w_j), h(tau) = C exp(A tau) B."""
    if nodes_per_panel < 1 or panels < 1 or grading <= 0.0:
        raise BadParameterError(
            f"Некорректная сетка: nodes_per_panel={nodes_per_panel}, panels={panels}, grading={grading}")
    alpha = require_stable(sys, tol)
    horizon = math.log(tol.truncation_decay) / abs(alpha)
    nodes, weights = gauss_legendre_grid(graded_panels(horizon, panels, grading), nodes_per_panel)

    sqrt_w = np.sqrt(weights)
    propagators = [expm(sys.A, t) for t in nodes]
    # h(t_k + t_j) = C e^{A t_k} e^{A t_j} B, поэтому матрица раскладывается в произведение
    O = np.vstack([sw * (sys.C @ E) for sw, E in zip(sqrt_w, propagators)])
    R = np.hstack([sw * (E @ sys.B) for sw, E in zip(sqrt_w, propagators)])
    logger.debug(f"Дискретизация {sys.name}: T={horizon:.4g}, {nodes.size} узлов")
    return DiscretizedHankel(horizon, nodes, weights, O, R, O @ R)
