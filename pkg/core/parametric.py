# core/parametric.py

# 🗺️ Параметрические семейства: развертка по сетке и нижняя граница поперечника 🗺️
#
# Для аффинного семейства Sigma(p) поперечник множества выходов по всем p и всем входам
# единичного шара не меньше max_p sigma_{n+1}(Sigma(p)). Модуль вычисляет эту границу на
# сетке параметров, проверяет непрерывность кривых sigma_i(p) и сравнивает границу с ошибкой
# глобальных (не зависящих от p) базисов. Скалярные произведения выходных функций разных
# точек сетки берутся из перекрестных грамианов (уравнение Сильвестра), без квадратур.
#
# Функционал:
# - tensor_grid() / parse_grid(): тензорная сетка по числу узлов на оси.
# - sweep(): sigma_i в каждой точке; неустойчивые точки исключаются с предупреждением.
# - SweepResult.lower_bound(n) / argmax(n): max_p sigma_{n+1}(p) и точка максимума.
# - continuity_check(): поиск подозрительных скачков sigma_i вдоль осей сетки.
# - cross_gramian(): решение A(p)^T X + X A(p') + C(p)^T C(p') = 0.
# - global_basis_gap(): ошибка глобального базиса (pod, greedy, random) против нижней границы.
#
# Версия: 1.0
#
# Построение глобального базиса эвристично: для неравенства годится любой базис.
#

import itertools
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from core.errors import (
    AllPointsUnstableError,
    BadOrderError,
    BadParameterError,
    CertificateError,
    DimensionMismatchError,
)
from core.gramian import sylvester
from core.hankel import hankel_spectrum
from core.linalg import symmetric_eig, symmetrize
from core.system import instantiate
from core.tolerances import DEFAULT_TOLERANCES
from core.widths import worst_error_from_projection
from utils.run_config import parallel_map, spawn_generators

logger = logging.getLogger(__name__)

CONSTRUCTIONS = ('pod', 'greedy', 'random')


def parse_grid(text):
    """'21' -> (21,), '11x5' или '11,5' -> (11, 5)."""
    parts = [t for t in str(text).replace('x', ',').split(',') if t.strip()]
    try:
        counts = tuple(int(t) for t in parts)
    except ValueError as e:
        raise BadParameterError(f"Некорректное описание сетки '{text}'") from e
    if not counts or min(counts) < 1:
        raise BadParameterError(f"Число узлов на каждой оси должно быть >= 1: '{text}'")
    return counts


def tensor_grid(psys, counts):
    """Точки тензорной сетки в лексикографическом порядке; ось из одного узла берет середину."""
    counts = (counts,) * psys.n_parameters if isinstance(counts, int) else tuple(counts)
    if len(counts) == 1 and psys.n_parameters > 1:
        counts = counts * psys.n_parameters
    if len(counts) != psys.n_parameters:
        raise DimensionMismatchError(f"Сетка задает {len(counts)} осей, а параметров {psys.n_parameters}")
    axes = [
        np.array([r.midpoint]) if c == 1 else np.linspace(r.min, r.max, c)
        for r, c in zip(psys.box, counts)
    ]
    points = np.array(list(itertools.product(*axes)), dtype=float)
    return points, counts


@dataclass(frozen=True, eq=False)
class SweepResult:
    psys: object
    points: np.ndarray          # все точки сетки (K x d)
    sigma_table: np.ndarray     # K x N, строки исключенных точек заполнены NaN
    stable: np.ndarray          # маска включенных точек
    counts: tuple = None        # число узлов по осям для тензорной сетки
    spectra: tuple = None       # HankelSpectrum каждой точки (None для исключенных)

    @property
    def order(self):
        return self.sigma_table.shape[1]

    @property
    def included(self):
        return self.points[self.stable]

    @property
    def excluded(self):
        return self.points[~self.stable]

    def _column(self, n):
        if not 0 <= n <= self.order:
            raise BadOrderError(f"Порядок n={n} вне диапазона 0..{self.order}")
        if n == self.order:
            return np.where(self.stable, 0.0, np.nan)
        return self.sigma_table[:, n]

    def lower_bound(self, n):
        """max по сетке sigma_{n+1}(Sigma(p))."""
        return float(np.nanmax(self._column(n)))

    def argmax(self, n):
        return self.points[int(np.nanargmax(self._column(n)))]


def sweep(psys, counts=None, points=None, tol=DEFAULT_TOLERANCES, threads=None):
    """HSV в каждой точке тензорной сетки (counts) или явного списка точек (points)."""
    if (counts is None) == (points is None):
        raise BadParameterError("Нужно задать ровно одно: число узлов сетки или список точек")
    if points is None:
        grid, counts = tensor_grid(psys, counts)
    else:
        grid = np.atleast_2d(np.asarray(points, dtype=float))
        if grid.shape[1] != psys.n_parameters:
            raise DimensionMismatchError(
                f"Точки имеют {grid.shape[1]} координат, а параметров {psys.n_parameters}")

    def evaluate(p):
        sys_p = instantiate(psys, p)
        if not sys_p.is_stable(tol):
            return None
        return hankel_spectrum(sys_p, tol)

    rows = parallel_map(evaluate, list(grid), threads)
    N = psys.base.n_states
    table = np.full((len(rows), N), np.nan)
    stable = np.zeros(len(rows), dtype=bool)
    for k, row in enumerate(rows):
        if row is None:
            logger.warning(f"{psys.name}: точка {grid[k].tolist()} неустойчива и исключена из развертки")
        else:
            table[k] = row.sigma
            stable[k] = True
    if not stable.any():
        raise AllPointsUnstableError(f"{psys.name}: все {len(rows)} точек сетки неустойчивы")
    logger.info(f"{psys.name}: развертка по {stable.sum()} из {len(rows)} точек")
    return SweepResult(psys, grid, table, stable, counts if points is None else None, tuple(rows))


@dataclass(frozen=True)
class Jump:
    axis: int
    start: tuple
    end: tuple
    relative_jump: float


@dataclass(frozen=True)
class ContinuityReport:
    index: int
    max_jump: float
    median_jump: float
    flagged: tuple = field(default=())

    @property
    def passed(self):
        return not self.flagged


def _relative_jumps(values):
    a, b = values[:-1], values[1:]
    scale = np.maximum(np.abs(a), np.abs(b))
    with np.errstate(invalid='ignore', divide='ignore'):
        rel = np.where(scale > 0.0, np.abs(b - a) / scale, 0.0)
    rel[np.isnan(a) | np.isnan(b)] = np.nan    # исключенные точки не сравниваются
    return rel


def continuity_check(res, i, tol=DEFAULT_TOLERANCES):
    """
    Относительные скачки |sigma_i(p_{k+1}) - sigma_i(p_k)| / max(sigma_i) вдоль каждой оси.
    Скачок помечается, если он больше continuity_factor медиан и больше continuity_floor.
    """
    if not 1 <= i <= res.order:
        raise BadOrderError(f"Индекс sigma_{i} вне диапазона 1..{res.order}")
    column = res.sigma_table[:, i - 1]

    segments = []   # (ось, индексы точек вдоль линии)
    if res.counts is not None:
        index = np.arange(len(column)).reshape(res.counts)
        for axis in range(index.ndim):
            lines = np.moveaxis(index, axis, -1).reshape(-1, index.shape[axis])
            segments.extend((axis, line) for line in lines)
    else:
        segments.append((0, np.arange(len(column))))

    jumps = []
    for axis, line in segments:
        rel = _relative_jumps(column[line])
        for k, value in enumerate(rel):
            if np.isfinite(value):
                jumps.append((axis, line[k], line[k + 1], float(value)))

    if not jumps:
        return ContinuityReport(i, 0.0, 0.0)
    values = np.array([j[3] for j in jumps])
    median = float(np.median(values))
    threshold = max(tol.continuity_factor * median, tol.continuity_floor)
    flagged = tuple(
        Jump(axis, tuple(res.points[a].tolist()), tuple(res.points[b].tolist()), value)
        for axis, a, b, value in jumps if value > threshold
    )
    for jump in flagged:
        logger.warning(f"sigma_{i}: подозрительный скачок {jump.relative_jump:.3e} "
                       f"между {list(jump.start)} и {list(jump.end)}")
    return ContinuityReport(i, float(values.max()), median, flagged)


def cross_gramian(sys_p, sys_q, tol=DEFAULT_TOLERANCES):
    """X с A(p)^T X + X A(q) + C(p)^T C(q) = 0; <C e^{A(p)t} x, C e^{A(q)t} y> = x^T X y."""
    if sys_p.n_outputs != sys_q.n_outputs:
        raise DimensionMismatchError("Системы должны иметь одинаковое число выходов")
    return sylvester(sys_p.A.T, sys_q.A, sys_p.C.T @ sys_q.C, tol)


@dataclass(frozen=True)
class GlobalBasisReport:
    n: int
    construction: str
    achieved: float             # max по сетке худшей ошибки глобального базиса
    lower_bound: float          # max по сетке sigma_{n+1}
    local_basis_error: float    # ошибка базиса {g_i(p)}, зависящего от точки
    gap: float
    strict: bool                # achieved > lower_bound с запасом
    point_errors: tuple
    worst_point: tuple
    draws: int
    draw_minimum: float
    note: str = "глобальный базис построен эвристически; неравенство верно для любого базиса"

    def as_dict(self):
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


class _SnapshotSpace:
    """
    Пространство снимков sigma_i(p_k) g_i(p_k) по всем точкам сетки. Функции задаются
    векторами коэффициентов при снимках; скалярные произведения дает матрица Грама.
    """

    def __init__(self, systems, spectra, tol, threads):
        self.spectra = spectra
        self.ranks = [s.rank for s in spectra]
        self.offsets = np.concatenate([[0], np.cumsum(self.ranks)]).astype(int)
        size = int(self.offsets[-1])

        pairs = [(k, l) for k in range(len(systems)) for l in range(k, len(systems))]

        def block(pair):
            k, l = pair
            Vk = spectra[k].V[:, :self.ranks[k]]
            Vl = spectra[l].V[:, :self.ranks[l]]
            if k == l:
                Y = spectra[k].gramians.RQ @ Vk
                return Y.T @ Y
            return Vk.T @ cross_gramian(systems[k], systems[l], tol) @ Vl

        # inner[k][l] = <g_i(p_k), g_j(p_l)>
        self.inner = {}
        for (k, l), value in zip(pairs, parallel_map(block, pairs, threads)):
            self.inner[k, l] = value
            self.inner[l, k] = value.T

        self.gram = np.zeros((size, size))
        for (k, l), value in self.inner.items():
            sk = spectra[k].sigma[:self.ranks[k]]
            sl = spectra[l].sigma[:self.ranks[l]]
            self.gram[self.offsets[k]:self.offsets[k + 1], self.offsets[l]:self.offsets[l + 1]] = \
                sk[:, None] * value * sl[None, :]
        self.gram = symmetrize(self.gram)

    @property
    def size(self):
        return self.gram.shape[0]

    def point_block(self, k):
        return slice(self.offsets[k], self.offsets[k + 1])

    def projections(self, k, coeffs):
        """<g_i(p_k), phi_a> для функций phi_a = sum_s coeffs[s, a] * snapshot_s."""
        out = np.zeros((self.ranks[k], coeffs.shape[1]))
        for l in range(len(self.ranks)):
            sl = self.spectra[l].sigma[:self.ranks[l]]
            out += self.inner[k, l] @ (sl[:, None] * coeffs[self.point_block(l)])
        return out

    def point_error(self, k, coeffs):
        sigma = self.spectra[k].sigma[:self.ranks[k]]
        if sigma.size == 0:
            return 0.0
        return worst_error_from_projection(sigma, self.projections(k, coeffs))

    def pod(self, n, subset=None):
        """Ортонормированные коэффициенты n ведущих POD-мод (метод снимков)."""
        index = np.arange(self.size) if subset is None else subset
        w, E = symmetric_eig(self.gram[np.ix_(index, index)])
        keep = [a for a in range(min(n, w.size)) if w[a] > np.finfo(float).eps * max(w[0], 0.0) * w.size]
        coeffs = np.zeros((self.size, len(keep)))
        if keep:
            coeffs[index] = E[:, keep] / np.sqrt(w[keep])
        return coeffs

    def orthonormal_random(self, n, rng):
        raw = rng.standard_normal((self.size, n))
        return self.orthonormalize(raw)

    def orthonormalize(self, coeffs):
        """Грам-Шмидт в скалярном произведении снимков; нулевые направления отбрасываются."""
        result = []
        for a in range(coeffs.shape[1]):
            c = coeffs[:, a].copy()
            for b in result:
                c -= (b @ self.gram @ c) * b
            norm2 = float(c @ self.gram @ c)
            if norm2 > np.finfo(float).eps * max(np.trace(self.gram), np.finfo(float).tiny):
                result.append(c / math.sqrt(norm2))
        return np.column_stack(result) if result else np.zeros((self.size, 0))

    def worst_direction(self, k, coeffs):
        """Коэффициенты выхода точки k с наибольшей ошибкой при текущем базисе."""
        sigma = self.spectra[k].sigma[:self.ranks[k]]
        inner = self.projections(k, coeffs)
        D = np.diag(sigma)
        w, E = symmetric_eig(symmetrize(D @ (np.eye(sigma.size) - inner @ inner.T) @ D))
        c = np.zeros(self.size)
        c[self.point_block(k)] = E[:, 0]
        return c


def _build_basis(space, n, construction, rng, threads):
    if construction == 'pod':
        return space.pod(n)
    if construction == 'random':
        K = len(space.ranks)
        chosen = np.sort(rng.choice(K, size=max(1, K // 2), replace=False))
        subset = np.concatenate([np.arange(space.offsets[k], space.offsets[k + 1]) for k in chosen]).astype(int)
        return space.pod(n, subset)

    # сильный жадный алгоритм: остаток худшей точки добавляется к базису
    coeffs = np.zeros((space.size, 0))
    points = list(range(len(space.ranks)))
    for _ in range(n):
        errors = parallel_map(lambda k: space.point_error(k, coeffs), points, threads)
        worst = int(np.argmax(errors))
        if errors[worst] <= 0.0:
            break
        extended = space.orthonormalize(np.column_stack([coeffs, space.worst_direction(worst, coeffs)]))
        if extended.shape[1] == coeffs.shape[1]:
            break
        coeffs = extended
    return coeffs


def global_basis_gap(psys, n, counts=None, points=None, draws=20, seed=42, construction='pod',
                     tol=DEFAULT_TOLERANCES, threads=None, res=None):
    """
    Ошибка глобального n-мерного базиса на сетке против нижней границы max_p sigma_{n+1}(p).
    Для каждого из draws случайных глобальных базисов неравенство также проверяется.
    Готовая развертка res (того же семейства) используется вместо повторного вычисления спектров.
    """
    if construction not in CONSTRUCTIONS:
        raise BadParameterError(f"Неизвестный способ построения базиса '{construction}', доступны {CONSTRUCTIONS}")
    if res is None:
        res = sweep(psys, counts=counts, points=points, tol=tol, threads=threads)
    elif res.psys is not psys:
        raise BadParameterError(f"Развертка построена для {res.psys.name}, а не для {psys.name}")
    if res.spectra is None:
        raise BadParameterError("Развертка не содержит спектров точек сетки")
    if not 0 <= n <= res.order:
        raise BadOrderError(f"Порядок n={n} вне диапазона 0..{res.order}")

    grid = res.included
    spectra = [s for s in res.spectra if s is not None]
    systems = [s.sys for s in spectra]
    space = _SnapshotSpace(systems, spectra, tol, threads)
    rng_basis, rng_draws = spawn_generators(seed, 2)

    coeffs = _build_basis(space, n, construction, rng_basis, threads)
    errors = parallel_map(lambda k: space.point_error(k, coeffs), range(len(systems)), threads)
    achieved = float(max(errors))
    bound = res.lower_bound(n)
    slack = tol.lower_bound * float(np.nanmax(res.sigma_table[:, 0]))

    local = max(s.sigma_at(n + 1) for s in spectra)

    draw_minimum = None
    for _ in range(draws):
        candidate = space.orthonormal_random(n, rng_draws)
        worst = max(space.point_error(k, candidate) for k in range(len(systems)))
        if worst < bound - slack:
            raise CertificateError(f"Случайный глобальный базис дал ошибку {worst:.6e} < {bound:.6e}")
        draw_minimum = worst if draw_minimum is None else min(draw_minimum, worst)

    if achieved < bound - slack:
        raise CertificateError(f"{psys.name}: глобальный базис ({construction}) дал ошибку {achieved:.6e} "
                               f"меньше нижней границы {bound:.6e}")
    strict = achieved > bound + slack
    worst_point = tuple(grid[int(np.argmax(errors))].tolist())
    logger.info(f"{psys.name}: глобальный базис ({construction}), n={n}: ошибка {achieved:.6e}, "
                f"граница {bound:.6e}")
    return GlobalBasisReport(n, construction, achieved, bound, local, achieved - bound, strict,
                             tuple(float(e) for e in errors), worst_point, draws, draw_minimum)
