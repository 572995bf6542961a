# core/widths.py

# 📐 Поперечники Колмогорова образа единичного шара 📐
#
# В ортонормированных координатах Шмидта оператор Ганкеля диагонален: H = diag(sigma).
# Поэтому задача о наилучшем n-мерном подпространстве сводится к N координатам:
# худшая ошибка подпространства S равна sigma_max((I - P_S) diag(sigma)), а минимум по всем
# S равен sigma_{n+1} и достигается жадной последовательностью g_1, ..., g_n.
# Точное значение дает теорема; случайные пробы служат независимым свидетельством.
#
# Функционал:
# - SubspaceCoords: подпространство-кандидат в координатах {g_i} (выход) или {f_i} (вход).
# - worst_error_output() / worst_error_input(): худшая ошибка на образе / на входе.
# - greedy_sequence(): жадный базис с сертификатом из случайных одномерных расширений.
# - nwidth() / active_subspace(): отчет WidthReport с эмпирическим инфимумом по пробам.
# - sampled_greedy(): практический жадный алгоритм на конечной обучающей выборке входов.
# - duality_check(): совпадение входных функций f_i и выходных функций сопряженной системы.
#
# Версия: 1.0
#
# Пробы не доказывают оптимальность: они лишь страхуют реализацию от ошибок.
#

import logging
import math
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np
import scipy.linalg as sla

from core.errors import BadOrderError, BadParameterError, DimensionMismatchError, MultiplicityWarning
from core.hankel import cluster_bounds, hankel_spectrum
from core.linalg import as_matrix, orthonormalize
from core.system import adjoint
from core.tolerances import DEFAULT_TOLERANCES
from utils.run_config import parallel_map, draw_chunks, spawn_generators

logger = logging.getLogger(__name__)

OUTPUT = 'output'
INPUT = 'input'


@dataclass(frozen=True, eq=False)
class SubspaceCoords:
    """
    Подпространство в координатах Шмидта. Строк может быть больше N: лишние строки
    обозначают направления вне образа (выход) или из ядра (вход) оператора.
    """
    basis: np.ndarray
    side: str = OUTPUT

    def __post_init__(self):
        if self.side not in (OUTPUT, INPUT):
            raise BadParameterError(f"Неизвестная сторона '{self.side}' (ожидалось output или input)")
        basis = np.asarray(self.basis, dtype=float)
        if basis.ndim != 2:
            raise DimensionMismatchError(f"Базис должен быть матрицей, получено измерение {basis.ndim}")
        if basis.shape[1] > 0:
            basis = orthonormalize(as_matrix(basis, "basis"))
        basis.setflags(write=False)
        object.__setattr__(self, 'basis', basis)

    @property
    def dim(self):
        return self.basis.shape[1]

    @property
    def ambient(self):
        return self.basis.shape[0]

    @classmethod
    def leading(cls, ambient, n, side=OUTPUT):
        """span{e_1, ..., e_n}: жадный базис g_1..g_n (или f_1..f_n)."""
        return cls(np.eye(ambient)[:, :n], side)


def _require_side(S, side, order):
    if S.side != side:
        raise DimensionMismatchError(f"Ожидалось подпространство стороны '{side}', получено '{S.side}'")
    if S.ambient < order:
        raise DimensionMismatchError(f"Размерность координат {S.ambient} меньше порядка системы {order}")


def _output_image(sigma, ambient):
    # образ единичного шара: [diag(sigma); 0]
    return np.vstack([np.diag(sigma), np.zeros((ambient - sigma.size, sigma.size))])


def worst_error_output(spec, S):
    """sigma_max((I - Pi Pi^T) diag(sigma)) в координатах {g_i}."""
    _require_side(S, OUTPUT, spec.order)
    image = _output_image(spec.sigma, S.ambient)
    Pi = S.basis
    residual = image - Pi @ (Pi.T @ image)
    return float(np.linalg.norm(residual, 2))


def worst_error_input(spec, S):
    """sigma_max(diag(sigma) (I - Pi Pi^T)) в координатах {f_i}; направления ядра ничего не дают."""
    _require_side(S, INPUT, spec.order)
    image = _output_image(spec.sigma, S.ambient).T
    Pi = S.basis
    residual = image - (image @ Pi) @ Pi.T
    return float(np.linalg.norm(residual, 2))


def worst_error_from_projection(sigma, inner):
    """
    Худшая ошибка подпространства, заданного скалярными произведениями inner[i, a] = <g_i, phi_a>
    с ортонормированными phi_a: sqrt(lambda_max(D (I - inner inner^T) D)), D = diag(sigma).
    Составляющие phi_a вне образа оператора на ошибку не влияют.
    """
    if inner.shape[1] == 0:
        return float(sigma.max()) if sigma.size else 0.0
    # I - inner inner^T = F^T F без вычитания квадратов: F = I - U diag(1 - sqrt(1 - s^2)) U^T
    U, s, _ = np.linalg.svd(inner, full_matrices=False)
    s = np.clip(s, 0.0, 1.0)
    c = np.sqrt(1.0 - s ** 2)
    c[1.0 - s <= 4.0 * np.finfo(float).eps] = 0.0
    D = np.diag(sigma)
    F = D - U @ ((1.0 - c)[:, None] * (U.T @ D))
    return float(np.linalg.norm(F, 2))


def _batched_worst_errors(image, bases, side):
    """Худшие ошибки для пачки ортонормированных базисов формы (K, ambient, n)."""
    if side == OUTPUT:
        proj = bases @ (np.swapaxes(bases, 1, 2) @ image)
        residual = image - proj
    else:
        imageT = image.T
        residual = imageT - (imageT @ bases) @ np.swapaxes(bases, 1, 2)
    return np.linalg.svd(residual, compute_uv=False)[:, 0]


def _random_subspace_minimum(image, ambient, n, draws, seed, side, threads=None):
    """Минимум худшей ошибки по draws случайным n-мерным подпространствам."""
    if n == 0 or draws == 0:
        return None
    chunks = draw_chunks(draws)
    rngs = spawn_generators(seed, len(chunks))

    def run(job):
        size, rng = job
        gauss = rng.standard_normal((size, ambient, n))
        bases, _ = np.linalg.qr(gauss)
        return float(_batched_worst_errors(image, bases, side).min())

    return min(parallel_map(run, list(zip(chunks, rngs)), threads))


@dataclass(frozen=True)
class GreedyCertificate:
    initial_error: float            # худшая ошибка пустого подпространства = sigma_1
    step_errors: tuple              # ошибка span{g_1..g_i}, i = 1..n
    draw_minima: tuple             # минимум по случайным расширениям span{g_1..g_{i-1}}
    draws: int
    passed: bool


@dataclass(frozen=True, eq=False)
class GreedyResult:
    coords: SubspaceCoords
    certificate: GreedyCertificate


def _check_order(spec, n):
    if not 0 <= n <= spec.order:
        raise BadOrderError(f"Порядок n={n} вне диапазона 0..{spec.order}")


def greedy_sequence(spec, n, draws=500, seed=42, extra=1, tol=DEFAULT_TOLERANCES, threads=None):
    """
    Жадный базис span{g_1, ..., g_n}. На шаге i случайные одномерные расширения
    span{g_1..g_{i-1}} не должны давать ошибку меньше ошибки span{g_1..g_i} - tol * sigma_1.
    """
    _check_order(spec, n)
    ambient = spec.order + extra
    image = _output_image(spec.sigma, ambient)
    slack = tol.lower_bound * spec.sigma_at(1)
    rngs = spawn_generators(seed, max(n, 1))

    step_errors, draw_minima = [], []
    passed = True
    for i in range(1, n + 1):
        err = worst_error_output(spec, SubspaceCoords.leading(ambient, i))
        step_errors.append(err)
        if draws:
            current = np.eye(ambient)[:, :i - 1]
            phi = rngs[i - 1].standard_normal((draws, ambient, 1))
            phi = phi - current @ (current.T @ phi)
            phi /= np.linalg.norm(phi, axis=1, keepdims=True)
            bases = np.concatenate([np.broadcast_to(current, (draws, ambient, i - 1)), phi], axis=2)
            best = float(_batched_worst_errors(image, bases, OUTPUT).min())
            draw_minima.append(best)
            if best < err - slack:
                passed = False
                logger.error(f"Шаг {i}: случайное расширение дало ошибку {best:.6e} < {err:.6e}")

    certificate = GreedyCertificate(spec.sigma_at(1), tuple(step_errors), tuple(draw_minima), draws, passed)
    return GreedyResult(SubspaceCoords.leading(ambient, n), certificate)


@dataclass(frozen=True)
class WidthReport:
    n: int
    error: float
    reference: float                # sigma_{n+1}, sigma_{N+1} = 0
    gap: float
    provenance: str                 # greedy | random | user | sampled_greedy
    side: str = OUTPUT
    empirical_infimum: float = None
    draws: int = 0
    radius: float = 1.0
    certified: bool = True
    step_errors: tuple = field(default=())

    def as_dict(self):
        return asdict(self)


def _scale(value, radius, zero_level):
    # образ шара радиуса r - это r * (образ единичного шара); при r = inf ширина 0 или inf
    if value is None:
        return None
    if math.isinf(radius):
        return 0.0 if value <= zero_level else math.inf
    return value * radius


def _width_report(spec, n, error, provenance, side, draws, seed, extra, radius, tol, threads):
    reference = spec.sigma_at(n + 1)
    sigma1 = spec.sigma_at(1)
    ambient = spec.order + extra
    empirical = _random_subspace_minimum(
        _output_image(spec.sigma, ambient), ambient, n, draws, seed, side, threads)
    certified = empirical is None or empirical >= reference - tol.lower_bound * sigma1
    if not certified:
        logger.error(f"Случайное подпространство размерности {n} дало ошибку {empirical:.6e} "
                     f"меньше sigma_{n + 1} = {reference:.6e}")

    zero_level = tol.attainment * max(sigma1, np.finfo(float).tiny)
    error_s = _scale(error, radius, zero_level)
    reference_s = _scale(reference, radius, zero_level)
    gap = error_s - reference_s if not (math.isinf(error_s) and math.isinf(reference_s)) else 0.0
    return WidthReport(n, error_s, reference_s, gap, provenance, side,
                       _scale(empirical, radius, zero_level), draws, radius, certified)


def _check_radius(radius):
    if not radius > 0.0:
        raise BadParameterError(f"Радиус допустимого множества должен быть положительным, получено {radius}")


def nwidth(spec, n, draws=500, seed=42, radius=1.0, extra=1, tol=DEFAULT_TOLERANCES, threads=None):
    """n-поперечник образа шара: ошибка жадного подпространства против sigma_{n+1}."""
    _check_order(spec, n)
    _check_radius(radius)
    error = worst_error_output(spec, SubspaceCoords.leading(spec.order + extra, n, OUTPUT))
    report = _width_report(spec, n, error, 'greedy', OUTPUT, draws, seed, extra, radius, tol, threads)
    logger.info(f"{spec.sys.name}: d_{n} = {report.error:.6e} (sigma_{n + 1} = {report.reference:.6e})")
    return report


def active_subspace(spec, n, draws=500, seed=42, radius=1.0, extra=1, tol=DEFAULT_TOLERANCES, threads=None):
    """Активное подпространство span{f_1, ..., f_n} на стороне входа."""
    _check_order(spec, n)
    _check_radius(radius)
    error = worst_error_input(spec, SubspaceCoords.leading(spec.order + extra, n, INPUT))
    report = _width_report(spec, n, error, 'greedy', INPUT, draws, seed, extra, radius, tol, threads)
    logger.info(f"{spec.sys.name}: delta_{n} = {report.error:.6e} (sigma_{n + 1} = {report.reference:.6e})")
    return report


def sampled_greedy(spec, n, samples=500, seed=42, extra=1, tol=DEFAULT_TOLERANCES):
    """
    Жадный алгоритм на обучающей выборке: samples случайных единичных входов.
    На каждом шаге к базису добавляется нормированный остаток выхода с наибольшей ошибкой.
    """
    _check_order(spec, n)
    if samples < 1:
        raise BadParameterError(f"Обучающая выборка должна быть непустой, получено {samples}")
    N = spec.order
    rng = spawn_generators(seed, 1)[0]
    inputs = rng.standard_normal((N + extra, samples))
    inputs /= np.linalg.norm(inputs, axis=0)
    outputs = spec.sigma[:, None] * inputs[:N]

    basis = np.zeros((N, 0))
    maxima = []
    for _ in range(n):
        residual = outputs - basis @ (basis.T @ outputs)
        norms = np.linalg.norm(residual, axis=0)
        k = int(np.argmax(norms))
        maxima.append(float(norms[k]))
        if norms[k] <= tol.attainment * max(spec.sigma_at(1), np.finfo(float).tiny):
            # выборка исчерпана: дополняем базис любым ортогональным направлением
            complement = np.eye(N) - basis @ basis.T
            direction = complement[:, int(np.argmax(np.linalg.norm(complement, axis=0)))]
        else:
            direction = residual[:, k]
        direction = direction - basis @ (basis.T @ direction)
        basis = np.column_stack([basis, direction / np.linalg.norm(direction)])

    error = worst_error_output(spec, SubspaceCoords(basis, OUTPUT))
    reference = spec.sigma_at(n + 1)
    return WidthReport(n, error, reference, error - reference, 'sampled_greedy', OUTPUT,
                       None, samples, 1.0, error >= reference - tol.lower_bound * spec.sigma_at(1),
                       tuple(maxima))


@dataclass(frozen=True)
class DualityReport:
    n: int
    compared: int               # размерность сравниваемых подпространств (с учетом кластера)
    max_angle: float
    sigma_defect: float         # max |sigma_i - sigma_i^*| / sigma_1 по разрешенным sigma
    multiplicity: bool
    passed: bool
    resolved: int = None        # число sigma выше уровня шума округления

    def as_dict(self):
        return asdict(self)


def duality_check(sys, n, tol=DEFAULT_TOLERANCES):
    """
    Входные функции f_1..f_n системы и выходные функции сопряженной системы
    (после обращения времени) должны задавать одно подпространство L2.
    Обе семьи имеют вид B^T exp(A^T t) x, поэтому углы берутся в P-скалярном произведении
    (координаты R_P x). Сравниваются только sigma_i выше уровня шума округления обоих спектров.
    """
    spec = hankel_spectrum(sys, tol)
    _check_order(spec, n)
    dual = hankel_spectrum(adjoint(sys), tol)
    sigma1 = spec.sigma_at(1)
    scale = max(sigma1, np.finfo(float).tiny)
    noise = tol.rounding_margin * max(spec.rounding_floor(), dual.rounding_floor())
    resolved = int(np.count_nonzero((spec.sigma > noise) | (dual.sigma > noise)))
    sigma_defect = float(np.abs(spec.sigma[:resolved] - dual.sigma[:resolved]).max()) / scale if resolved else 0.0

    k = n
    multiplicity = False
    if 0 < n < spec.order and spec.sigma_at(n) - spec.sigma_at(n + 1) < tol.multiplicity * sigma1:
        multiplicity = True
        _, k = cluster_bounds(spec.sigma, n - 1, tol.multiplicity * sigma1)
        message = (f"sigma_{n} и sigma_{n + 1} почти совпадают: сравнение по кластеру "
                   f"из первых {k} функций")
        logger.warning(message)
        warnings.warn(message, MultiplicityWarning, stacklevel=2)
    k = min(k, spec.rank, dual.rank)

    max_angle = 0.0
    if k:
        RP = spec.gramians.RP
        inputs = RP @ (spec.gramians.RQ.T @ spec.U[:, :k]) / spec.sigma[:k]
        adjoint_outputs = RP @ dual.V[:, :k]
        angles = sla.subspace_angles(inputs, adjoint_outputs)
        max_angle = float(np.max(angles))

    passed = max_angle <= tol.angle and sigma_defect <= tol.attainment
    logger.info(f"{sys.name}: двойственность n={n}, угол {max_angle:.3e}, расхождение sigma {sigma_defect:.3e}")
    return DualityReport(n, k, max_angle, sigma_defect, multiplicity, passed, resolved)
