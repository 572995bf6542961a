# core/system.py

# 🏗️ Линейные стационарные системы 🏗️
#
# Типы данных для LTI-систем (A, B, C, D) и их аффинно-параметрических семейств,
# а также операции над ними: устойчивость, сопряженная система, соединения и
# вычисление системы в точке параметра.
#
# Функционал:
# - LtiSystem: неизменяемая реализация в пространстве состояний с проверкой размерностей.
# - ParametricLtiSystem: A(p) = A0 + sum_k p_k A_k (и так же B, C, D) на прямоугольнике параметров.
# - spectral_abscissa() / require_stable(): проверка асимптотической устойчивости.
# - adjoint(): реализация (A^T, C^T, B^T, D^T), оператор Ганкеля которой сопряжен исходному.
# - parallel(), series(), error_system(): соединения систем.
# - instantiate(): система в точке параметра (с обрезкой по границам прямоугольника).
#
# Версия: 1.0
#
# Начальное условие везде нулевое; неустойчивые системы можно создать,
# но аналитические операции их отвергают.
#

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from core.errors import BadParameterError, DimensionMismatchError, UnstableSystemError
from core.linalg import as_matrix, spectral_abscissa_of
from core.tolerances import DEFAULT_TOLERANCES

logger = logging.getLogger(__name__)


def _frozen(m):
    m = np.array(m, dtype=float)
    m.setflags(write=False)
    return m


@dataclass(frozen=True, eq=False)
class LtiSystem:
    """Система dz/dt = A z + B u, y = C z + D u. D=None означает нулевую матрицу."""
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray = None
    name: str = "system"

    def __post_init__(self):
        A = as_matrix(self.A, "A")
        B = as_matrix(self.B, "B")
        C = as_matrix(self.C, "C")
        n = A.shape[0]
        if A.shape != (n, n):
            raise DimensionMismatchError(f"A должна быть квадратной, получено {A.shape}")
        if B.shape[0] != n:
            raise DimensionMismatchError(f"B имеет {B.shape[0]} строк, ожидалось N={n}")
        if C.shape[1] != n:
            raise DimensionMismatchError(f"C имеет {C.shape[1]} столбцов, ожидалось N={n}")
        D = np.zeros((C.shape[0], B.shape[1])) if self.D is None else as_matrix(self.D, "D")
        if D.shape != (C.shape[0], B.shape[1]):
            raise DimensionMismatchError(f"D имеет форму {D.shape}, ожидалось {(C.shape[0], B.shape[1])}")
        for key, value in (("A", A), ("B", B), ("C", C), ("D", D)):
            object.__setattr__(self, key, _frozen(value))

    @property
    def n_states(self):
        return self.A.shape[0]

    @property
    def n_inputs(self):
        return self.B.shape[1]

    @property
    def n_outputs(self):
        return self.C.shape[0]

    def spectral_abscissa(self, tol=DEFAULT_TOLERANCES):
        return spectral_abscissa(self, tol)

    def is_stable(self, tol=DEFAULT_TOLERANCES):
        return self.spectral_abscissa(tol) < -tol.stability_margin

    def renamed(self, name):
        return LtiSystem(self.A, self.B, self.C, self.D, name=name)

    def allclose(self, other, rtol=0.0, atol=0.0):
        """Поэлементное сравнение реализаций (по умолчанию точное)."""
        return all(
            x.shape == y.shape and np.allclose(x, y, rtol=rtol, atol=atol)
            for x, y in zip(self.matrices(), other.matrices())
        )

    def matrices(self):
        return self.A, self.B, self.C, self.D

    def __repr__(self):
        return (f"LtiSystem(name={self.name!r}, N={self.n_states}, "
                f"m={self.n_inputs}, p={self.n_outputs})")


@dataclass(frozen=True)
class ParameterRange:
    name: str
    min: float
    max: float

    def __post_init__(self):
        if not (np.isfinite(self.min) and np.isfinite(self.max)) or self.min > self.max:
            raise BadParameterError(f"Параметр '{self.name}': некорректный диапазон [{self.min}, {self.max}]")

    @property
    def midpoint(self):
        return 0.5 * (self.min + self.max)


@dataclass(frozen=True, eq=False)
class ParametricLtiSystem:
    """Аффинное семейство: M(p) = M_0 + sum_k p_k M_k для M in {A, B, C, D}."""
    base: LtiSystem
    terms: tuple
    box: tuple
    name: str = "family"
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        terms = tuple(self.terms)
        box = tuple(self.box)
        if not box:
            raise BadParameterError("Прямоугольник параметров пуст")
        if len(terms) != len(box):
            raise DimensionMismatchError(
                f"Число слагаемых ({len(terms)}) не равно числу параметров ({len(box)})")
        shape = [m.shape for m in self.base.matrices()]
        for k, term in enumerate(terms):
            if [m.shape for m in term.matrices()] != shape:
                raise DimensionMismatchError(
                    f"Слагаемое {k} ('{box[k].name}') не согласовано с базовой системой по размерностям")
        object.__setattr__(self, 'terms', terms)
        object.__setattr__(self, 'box', box)

    @property
    def n_parameters(self):
        return len(self.box)

    @property
    def parameter_names(self):
        return [r.name for r in self.box]

    def midpoint(self):
        return np.array([r.midpoint for r in self.box])

    def __repr__(self):
        return (f"ParametricLtiSystem(name={self.name!r}, N={self.base.n_states}, "
                f"parameters={self.parameter_names})")


def spectral_abscissa(sys, tol=DEFAULT_TOLERANCES):
    """Максимальная вещественная часть собственных значений A."""
    return spectral_abscissa_of(sys.A, tol)


def require_stable(sys, tol=DEFAULT_TOLERANCES):
    """Проверяет асимптотическую устойчивость, возвращает спектральную абсциссу."""
    alpha = spectral_abscissa(sys, tol)
    if alpha >= -tol.stability_margin:
        raise UnstableSystemError(alpha, tol.stability_margin)
    return alpha


def adjoint(sys):
    return LtiSystem(sys.A.T, sys.C.T, sys.B.T, sys.D.T, name=f"{sys.name}*")


def parallel(sys1, sys2, name=None):
    """Сумма выходов двух систем с общим входом."""
    if (sys1.n_inputs, sys1.n_outputs) != (sys2.n_inputs, sys2.n_outputs):
        raise DimensionMismatchError(
            f"Нельзя соединить параллельно системы с (m, p) = "
            f"{(sys1.n_inputs, sys1.n_outputs)} и {(sys2.n_inputs, sys2.n_outputs)}")
    return LtiSystem(
        sla.block_diag(sys1.A, sys2.A),
        np.vstack([sys1.B, sys2.B]),
        np.hstack([sys1.C, sys2.C]),
        sys1.D + sys2.D,
        name=name or f"{sys1.name}+{sys2.name}",
    )


def series(sys1, sys2, name=None):
    """Последовательное соединение: выход sys1 подается на вход sys2."""
    if sys1.n_outputs != sys2.n_inputs:
        raise DimensionMismatchError(
            f"Выходов первой системы {sys1.n_outputs}, а входов второй {sys2.n_inputs}")
    n1, n2 = sys1.n_states, sys2.n_states
    A = np.block([
        [sys1.A, np.zeros((n1, n2))],
        [sys2.B @ sys1.C, sys2.A],
    ])
    B = np.vstack([sys1.B, sys2.B @ sys1.D])
    C = np.hstack([sys2.D @ sys1.C, sys2.C])
    return LtiSystem(A, B, C, sys2.D @ sys1.D, name=name or f"{sys2.name}*{sys1.name}")


def negated(sys):
    return LtiSystem(sys.A, sys.B, -sys.C, -sys.D, name=f"-{sys.name}")


def error_system(sys1, sys2):
    """Реализация разности sys1 - sys2: A = diag(A1, A2), C = [C1, -C2], D = D1 - D2."""
    return parallel(sys1, negated(sys2), name=f"{sys1.name}-{sys2.name}")


def scaled(sys, factor):
    """Система с выходом, умноженным на factor (сингулярные числа Ганкеля растут в |factor| раз)."""
    return LtiSystem(sys.A, sys.B, factor * sys.C, factor * sys.D, name=f"{factor}*{sys.name}")


def instantiate(psys, p):
    """Система семейства в точке p; точки вне прямоугольника обрезаются с предупреждением."""
    p = np.atleast_1d(np.asarray(p, dtype=float))
    if p.shape != (psys.n_parameters,):
        raise DimensionMismatchError(
            f"Точка параметра имеет размерность {p.shape}, ожидалось ({psys.n_parameters},)")
    lo = np.array([r.min for r in psys.box])
    hi = np.array([r.max for r in psys.box])
    clipped = np.clip(p, lo, hi)
    if not np.array_equal(clipped, p):
        logger.warning(f"Точка {p.tolist()} вне прямоугольника параметров, обрезана до {clipped.tolist()}")
        p = clipped

    mats = [np.array(m) for m in psys.base.matrices()]
    for pk, term in zip(p, psys.terms):
        for acc, coef in zip(mats, term.matrices()):
            acc += pk * coef
    label = ",".join(f"{r.name}={v:.6g}" for r, v in zip(psys.box, p))
    return LtiSystem(*mats, name=f"{psys.name}[{label}]")
