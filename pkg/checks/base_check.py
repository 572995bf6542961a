# checks/base_check.py

# 🧱 Базовый шаблон набора проверок 🧱
#
# Каждый набор проверяет группу инвариантов на одной системе и возвращает словарь
# {"check", "passed", "metrics"}. Дорогие общие величины (спектр Ганкеля) вычисляются
# один раз на систему и хранятся в SystemContext.
#
# Функционал:
# - SystemContext: система, допуски, seed и кэш спектра Ганкеля.
# - BaseCheck: имя, порядок запуска, тип систем (lti / parametric), параметры по умолчанию.
# - run() вызывает evaluate() и сохраняет результат; get_analysis() его возвращает.
#
# Версия: 1.0
#

import logging
from functools import cached_property

from core.hankel import hankel_spectrum

logger = logging.getLogger(__name__)


class SystemContext:
    def __init__(self, item, tol, seed=42, draws=500):
        self.item = item
        self.tol = tol
        self.seed = seed
        self.draws = draws

    @cached_property
    def spectrum(self):
        return hankel_spectrum(self.item, self.tol)

    def orders(self):
        """Порядки n для выборочных проверок: 1, N//2 и N-1 (без повторов, в пределах 1..N-1)."""
        N = self.item.n_states
        return sorted({n for n in (1, N // 2, N - 1) if 1 <= n <= N - 1})


class BaseCheck:
    """Базовый класс наборов проверок."""
    # --- КОНФИГУРАЦИЯ НАБОРА (переопределяется в дочерних классах) ---
    name = None
    kind = 'lti'
    order = 100
    params = {}

    def __init__(self, **params):
        self.p = dict(self.params)
        self.p.update(params)
        self.rets = None

    def evaluate(self, ctx):
        """Возвращает (passed, metrics). Реализуется в каждом наборе."""
        raise NotImplementedError("Метод `evaluate` должен быть реализован в дочернем наборе.")

    def run(self, ctx):
        passed, metrics = self.evaluate(ctx)
        self.rets = {'check': self.name, 'passed': bool(passed), 'metrics': metrics}
        level = logging.INFO if passed else logging.WARNING
        logger.log(level, f"{ctx.item.name}: проверка '{self.name}' {'пройдена' if passed else 'НЕ пройдена'}")
        return self.rets

    def get_analysis(self):
        return self.rets
