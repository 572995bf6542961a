# utils/run_config.py

# ⚙️ Конфигурация запуска и параллельные вычисления ⚙️
#
# Один запуск CLI описывается неизменяемым объектом RunConfig. Одинаковый RunConfig
# (включая seed) дает побитово одинаковые числа на выходе, поэтому все случайные
# генераторы порождаются из одного SeedSequence, а параллельная обработка возвращает
# результаты строго в порядке входа.
#
# Функционал:
# - RunConfig: команда, пути, формат вывода, seed, допуски, число проб и сетка.
# - thread_count(): ограничение параллелизма из переменной окружения HW_THREADS.
# - parallel_map(): map на пуле потоков с сохранением порядка.
# - spawn_generators(): независимые генераторы numpy из одного seed.
#
# Версия: 1.0
#

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from core.errors import BadParameterError
from core.tolerances import DEFAULT_TOLERANCES, Tolerances

logger = logging.getLogger(__name__)

# Фиксированный размер порции случайных проб: разбиение не зависит от числа потоков
DRAW_CHUNK = 250


@dataclass(frozen=True)
class RunConfig:
    command: str
    system: str = None
    parametric: str = None
    corpus: str = None
    out: str = None
    format: str = 'json'
    seed: int = 42
    tolerances: Tolerances = field(default=DEFAULT_TOLERANCES)
    draws: int = 500
    order: int = None
    grid: tuple = None
    method: str = 'ohna'
    radius: float = 1.0
    report_dir: str = None

    def __post_init__(self):
        if self.format not in ('json', 'csv'):
            raise BadParameterError(f"Неизвестный формат вывода '{self.format}'")
        if self.seed < 0:
            raise BadParameterError(f"seed должен быть неотрицательным, получено {self.seed}")
        if not self.radius > 0.0:
            raise BadParameterError(f"Радиус допустимого множества должен быть положительным: {self.radius}")
        if self.draws < 0:
            raise BadParameterError(f"Число проб не может быть отрицательным: {self.draws}")


def thread_count():
    """Число рабочих потоков: HW_THREADS, а 0 или отсутствие переменной означает все ядра."""
    raw = os.environ.get('HW_THREADS', '').strip()
    if not raw:
        return os.cpu_count() or 1
    try:
        value = int(raw)
    except ValueError as e:
        raise BadParameterError(f"HW_THREADS должно быть целым числом, получено '{raw}'") from e
    if value < 0:
        raise BadParameterError(f"HW_THREADS не может быть отрицательным: {value}")
    return value or (os.cpu_count() or 1)


def parallel_map(func, items, threads=None):
    """Применяет func к каждому элементу; результат упорядочен как items."""
    items = list(items)
    workers = min(threads or thread_count(), len(items))
    if workers <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(func, items))


def spawn_generators(seed, count):
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(count)]


def draw_chunks(total):
    """Размеры порций для total проб (последняя порция может быть неполной)."""
    full, rest = divmod(total, DRAW_CHUNK)
    return [DRAW_CHUNK] * full + ([rest] if rest else [])
