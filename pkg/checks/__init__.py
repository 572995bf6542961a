# checks/__init__.py

# 📂 Автоматический загрузчик наборов проверок 📂
#
# Сканирует папку 'checks', регистрирует все наборы инвариантов и запускает их
# для команды verify. Новый набор достаточно положить файлом в эту папку.
#
# Функционал:
# - Поиск наследников BaseCheck во всех модулях папки (кроме служебных).
# - default_corpus(): 20 систем random_stable с N из {2, 5, 10, 20} и разными (m, p).
# - default_families(): параметрическое семейство heat1d (N = 10) для набора parametric.
# - Неустойчивая система получает запись проверки 'input' вместо наборов инвариантов.
# - run_verification(): все применимые наборы для каждой системы, отчет без меток времени.
#
# Версия: 1.0
#

import importlib
import inspect
import logging
import os

import numpy as np

from core.errors import HankelToolkitError, UnstableSystemError
from core.system import ParametricLtiSystem, require_stable
from utils.run_config import parallel_map
from .base_check import BaseCheck, SystemContext

logger = logging.getLogger(__name__)

# Словарь наборов: {'имя': Класс}
available_checks = {}

package_dir = os.path.dirname(__file__)

for filename in sorted(os.listdir(package_dir)):
    if filename.endswith('.py') and filename not in ['__init__.py', 'base_check.py']:
        module_name = f"checks.{filename[:-3]}"

        try:
            module = importlib.import_module(module_name)

            for _, obj in inspect.getmembers(module, inspect.isclass):
                if issubclass(obj, BaseCheck) and obj is not BaseCheck and obj.name:
                    available_checks[obj.name] = obj
                    logger.debug(f"Загружен набор проверок '{obj.name}' из модуля '{module_name}'")

        except ImportError as e:
            logger.error(f"Ошибка импорта модуля {module_name}: {e}")

if not available_checks:
    logger.warning("Внимание: ни одного набора проверок не найдено в папке 'checks'.")

CORPUS_ORDERS = (2, 5, 10, 20)
CORPUS_CHANNELS = ((1, 1), (2, 2), (2, 1), (1, 3))
CORPUS_SIZE = 20

FAMILY_ORDERS = (10,)
INPUT_CHECK = 'input'


def default_corpus(seed=42):
    """Детерминированный корпус random_stable: N и (m, p) чередуются, seed каждой системы из SeedSequence."""
    from models import generate

    seeds = np.random.SeedSequence(seed).generate_state(CORPUS_SIZE)
    corpus = []
    for k in range(CORPUS_SIZE):
        N = CORPUS_ORDERS[k % len(CORPUS_ORDERS)]
        m, p = CORPUS_CHANNELS[(k // len(CORPUS_ORDERS)) % len(CORPUS_CHANNELS)]
        sys = generate('random_stable', N, seed=int(seeds[k]), inputs=m, outputs=p)
        corpus.append(sys.renamed(f"corpus_{k:02d}_N{N}_m{m}p{p}"))
    return corpus


def default_families():
    """Параметрические семейства встроенного корпуса: heat1d с диффузией kappa на [0.1, 10]."""
    from models import generate

    return [generate('heat1d', N) for N in FAMILY_ORDERS]


def checks_for(item):
    kind = 'parametric' if isinstance(item, ParametricLtiSystem) else 'lti'
    selected = [cls for cls in available_checks.values() if cls.kind == kind]
    return sorted(selected, key=lambda cls: (cls.order, cls.name))


def _input_record(item, tol):
    """Запись проверки входа для неустойчивой системы; None, если система устойчива."""
    try:
        require_stable(item, tol)
    except UnstableSystemError as e:
        logger.error(f"{item.name}: {e}")
        return {'check': INPUT_CHECK, 'passed': False,
                'metrics': {'error': type(e).__name__, 'message': str(e),
                            'spectral_abscissa': e.abscissa, 'stability_margin': e.margin}}
    return None


def rejected_input(system_report):
    """Отклонена ли система проверкой входа (отчет verify_item)."""
    return any(c['check'] == INPUT_CHECK and not c['passed'] for c in system_report['checks'])


def verify_item(item, tol, seed=42, draws=500, **params):
    kind = 'parametric' if isinstance(item, ParametricLtiSystem) else 'lti'
    if kind == 'lti':
        rejected = _input_record(item, tol)
        if rejected is not None:
            return {'name': item.name, 'kind': kind, 'checks': [rejected]}

    ctx = SystemContext(item, tol, seed, draws)
    results = []
    for cls in checks_for(item):
        check = cls(**params.get(cls.name, {}))
        try:
            results.append(check.run(ctx))
        except HankelToolkitError as e:
            logger.error(f"{item.name}: проверка '{cls.name}' прервана: {e}")
            results.append({'check': cls.name, 'passed': False,
                            'metrics': {'error': type(e).__name__, 'message': str(e)}})
    return {'name': item.name, 'kind': kind, 'checks': results}


def run_verification(items, tol, seed=42, draws=500, threads=None, **params):
    """Отчет проверки: {"seed", "tolerances", "systems": [...], "passed"}."""
    systems = parallel_map(lambda item: verify_item(item, tol, seed, draws, **params), items, threads)
    passed = all(c['passed'] for s in systems for c in s['checks'])
    return {'seed': seed, 'tolerances': tol.as_dict(), 'systems': systems, 'passed': passed}
