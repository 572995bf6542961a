# models/__init__.py

# 📂 Автоматический загрузчик генераторов систем 📂
#
# Этот файл сканирует папку 'models', находит в ней все генераторы тестовых систем
# и делает их доступными по имени для команды generate и для корпуса проверки.
# Чтобы добавить новый генератор, достаточно положить его файл в эту папку.
#
# Функционал:
# - Сканирует папку 'models' на наличие Python-файлов.
# - Игнорирует системные файлы ('__init__.py', 'base_model.py').
# - Находит внутри каждого файла наследников BaseModel и регистрирует их по атрибуту name.
# - generate(): строит систему выбранной модели по порядку, seed и параметрам.
#
# Версия: 1.0
#

import importlib
import inspect
import logging
import os

import numpy as np

from core.errors import BadParameterError
from .base_model import BaseModel

logger = logging.getLogger(__name__)

# Словарь доступных генераторов: {'имя_модели': Класс}
available_models = {}

package_dir = os.path.dirname(__file__)

for filename in sorted(os.listdir(package_dir)):
    if filename.endswith('.py') and filename not in ['__init__.py', 'base_model.py']:
        module_name = f"models.{filename[:-3]}"

        try:
            module = importlib.import_module(module_name)

            for _, obj in inspect.getmembers(module, inspect.isclass):
                if issubclass(obj, BaseModel) and obj is not BaseModel and obj.name:
                    available_models[obj.name] = obj
                    logger.debug(f"Загружен генератор '{obj.name}' из модуля '{module_name}'")

        except ImportError as e:
            logger.error(f"Ошибка импорта модуля {module_name}: {e}")

if not available_models:
    logger.warning("Внимание: ни одного генератора не найдено в папке 'models'.")


def generate(model, order, seed=42, **params):
    """LtiSystem или ParametricLtiSystem модели model порядка order."""
    if model not in available_models:
        raise BadParameterError(f"Модель '{model}' не найдена. Доступные модели: {sorted(available_models)}")
    if int(order) != order or order < 1:
        raise BadParameterError(f"Порядок системы должен быть целым >= 1, получено {order}")
    rng = np.random.default_rng(seed)
    return available_models[model]().build(int(order), rng, **params)
