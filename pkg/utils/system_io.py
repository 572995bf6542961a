# utils/system_io.py

# 📄 Чтение и запись систем в формате JSON 📄
#
# "Переводчик" между файлами и типами пакета. Формат фиксирован по именам полей:
#     {"A": [[...]], "B": [[...]], "C": [[...]], "D": [[...]]}                 - LTI-система
#     {"base": {...}, "terms": [{...}], "parameters": [{"name", "min", "max"}]} - семейство
# Отсутствующая D означает нулевую матрицу; в слагаемых семейства отсутствующая матрица - нуль.
# Числа записываются как repr(float), поэтому запись и чтение сохраняют значения побитово.
#
# Функционал:
# - load_system() / load_parametric() / load_any(): чтение с проверкой структуры.
# - system_to_dict() / parametric_to_dict(): представление для json.dump.
# - save(): запись файла (UTF-8, отсортированные ключи).
# - load_corpus(): все *.json каталога в алфавитном порядке.
#
# Версия: 1.0
#

import json
import logging
import os

import numpy as np

from core.errors import SystemFormatError
from core.system import LtiSystem, ParameterRange, ParametricLtiSystem

logger = logging.getLogger(__name__)

MATRIX_FIELDS = ('A', 'B', 'C', 'D')


def _matrix(data, key, where):
    if key not in data:
        raise SystemFormatError(f"{where}: отсутствует поле '{key}'")
    value = data[key]
    if not isinstance(value, list) or not all(isinstance(row, list) for row in value):
        raise SystemFormatError(f"{where}: поле '{key}' должно быть списком строк матрицы")
    if len({len(row) for row in value}) > 1:
        raise SystemFormatError(f"{where}: строки матрицы '{key}' имеют разную длину")
    try:
        m = np.array(value, dtype=float)
    except (TypeError, ValueError) as e:
        raise SystemFormatError(f"{where}: поле '{key}' содержит не числа: {e}") from e
    if m.ndim != 2 or m.size == 0:
        raise SystemFormatError(f"{where}: матрица '{key}' должна быть непустой и двумерной")
    if not np.all(np.isfinite(m)):
        raise SystemFormatError(f"{where}: матрица '{key}' содержит NaN или бесконечность")
    return m


def system_from_dict(data, name="system", where="system"):
    if not isinstance(data, dict):
        raise SystemFormatError(f"{where}: ожидается JSON-объект")
    A = _matrix(data, 'A', where)
    B = _matrix(data, 'B', where)
    C = _matrix(data, 'C', where)
    D = _matrix(data, 'D', where) if 'D' in data else None
    return LtiSystem(A, B, C, D, name=name)


def _term_from_dict(data, base, where):
    if not isinstance(data, dict):
        raise SystemFormatError(f"{where}: ожидается JSON-объект")
    mats = [
        _matrix(data, key, where) if key in data else np.zeros_like(ref)
        for key, ref in zip(MATRIX_FIELDS, base.matrices())
    ]
    return LtiSystem(*mats, name=where)


def parametric_from_dict(data, name="family"):
    if not isinstance(data, dict):
        raise SystemFormatError("Семейство: ожидается JSON-объект")
    for key in ('base', 'terms', 'parameters'):
        if key not in data:
            raise SystemFormatError(f"Семейство: отсутствует поле '{key}'")
    if not isinstance(data['terms'], list) or not isinstance(data['parameters'], list):
        raise SystemFormatError("Семейство: поля 'terms' и 'parameters' должны быть списками")

    base = system_from_dict(data['base'], name=f"{name}_base", where="base")
    terms = [_term_from_dict(t, base, f"terms[{k}]") for k, t in enumerate(data['terms'])]
    box = []
    for k, prm in enumerate(data['parameters']):
        if not isinstance(prm, dict) or not {'name', 'min', 'max'} <= set(prm):
            raise SystemFormatError(f"parameters[{k}]: нужны поля 'name', 'min', 'max'")
        try:
            box.append(ParameterRange(str(prm['name']), float(prm['min']), float(prm['max'])))
        except (TypeError, ValueError) as e:
            raise SystemFormatError(f"parameters[{k}]: некорректные границы: {e}") from e
    return ParametricLtiSystem(base, tuple(terms), tuple(box), name=name)


def _read_json(path):
    with open(path, 'r', encoding='utf-8') as f:
        return json.load(f)


def _stem(path):
    return os.path.splitext(os.path.basename(path))[0]


def load_system(path):
    data = _read_json(path)
    if isinstance(data, dict) and 'base' in data:
        raise SystemFormatError(f"{path}: файл описывает параметрическое семейство, а ожидалась система")
    sys = system_from_dict(data, name=_stem(path), where=path)
    logger.info(f"Загружена система '{sys.name}': N={sys.n_states}, m={sys.n_inputs}, p={sys.n_outputs}")
    return sys


def load_parametric(path):
    psys = parametric_from_dict(_read_json(path), name=_stem(path))
    logger.info(f"Загружено семейство '{psys.name}': параметры {psys.parameter_names}")
    return psys


def load_any(path):
    data = _read_json(path)
    if isinstance(data, dict) and 'base' in data:
        return parametric_from_dict(data, name=_stem(path))
    return system_from_dict(data, name=_stem(path), where=path)


def load_corpus(directory):
    """Все системы каталога (семейства пропускаются с предупреждением)."""
    systems = []
    for filename in sorted(os.listdir(directory)):
        if not filename.endswith('.json'):
            continue
        item = load_any(os.path.join(directory, filename))
        if isinstance(item, ParametricLtiSystem):
            logger.warning(f"Файл {filename} описывает семейство и пропущен при проверке корпуса")
            continue
        systems.append(item)
    if not systems:
        raise SystemFormatError(f"В каталоге {directory} нет файлов систем *.json")
    return systems


def system_to_dict(sys):
    return {key: m.tolist() for key, m in zip(MATRIX_FIELDS, sys.matrices())}


def parametric_to_dict(psys):
    return {
        'base': system_to_dict(psys.base),
        'terms': [system_to_dict(t) for t in psys.terms],
        'parameters': [{'name': r.name, 'min': r.min, 'max': r.max} for r in psys.box],
    }


def to_dict(item):
    return parametric_to_dict(item) if isinstance(item, ParametricLtiSystem) else system_to_dict(item)


def save(item, path):
    data = to_dict(item)
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, 'w', encoding='utf-8', newline='\n') as f:
        json.dump(data, f, sort_keys=True, indent=1)
        f.write('\n')
    logger.info(f"Система '{item.name}' сохранена в {path}")
    return path
