# utils/report_generator.py

# 📊 Генератор отчетов 📊
#
# Модуль превращает результаты вычислений в машиночитаемые таблицы (CSV, JSON) и в понятные
# человеку текстовые отчеты. Вывод детерминирован: ни в данных, ни в именах файлов нет
# текущего времени, поэтому повторный запуск с тем же seed дает побайтно тот же результат.
#
# Функционал:
# - CSV: заголовок, 17 значащих цифр, разделитель запятая, окончания строк LF (pandas.to_csv).
# - JSON: отсортированные ключи, числа через repr, массивы numpy приводятся к спискам.
# - Таблицы: sigma_i системы, отчет о поперечнике, развертка по сетке параметров.
# - Текстовый отчет '<команда>_<система>_<seed>.txt' в папке отчетов.
#
# Версия: 1.0
#

import dataclasses
import json
import logging
import math
import os

import numpy as np
import pandas as pd

logger = logging.getLogger(__name__)

FLOAT_FORMAT = '%.17g'


def to_plain(value):
    """Рекурсивно приводит dataclass, numpy и кортежи к типам, понятным json."""
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        return {f.name: to_plain(getattr(value, f.name)) for f in dataclasses.fields(value)}
    if isinstance(value, dict):
        return {str(k): to_plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_plain(value.tolist())
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    return value


def to_json(data):
    return json.dumps(to_plain(data), sort_keys=True, indent=1) + '\n'


def to_csv(df):
    return df.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator='\n')


def hsv_table(spec):
    return pd.DataFrame({'i': np.arange(1, spec.order + 1), 'sigma': spec.sigma})


def record_table(record):
    """Одна строка из плоского словаря или dataclass (вложенные значения пропускаются)."""
    plain = to_plain(record)
    return pd.DataFrame([{k: v for k, v in plain.items() if not isinstance(v, (list, dict))}])


def sweep_table(res):
    """Столбцы: параметры, затем sigma_1..sigma_N; только включенные точки."""
    names = res.psys.parameter_names
    df = pd.DataFrame(res.included, columns=names)
    sig = res.sigma_table[res.stable]
    for i in range(res.order):
        df[f"sigma_{i + 1}"] = sig[:, i]
    return df


def lower_bound_line(res, n):
    point = ", ".join(f"{name}={value!r}" for name, value in zip(res.psys.parameter_names, res.argmax(n).tolist()))
    return f"# lower_bound(n={n}) = {res.lower_bound(n)!r} at {point}\n"


def _fmt(value):
    if value is None:
        return "N/A"
    if isinstance(value, bool):
        return "да" if value else "нет"
    if isinstance(value, float):
        return "inf" if math.isinf(value) else f"{value:.10g}"
    return str(value)


def generate_text_report(command, system_name, seed, title, rows, reports_dir):
    """Сохраняет текстовый отчет и возвращает путь к нему."""
    report_lines = [
        f"--- {title}: {system_name} ---",
        f"Команда: {command}",
        f"Seed: {seed}",
        "--- РЕЗУЛЬТАТЫ ---",
        *[f"{label}: {_fmt(value)}" for label, value in rows],
        "--------------------------------------------------",
    ]
    report_content = "\n".join(report_lines) + "\n"

    os.makedirs(reports_dir, exist_ok=True)
    safe_name = "".join(ch if ch.isalnum() or ch in '-_.' else '_' for ch in system_name)
    filepath = os.path.join(reports_dir, f"{command}_{safe_name}_{seed}.txt")
    with open(filepath, 'w', encoding='utf-8', newline='\n') as f:
        f.write(report_content)
    logger.info(f"Отчет сохранен в: {filepath}")
    return filepath
