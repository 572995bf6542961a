# core/errors.py

# 🚨 Исключения и коды выхода 🚨
#
# Единая иерархия ошибок библиотеки. Каждая ошибка относится к одной из трех групп:
# предметная (неустойчивая система, несовпадение размерностей), численная (нет сходимости,
# вырожденная матрица) или ошибка формата входных данных. По группе CLI выбирает код выхода.
#
# Функционал:
# - Базовый класс HankelToolkitError и три группы: DomainError, NumericalError, SystemFormatError.
# - Конкретные ошибки, которые называет контракт операций (Unstable, Singular и т.д.).
# - Предупреждение MultiplicityWarning для кратных сингулярных чисел.
# - Функция exit_code_for() для перевода исключения в код выхода CLI.
#
# Версия: 1.0
#

import json

EXIT_OK = 0
EXIT_DOMAIN = 2
EXIT_IO = 3
EXIT_NUMERICAL = 4
EXIT_USAGE = 5         # ошибка разбора командной строки (argparse)


class HankelToolkitError(Exception):
    """Базовое исключение пакета."""


# --- Предметные ошибки (код 2) ---

class DomainError(HankelToolkitError):
    """Нарушено предусловие операции."""


class UnstableSystemError(DomainError):
    def __init__(self, abscissa, margin):
        self.abscissa = abscissa
        self.margin = margin
        super().__init__(f"Система не асимптотически устойчива: спектральная абсцисса "
                         f"{abscissa:.6g} >= {-margin:.3g}")


class DimensionMismatchError(DomainError):
    pass


class BadParameterError(DomainError):
    pass


class BadOrderError(DomainError):
    pass


class IndexOutOfRangeError(DomainError):
    pass


class ZeroSingularValueError(DomainError):
    pass


class NotSymmetricError(DomainError):
    pass


class AllPointsUnstableError(DomainError):
    pass


# --- Численные ошибки (код 4) ---

class NumericalError(HankelToolkitError):
    """Численный алгоритм не дал результата с требуемой точностью."""


class NonConvergenceError(NumericalError):
    pass


class MatrixOverflowError(NumericalError):
    pass


class SingularMatrixError(NumericalError):
    pass


class SylvesterSingularError(SingularMatrixError):
    pass


class DegenerateGammaError(NumericalError):
    pass


class NotPositiveSemidefiniteError(NumericalError):
    pass


class CertificateError(NumericalError):
    """Численный сертификат (неравенство теоремы) не выполнен."""


# --- Ошибки формата (код 3) ---

class SystemFormatError(HankelToolkitError):
    """Некорректный JSON-файл системы."""


class MultiplicityWarning(UserWarning):
    """Сингулярные числа на границе подпространства практически совпадают."""


def exit_code_for(exc):
    """Код выхода CLI для исключения; None, если исключение не из контракта."""
    if isinstance(exc, DomainError):
        return EXIT_DOMAIN
    if isinstance(exc, NumericalError):
        return EXIT_NUMERICAL
    if isinstance(exc, (SystemFormatError, OSError, json.JSONDecodeError)):
        return EXIT_IO
    return None
