# core/tolerances.py

# 📏 Политика допусков 📏
#
# Все численные пороги библиотеки собраны в одном неизменяемом объекте. Объект передается
# во все операции параметром tol, поэтому каждую проверку теоремы можно выполнить
# с явно заданным запасом и переопределить пороги из командной строки.
#
# Функционал:
# - Dataclass Tolerances со значениями по умолчанию для всех модулей.
# - override(**kw) возвращает копию с измененными полями.
# - from_pairs(["name=value", ...]) разбирает переопределения из CLI.
#
# Версия: 1.0
#

import dataclasses
from dataclasses import dataclass

from core.errors import BadParameterError


@dataclass(frozen=True)
class Tolerances:
    # --- linalg ---
    factorization: float = 1e-12      # невязка Шура/SVD/eigh (относительная)
    expm: float = 1e-11
    solve: float = 1e-11
    max_condition: float = 1e14       # выше этого числа обусловленности матрица вырождена
    symmetry: float = 1e-10           # допустимая несимметричность входа symmetric_eig
    schur_sweeps: int = 30            # бюджет итераций QR: sweeps * rows

    # --- system / gramian ---
    stability_margin: float = 1e-8    # устойчива, если абсцисса < -stability_margin
    lyapunov: float = 1e-10           # относительная невязка уравнения Ляпунова
    psd_clip: float = 1e-10           # отрицательные собственные числа до -psd_clip*||X|| обнуляются

    # --- hankel ---
    zero_sigma: float = 1e-12         # sigma_i < zero_sigma*sigma_1 считается нулем
    hankel_eig: float = 1e-8          # невязка PQ v = sigma^2 v и Q-ортонормальность
    truncation_decay: float = 1e12    # горизонт T = ln(truncation_decay)/|alpha|
    discretization: float = 1e-3      # совпадение sigma с сингулярными числами дискретизации
    rounding_margin: float = 10.0     # метрика проверяется, если шум округления меньше допуска/margin

    # --- widths / reduction / parametric ---
    lower_bound: float = 1e-8         # запас в неравенстве e >= sigma_{n+1} - lower_bound*sigma_1
    attainment: float = 1e-10
    multiplicity: float = 1e-8        # кластер кратных sigma (относительно sigma_1)
    angle: float = 1e-6               # главные углы в проверке двойственности
    minimality: float = 1e-10         # sigma_N > minimality*sigma_1, иначе система неминимальна
    truncation_gap: float = 1e-10     # зазор sigma_n - sigma_{n+1} для сбалансированного усечения
    optimal_error: float = 1e-6       # относительная точность ошибки оптимального приближения
    continuity_factor: float = 10.0   # скачок > factor * медианы считается разрывом
    continuity_floor: float = 1e-8    # относительные скачки ниже порога считаются шумом

    def override(self, **changes):
        unknown = set(changes) - {f.name for f in dataclasses.fields(self)}
        if unknown:
            raise BadParameterError(f"Неизвестные допуски: {sorted(unknown)}")
        return dataclasses.replace(self, **changes)

    @classmethod
    def from_pairs(cls, pairs, base=None):
        """Разбирает список строк вида 'lyapunov=1e-9'."""
        base = base or DEFAULT_TOLERANCES
        types = {f.name: f.type for f in dataclasses.fields(cls)}
        changes = {}
        for pair in pairs or []:
            name, sep, value = pair.partition('=')
            name = name.strip()
            if not sep or name not in types:
                raise BadParameterError(f"Некорректное переопределение допуска: '{pair}'")
            try:
                changes[name] = int(value) if types[name] in (int, 'int') else float(value)
            except ValueError as e:
                raise BadParameterError(f"Допуск '{name}' должен быть числом, получено '{value}'") from e
        return base.override(**changes)

    def as_dict(self):
        return dataclasses.asdict(self)


DEFAULT_TOLERANCES = Tolerances()
