# models/base_model.py

# 🧱 Базовый шаблон генератора систем 🧱
#
# Каркас, на котором строятся все генераторы: имя модели, параметры по умолчанию
# и единый метод build(). Генератор не хранит состояния, поэтому один экземпляр
# можно использовать из нескольких потоков.
#
# Функционал:
# - Обязательные атрибуты: name (имя для CLI) и defaults (параметры по умолчанию).
# - resolve(): слияние параметров пользователя с defaults и проверка неизвестных имен.
# - build(): должен быть реализован в каждом генераторе.
#
# Версия: 1.0
#

from core.errors import BadParameterError


class BaseModel:
    """Базовый класс генераторов LTI-систем."""
    # --- КОНФИГУРАЦИЯ МОДЕЛИ (переопределяется в дочерних классах) ---
    name = None
    parametric = False
    defaults = {}

    def resolve(self, **params):
        unknown = set(params) - set(self.defaults)
        if unknown:
            raise BadParameterError(f"Модель '{self.name}' не знает параметров {sorted(unknown)}; "
                                    f"доступны {sorted(self.defaults)}")
        merged = dict(self.defaults)
        merged.update({k: v for k, v in params.items() if v is not None})
        return merged

    def build(self, order, rng, **params):
        """Возвращает LtiSystem или ParametricLtiSystem порядка order."""
        raise NotImplementedError("Метод `build` должен быть реализован в дочернем генераторе.")
