"""
Иерархия исключений симулятора.

Все доменные ошибки наследуются от ValueError: сервисы бросают их,
CLI-слой превращает в диагностику и ненулевой код выхода.
"""


class SpikeSimError(ValueError):
    """Базовая ошибка симулятора"""


# =========================
# ФИЛЬТРЫ И ДАННЫЕ
# =========================

class KernelError(SpikeSimError):
    """Некорректный масштаб или вырожденный шаблон фильтра"""


class ShapeMismatchError(SpikeSimError):
    """Размеры массивов не совпадают"""


class SceneError(SpikeSimError):
    """Некорректная или пустая сцена"""


class ModelMismatchError(SpikeSimError):
    """Операция не подходит для модели сэмплирования"""


class TimeOrderError(SpikeSimError):
    """Время должно строго возрастать"""


class UnknownScaleError(SpikeSimError):
    """Масштаб отсутствует в банке"""


class MetricInputError(SpikeSimError):
    """Некорректные входные данные метрики"""


class ReferenceRequiredError(SpikeSimError):
    """Для коррекции яркости нужна эталонная последовательность"""


class ConfigError(SpikeSimError):
    """Конфигурация не прошла валидацию"""


# =========================
# ФОРМАТ .spk
# =========================

class SpikeFormatError(SpikeSimError):
    """Ошибка формата файла спайков"""


class BadMagicError(SpikeFormatError):
    """Неверная сигнатура файла"""


class UnsupportedVersionError(SpikeFormatError):
    """Неподдерживаемая версия формата"""


class InvalidCodeError(SpikeFormatError):
    """В данных встретился зарезервированный код 11"""


class TruncatedStreamError(SpikeFormatError):
    """Поток оборвался раньше, чем ожидалось"""


class TrailingDataError(SpikeFormatError):
    """После последней плоскости остались лишние байты"""


class InvalidHeaderError(SpikeFormatError):
    """Значения в заголовке вне допустимого диапазона"""
