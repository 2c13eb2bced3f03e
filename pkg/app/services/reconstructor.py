import logging

import numpy as np

from app.models.coefficients import CoefficientGrid
from app.models.kernel import FilterBank
from app.models.scene import SceneStream
from app.models.volume import SpikeVolume
from app.schemas.reconstruction import BrightnessAdjust, ReconstructionConfig
from app.schemas.sampler import SamplingModel
from app.services.convolution import ClippedFilter
from app.services.filter_bank import bank_for_volume
from app.utils.errors import (
    ModelMismatchError,
    ReferenceRequiredError,
    ShapeMismatchError,
    TimeOrderError,
)

logger = logging.getLogger(__name__)

# Средняя яркость ниже этого значения считается нулевой
BRIGHTNESS_EPS = 1e-12

PIXEL_MIN = 0.0
PIXEL_MAX = 255.0

# =========================
# FSM: TFI
# =========================

def tfi_frame(volume: SpikeVolume, t: int) -> np.ndarray:
    """
    Кадр TFI (texture from inter-spike interval) в момент t

    Для каждого пикселя: phi / (t_k - t_{k-1}), где t_k — последний спайк
    не позже t, а t_0 = 0. Пиксели без спайков равны 0.

    Raises:
        ModelMismatchError: Поток не FSM
        TimeOrderError: t вне [1, T]
    """
    if volume.model != SamplingModel.FSM:
        raise ModelMismatchError("TFI reconstruction needs an FSM spike volume")
    if not 1 <= t <= volume.length:
        raise TimeOrderError(f"t must be in [1, {volume.length}], got {t}")

    fired = volume.spikes[:t, 0] > 0
    times = np.arange(1, t + 1, dtype=np.int64)[:, None, None]
    last = np.where(fired, times, 0).max(axis=0)
    previous = np.where(fired & (times < last), times, 0).max(axis=0)

    frame = np.zeros((volume.height, volume.width), dtype=np.float64)
    has_spike = last > 0
    frame[has_spike] = volume.thresholds[0] / (last[has_spike] - previous[has_spike])
    return frame


class _TfiTracker:
    """Последний и предпоследний спайк каждого пикселя по мере чтения потока"""

    def __init__(self, phi: float, height: int, width: int):
        self.phi = phi
        self.last = np.zeros((height, width), dtype=np.int64)
        self.previous = np.zeros((height, width), dtype=np.int64)

    def push(self, plane: np.ndarray, t: int) -> np.ndarray:
        fired = plane > 0
        self.previous[fired] = self.last[fired]
        self.last[fired] = t

        frame = np.zeros(self.last.shape, dtype=np.float64)
        has_spike = self.last > 0
        frame[has_spike] = self.phi / (self.last[has_spike] - self.previous[has_spike])
        return frame

# =========================
# RVSM: КОЭФФИЦИЕНТЫ И СИНТЕЗ
# =========================

def update_coefficients(
    grid: CoefficientGrid,
    planes: np.ndarray,
    t: int,
    thresholds: tuple[float, ...],
) -> CoefficientGrid:
    """
    Обновить оценки K по спайкам момента t

    При спайке +1 (-1): K = +phi / (t - t_pre) (-phi / ...), t_pre = t.
    Без спайка K и t_pre не меняются.

    Raises:
        TimeOrderError: t не больше предыдущего момента
        ShapeMismatchError: Размер плоскостей не совпадает с сеткой
    """
    if t <= grid.t:
        raise TimeOrderError(f"Coefficient update at t={t} after t={grid.t}")
    if planes.shape != grid.shape:
        raise ShapeMismatchError(f"Spike planes {planes.shape} do not match grid {grid.shape}")

    phi = np.broadcast_to(np.asarray(thresholds, dtype=np.float64)[:, None, None], grid.shape)
    positive = planes > 0
    negative = planes < 0
    fired = positive | negative
    interval = t - grid.last_fire

    grid.K[positive] = phi[positive] / interval[positive]
    grid.K[negative] = -phi[negative] / interval[negative]
    grid.last_fire[fired] = t
    grid.t = t
    return grid


class ReconstructorService:
    """
    CONTROLLER: Реконструкция кадров из потока спайков
    """

    def __init__(self, bank: FilterBank, height: int, width: int):
        self.bank = bank
        self.filters = [ClippedFilter(kernel, height, width) for kernel in bank.kernels]

    def synthesize_frame(self, grid: CoefficientGrid) -> np.ndarray:
        """
        Кадр как сумма по масштабам и центрам K * w (обратное преобразование)
        """
        if grid.shape[0] != len(self.filters):
            raise ShapeMismatchError(
                f"Grid has {grid.shape[0]} scales, bank has {len(self.filters)}"
            )
        frame = np.zeros(grid.shape[1:], dtype=np.float64)
        for scale_index, clipped in enumerate(self.filters):
            frame += clipped.synthesize(grid.K[scale_index])
        return frame


def synthesize_frame(grid: CoefficientGrid, bank: FilterBank) -> np.ndarray:
    _, height, width = grid.shape
    return ReconstructorService(bank, height, width).synthesize_frame(grid)

# =========================
# КОРРЕКЦИЯ ЯРКОСТИ
# =========================

def match_mean(frame: np.ndarray, reference: np.ndarray) -> np.ndarray:
    """
    Умножить кадр на mean(ref) / mean(rec); при нулевом среднем кадр не меняется
    """
    mean = frame.mean()
    if abs(mean) <= BRIGHTNESS_EPS:
        return frame
    return frame * (reference.mean() / mean)


def match_mean_std(frame: np.ndarray, reference: np.ndarray) -> np.ndarray:
    """
    Привести среднее и стандартное отклонение к эталону
    """
    mean, std = frame.mean(), frame.std()
    if std <= BRIGHTNESS_EPS:
        return frame - mean + reference.mean()
    return (frame - mean) * (reference.std() / std) + reference.mean()


_ADJUSTERS = {
    BrightnessAdjust.MATCH_MEAN: match_mean,
    BrightnessAdjust.MATCH_MEAN_STD: match_mean_std,
}

# =========================
# ПОСЛЕДОВАТЕЛЬНОСТЬ
# =========================

def reconstruct_sequence(
    volume: SpikeVolume,
    config: ReconstructionConfig | None = None,
    reference: SceneStream | None = None,
    bank: FilterBank | None = None,
    half_width_unit: float | None = None,
) -> np.ndarray:
    """
    Восстановить последовательность кадров T x H x W

    FSM восстанавливается через TFI, RVSM — через оценки коэффициентов и
    синтез по банку. Коррекция яркости применяется покадрово, затем
    значения обрезаются до [0, 255].

    Args:
        volume: Поток спайков
        config: Настройки реконструкции
        reference: Эталон (нужен для коррекции яркости)
        bank: Банк фильтров; по умолчанию восстанавливается по метаданным
        half_width_unit: Единица полуширины для восстановления банка

    Raises:
        ReferenceRequiredError: Коррекция яркости без эталона
        ShapeMismatchError: Эталон другого размера
    """
    config = config or ReconstructionConfig()
    adjust = config.brightness_adjust

    if adjust != BrightnessAdjust.NONE and reference is None:
        raise ReferenceRequiredError(
            f"Brightness adjustment '{adjust.value}' needs a reference sequence"
        )
    shape = (volume.length, volume.height, volume.width)
    if reference is not None and reference.frames.shape != shape:
        raise ShapeMismatchError(f"Reference {reference.frames.shape} does not match spikes {shape}")

    output = np.zeros(shape, dtype=np.float64)

    if volume.model == SamplingModel.FSM:
        tracker = _TfiTracker(volume.thresholds[0], volume.height, volume.width)
        for t in range(1, volume.length + 1):
            output[t - 1] = tracker.push(volume.spikes[t - 1, 0], t)
    else:
        if bank is None:
            kwargs = {} if half_width_unit is None else {"half_width_unit": half_width_unit}
            bank = bank_for_volume(volume.model, volume.scales, **kwargs)
        if bank.scales != volume.scales:
            raise ShapeMismatchError(f"Bank scales {bank.scales} do not match spikes {volume.scales}")

        service = ReconstructorService(bank, volume.height, volume.width)
        grid = CoefficientGrid.zeros(volume.n_scales, volume.height, volume.width)
        for t in range(1, volume.length + 1):
            update_coefficients(grid, volume.spikes[t - 1], t, volume.thresholds)
            output[t - 1] = service.synthesize_frame(grid)

    if adjust != BrightnessAdjust.NONE:
        adjuster = _ADJUSTERS[adjust]
        for index in range(volume.length):
            output[index] = adjuster(output[index], reference.frames[index])

    if config.clamp:
        np.clip(output, PIXEL_MIN, PIXEL_MAX, out=output)

    logger.info(
        f"Reconstructed {volume.length} frames ({volume.model.name}, adjust={adjust.value}, "
        f"clamp={config.clamp})"
    )
    return output
