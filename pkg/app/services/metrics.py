import logging
import math

import numpy as np
from scipy import ndimage

from app.models.volume import SpikeVolume
from app.schemas.metrics import FrameMetrics, MetricReport, RobustnessReport
from app.schemas.sampler import SamplingModel
from app.utils.errors import MetricInputError, UnknownScaleError

logger = logging.getLogger(__name__)

# =========================
# КОНСТАНТЫ
# =========================

PSNR_PEAK = 255.0

SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03

# Допуск при поиске масштаба в банке
SCALE_MATCH_TOLERANCE = 1e-12

# =========================
# КАЧЕСТВО ИЗОБРАЖЕНИЯ
# =========================

def _as_pair(a, b) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise MetricInputError(f"Image shapes differ: {a.shape} vs {b.shape}")
    if a.size == 0:
        raise MetricInputError("Images are empty")
    return a, b


def mse(a, b) -> float:
    """
    Среднеквадратичная ошибка по пикселям
    """
    a, b = _as_pair(a, b)
    return float(np.mean((a - b) ** 2))


def psnr(mse_value: float) -> float:
    """
    PSNR = 10 * log10(255^2 / MSE); для MSE = 0 возвращается +inf

    Raises:
        MetricInputError: MSE < 0
    """
    if mse_value < 0:
        raise MetricInputError(f"MSE must be non-negative, got {mse_value}")
    if mse_value == 0:
        return math.inf
    return 10.0 * math.log10(PSNR_PEAK ** 2 / mse_value)


def _ssim_window() -> np.ndarray:
    radius = SSIM_WINDOW // 2
    offsets = np.arange(-radius, radius + 1, dtype=np.float64)
    profile = np.exp(-0.5 * offsets ** 2 / SSIM_SIGMA ** 2)
    profile /= profile.sum()
    return np.outer(profile, profile)


def ssim(a, b) -> float:
    """
    SSIM по гауссову окну 11x11 (sigma = 1.5), L = 255, K1 = 0.01, K2 = 0.03

    Локальные статистики считаются только там, где окно целиком внутри
    кадра; результат — среднее карты SSIM.

    Raises:
        MetricInputError: Размеры различаются или кадр меньше окна
    """
    a, b = _as_pair(a, b)
    if a.ndim != 2:
        raise MetricInputError(f"SSIM expects 2-D frames, got shape {a.shape}")
    if min(a.shape) < SSIM_WINDOW:
        raise MetricInputError(
            f"Frame {a.shape} is smaller than the {SSIM_WINDOW}x{SSIM_WINDOW} SSIM window"
        )

    window = _ssim_window()
    pad = SSIM_WINDOW // 2

    def local_mean(image: np.ndarray) -> np.ndarray:
        return ndimage.correlate(image, window, mode="reflect")[pad:-pad, pad:-pad]

    c1 = (SSIM_K1 * PSNR_PEAK) ** 2
    c2 = (SSIM_K2 * PSNR_PEAK) ** 2

    mu_a = local_mean(a)
    mu_b = local_mean(b)
    var_a = local_mean(a * a) - mu_a * mu_a
    var_b = local_mean(b * b) - mu_b * mu_b
    cov = local_mean(a * b) - mu_a * mu_b

    ssim_map = ((2 * mu_a * mu_b + c1) * (2 * cov + c2)) / (
        (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2)
    )
    return float(ssim_map.mean())


def evaluate_sequence(reconstruction, reference) -> MetricReport:
    """
    Метрики по кадрам и их среднее по последовательности

    PSNR последовательности — среднее PSNR кадров (не PSNR среднего MSE).
    Если хотя бы один кадр совпал точно, среднее PSNR равно +inf.
    """
    reconstruction, reference = _as_pair(reconstruction, reference)
    if reconstruction.ndim != 3:
        raise MetricInputError(f"Sequences must be T x H x W, got {reconstruction.shape}")

    frames = []
    for index in range(reconstruction.shape[0]):
        frame_mse = mse(reconstruction[index], reference[index])
        frames.append(FrameMetrics(
            index=index,
            mse=frame_mse,
            psnr=psnr(frame_mse),
            ssim=ssim(reconstruction[index], reference[index]),
        ))

    report = MetricReport(
        frames=frames,
        mse=float(np.mean([f.mse for f in frames])),
        psnr=float(np.mean([f.psnr for f in frames])),
        ssim=float(np.mean([f.ssim for f in frames])),
    )
    logger.info(f"Evaluated {len(frames)} frames: MSE={report.mse:.4f}, PSNR={report.psnr:.4f}, SSIM={report.ssim:.4f}")
    return report

# =========================
# УСТОЙЧИВОСТЬ К ШУМУ
# =========================

def ass(volume: SpikeVolume) -> float:
    """
    I1: среднее число спайков за шаг по всему кадру

    Для FSM считается сумма спайков, для RVSM — число ненулевых значений.
    """
    if volume.model == SamplingModel.FSM:
        total = int(volume.spikes.sum(dtype=np.int64))
    else:
        total = volume.total_spikes()
    return total / volume.length


def asas(volume: SpikeVolume) -> float:
    """
    I2: I1, делённое на число аккумуляторов (W * H, для RVSM ещё на |P|)
    """
    accumulators = volume.width * volume.height
    if volume.is_rvsm:
        accumulators *= volume.n_scales
    return ass(volume) / accumulators


def _scale_index(volume: SpikeVolume, sigma: float) -> int:
    for index, scale in enumerate(volume.scales):
        if math.isclose(scale, sigma, rel_tol=0.0, abs_tol=SCALE_MATCH_TOLERANCE):
            return index
    raise UnknownScaleError(f"Scale {sigma} is not in {volume.scales}")


def asass(volume: SpikeVolume, sigma: float) -> float:
    """
    I3(sigma): доля ненулевых спайков масштаба sigma на шаг и аккумулятор

    Для FSM значение не зависит от sigma и равно I1.

    Raises:
        UnknownScaleError: Масштаба нет в банке RVSM
    """
    if volume.model == SamplingModel.FSM:
        return ass(volume)
    index = _scale_index(volume, sigma)
    fired = int(np.count_nonzero(volume.spikes[:, index]))
    return fired / (volume.length * volume.width * volume.height)


def robustness_report(volume: SpikeVolume, k: float, model_name: str | None = None) -> RobustnessReport:
    """
    Все три индекса устойчивости для одного прогона
    """
    return RobustnessReport(
        model=model_name or volume.model.name,
        k=k,
        seed=volume.seed,
        length=volume.length,
        height=volume.height,
        width=volume.width,
        scales=list(volume.scales),
        ass=ass(volume),
        asas=asas(volume),
        asass=[asass(volume, sigma) for sigma in volume.scales],
    )

# =========================
# КВАНТОВАНИЕ И ВРЕМЯ ОТКЛИКА
# =========================

def _check_intensity_threshold(intensity: float, threshold: float) -> None:
    if not intensity > 0:
        raise MetricInputError(f"Intensity must be positive, got {intensity}")
    if not threshold > 0:
        raise MetricInputError(f"Threshold must be positive, got {threshold}")


def response_time(intensity: float, threshold: float, dt: float = 1.0) -> int:
    """
    Число шагов до первого спайка при постоянной яркости: ceil(phi / (I * dt))
    """
    _check_intensity_threshold(intensity, threshold)
    return math.ceil(threshold / (intensity * dt) - 1e-12)


def quantization_error_bound(intensity: float, threshold: float, dt: float = 1.0) -> float:
    """
    Точная ошибка TFI при постоянной яркости: |phi / (n * dt) - I|, n = response_time
    """
    steps = response_time(intensity, threshold, dt)
    return abs(threshold / (steps * dt) - intensity)


def quantization_error_envelope(intensity: float, threshold: float, dt: float = 1.0) -> float:
    """
    Верхняя оценка ошибки I^2 * dt / (phi + I * dt), строго убывает по phi
    """
    _check_intensity_threshold(intensity, threshold)
    return intensity ** 2 * dt / (threshold + intensity * dt)


def first_spike_times(volume: SpikeVolume) -> np.ndarray:
    """
    Момент первого спайка каждого аккумулятора (|P| x H x W); 0 — спайков нет
    """
    fired = volume.spikes != 0
    first = fired.argmax(axis=0).astype(np.int64) + 1
    first[~fired.any(axis=0)] = 0
    return first


def mean_response_time(volume: SpikeVolume) -> list[float | None]:
    """
    Среднее время первого спайка по масштабам; None, если масштаб молчал
    """
    first = first_spike_times(volume)
    means = []
    for plane in first:
        fired = plane[plane > 0]
        means.append(float(fired.mean()) if fired.size else None)
    return means


