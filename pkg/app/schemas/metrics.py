from pydantic import BaseModel, Field


class FrameMetrics(BaseModel):
    """
    Метрики одного кадра
    """
    index: int
    mse: float
    psnr: float
    ssim: float


class MetricReport(BaseModel):
    """
    Отчёт о качестве реконструкции

    Метрики считаются по кадрам и усредняются по последовательности.
    """
    frames: list[FrameMetrics]
    mse: float
    psnr: float
    ssim: float
    aggregation: str = "per_frame_mean"
    psnr_peak: float = 255.0
    ssim_window: int = 11
    ssim_sigma: float = 1.5
    ssim_k1: float = 0.01
    ssim_k2: float = 0.03


class RobustnessReport(BaseModel):
    """
    Индексы устойчивости к шуму: ASS (I1), ASAS (I2), ASASS (I3 по масштабам)
    """
    model: str
    k: float
    seed: int
    length: int
    height: int
    width: int
    scales: list[float]
    ass: float = Field(ge=0)
    asas: float = Field(ge=0)
    asass: list[float]


class RobustnessRow(BaseModel):
    """
    Строка таблицы для графика: среднее по сидам при фиксированном k
    """
    k: float
    model: str
    seeds: int
    ass: float
    asas: float
    asass: list[float]


class QualityRow(BaseModel):
    """
    Строка сравнения моделей: качество реконструкции одной сцены
    """
    scene: str
    model: str
    noise: bool
    k: float = Field(ge=0)
    seed: int
    spikes: int = Field(ge=0)
    frames: int = Field(ge=1)
    mse: float
    psnr: float
    ssim: float
