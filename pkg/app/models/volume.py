from dataclasses import dataclass

import numpy as np

from app.schemas.sampler import NoiseConfig, SamplingModel
from app.utils.errors import ModelMismatchError, ShapeMismatchError


@dataclass(frozen=True, eq=False)
class SpikeVolume:
    """
    MODEL: Тернарный поток спайков T x |P| x H x W

    spikes[t - 1] — спайки в момент сэмплирования t (t = 1..T).
    """
    model: SamplingModel
    scales: tuple[float, ...]
    thresholds: tuple[float, ...]
    spikes: np.ndarray
    noise: NoiseConfig | None = None
    seed: int = 0

    def __post_init__(self):
        spikes = np.asarray(self.spikes, dtype=np.int8)
        if spikes.ndim != 4:
            raise ShapeMismatchError(f"Spikes must be T x P x H x W, got {spikes.shape}")
        if spikes.shape[1] != len(self.scales) or len(self.thresholds) != len(self.scales):
            raise ShapeMismatchError("Scale, threshold and spike plane counts differ")
        if spikes.size and (spikes.min() < -1 or spikes.max() > 1):
            raise ValueError("Spike values must be ternary")
        if self.model == SamplingModel.FSM:
            if len(self.scales) != 1:
                raise ModelMismatchError("FSM volume must have exactly one scale")
            if (spikes < 0).any():
                raise ModelMismatchError("FSM volume cannot contain negative spikes")
        spikes.setflags(write=False)
        object.__setattr__(self, "spikes", spikes)
        object.__setattr__(self, "scales", tuple(float(s) for s in self.scales))
        object.__setattr__(self, "thresholds", tuple(float(p) for p in self.thresholds))

    @property
    def length(self) -> int:
        return self.spikes.shape[0]

    @property
    def n_scales(self) -> int:
        return self.spikes.shape[1]

    @property
    def height(self) -> int:
        return self.spikes.shape[2]

    @property
    def width(self) -> int:
        return self.spikes.shape[3]

    @property
    def is_rvsm(self) -> bool:
        return self.model != SamplingModel.FSM

    def total_spikes(self) -> int:
        return int(np.count_nonzero(self.spikes))

    def same_as(self, other: "SpikeVolume") -> bool:
        """
        Побитовое совпадение данных и метаданных
        """
        return (
            self.model == other.model
            and self.scales == other.scales
            and self.thresholds == other.thresholds
            and self.noise == other.noise
            and self.seed == other.seed
            and self.spikes.shape == other.spikes.shape
            and bool(np.array_equal(self.spikes, other.spikes))
        )
