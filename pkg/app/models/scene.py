from dataclasses import dataclass

import numpy as np

from app.utils.errors import SceneError


# Физический интервал сэмплирования камеры (40 кГц); в модели dt = 1 шаг
PHYSICAL_DT_SECONDS = 1.0 / 40000.0


@dataclass(frozen=True, eq=False)
class SceneStream:
    """
    MODEL: Последовательность кадров яркости T x H x W в цифровых единицах [0, 255]
    """
    frames: np.ndarray

    def __post_init__(self):
        frames = np.asarray(self.frames, dtype=np.float64)
        if frames.ndim != 3:
            raise SceneError(f"Scene must be T x H x W, got shape {frames.shape}")
        if frames.shape[0] == 0:
            raise SceneError("Scene has no frames")
        if frames.shape[1] == 0 or frames.shape[2] == 0:
            raise SceneError(f"Scene frames are empty: {frames.shape}")
        if np.any(frames < 0):
            raise SceneError("Scene brightness must be non-negative")
        frames.setflags(write=False)
        object.__setattr__(self, "frames", frames)

    @property
    def length(self) -> int:
        return self.frames.shape[0]

    @property
    def height(self) -> int:
        return self.frames.shape[1]

    @property
    def width(self) -> int:
        return self.frames.shape[2]

    @property
    def shape(self) -> tuple[int, int]:
        return self.height, self.width
