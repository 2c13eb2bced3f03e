from dataclasses import dataclass

import numpy as np


@dataclass
class AccumulatorGrid:
    """
    MODEL: Состояние аккумуляторов |P| x H x W

    t — номер последнего обработанного шага (0 до начала сэмплирования).
    """
    values: np.ndarray
    t: int = 0

    @classmethod
    def zeros(cls, n_scales: int, height: int, width: int) -> "AccumulatorGrid":
        return cls(values=np.zeros((n_scales, height, width), dtype=np.float64))

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.values.shape
