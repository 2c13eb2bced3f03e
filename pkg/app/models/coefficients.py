from dataclasses import dataclass

import numpy as np


@dataclass
class CoefficientGrid:
    """
    MODEL: Оценки коэффициентов K и время последнего спайка для каждого аккумулятора

    K(0) = 0, t_pre(0) = 0.
    """
    K: np.ndarray
    last_fire: np.ndarray
    t: int = 0

    @classmethod
    def zeros(cls, n_scales: int, height: int, width: int) -> "CoefficientGrid":
        return cls(
            K=np.zeros((n_scales, height, width), dtype=np.float64),
            last_fire=np.zeros((n_scales, height, width), dtype=np.int64),
        )

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.K.shape
