import numpy as np
from scipy import ndimage

from app.models.kernel import Kernel


class ClippedFilter:
    """
    Ядро, привязанное к размеру кадра

    У границ шаблон обрезается, и обрезанное ядро заново нормируется по L1
    в каждой позиции центра: сумма модулей весов везде равна 1.

    Плоскости фильтруются по одной двумерной корреляцией. Ядро 1x1 с весом
    1.0 (банк FSM) не фильтрует вовсе: результат совпадает побитово.
    """

    def __init__(self, kernel: Kernel, height: int, width: int):
        self.kernel = kernel
        self.shape = (height, width)
        self.is_identity = kernel.half_width == 0 and float(kernel.weights[0, 0]) == 1.0
        self.norm = ndimage.correlate(
            np.ones(self.shape, dtype=np.float64),
            np.abs(kernel.weights),
            mode="constant",
            cval=0.0,
        )

    def _per_plane(self, planes: np.ndarray, method) -> np.ndarray:
        planes = np.asarray(planes, dtype=np.float64)
        result = np.empty_like(planes)
        # ось времени (если есть) не фильтруется
        for index in np.ndindex(planes.shape[:-2]):
            method(planes[index], self.kernel.weights, output=result[index], mode="constant", cval=0.0)
        return result

    def analyze(self, planes: np.ndarray) -> np.ndarray:
        """
        Взвешенная сумма яркости в рецептивном поле каждого центра

        planes: (..., H, W)
        """
        if self.is_identity:
            return np.array(planes, dtype=np.float64)
        weighted = self._per_plane(planes, ndimage.correlate)
        weighted /= self.norm
        return weighted

    def synthesize(self, coefficients: np.ndarray) -> np.ndarray:
        """
        Сумма по центрам K_c * w_c(x, y) (обратное преобразование)
        """
        if self.is_identity:
            return np.array(coefficients, dtype=np.float64)
        return self._per_plane(coefficients / self.norm, ndimage.convolve)
