from dataclasses import dataclass

import numpy as np

from app.schemas.kernel import KernelKind, KernelSpec
from app.utils.errors import KernelError


@dataclass(frozen=True, eq=False)
class Kernel:
    """
    MODEL: Дискретный шаблон рецептивного поля

    weights имеет размер (2L+1)x(2L+1), центр шаблона в spec.center.
    """
    spec: KernelSpec
    weights: np.ndarray

    def __post_init__(self):
        self.weights.setflags(write=False)

    @property
    def half_width(self) -> int:
        return self.spec.template_half_width

    def weight(self, i: int, j: int) -> float:
        """
        Вес в абсолютных координатах пикселя (0 вне шаблона)
        """
        x0, y0 = self.spec.center
        L = self.half_width
        di, dj = i - x0, j - y0
        if abs(di) > L or abs(dj) > L:
            return 0.0
        return float(self.weights[di + L, dj + L])


@dataclass(frozen=True, eq=False)
class FilterBank:
    """
    MODEL: Банк фильтров — по одному центрированному ядру на масштаб

    Ядра для остальных центров получаются сдвигом.
    """
    kind: KernelKind
    scales: tuple[float, ...]
    kernels: tuple[Kernel, ...]
    name: str | None = None

    def __post_init__(self):
        if not self.scales:
            raise KernelError("Filter bank needs at least one scale")
        if len(self.scales) != len(self.kernels):
            raise KernelError("One kernel per scale is required")
        if any(b <= a for a, b in zip(self.scales, self.scales[1:])):
            raise KernelError("Scales must be strictly increasing")

    def __len__(self) -> int:
        return len(self.scales)

    @property
    def half_widths(self) -> tuple[int, ...]:
        return tuple(k.half_width for k in self.kernels)

    @property
    def is_unit(self) -> bool:
        """Единичный банк FSM: одно ядро 1x1"""
        return len(self.kernels) == 1 and self.kernels[0].half_width == 0
