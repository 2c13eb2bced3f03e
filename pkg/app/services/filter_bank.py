import logging
import math

import numpy as np

from app.models.kernel import FilterBank, Kernel
from app.schemas.kernel import BankName, KernelKind, KernelSpec
from app.schemas.sampler import SamplingModel
from app.utils.errors import KernelError

logger = logging.getLogger(__name__)

# =========================
# КОНСТАНТЫ
# =========================

# Масштабы двух гауссиан материнского DoG
DOG_A1 = 1.0
DOG_A2 = 1.5874

# Масштаб, которому соответствует шаблон 3x3
HALF_WIDTH_UNIT = 0.24

# Масштаб единичного банка FSM (шаблон 1x1)
UNIT_SCALE = 1.0

STANDARD_SCALES = (0.24, 0.348, 0.5046, 0.7317)

_STANDARD_BANKS = {
    BankName.ONE_DOG: (KernelKind.DOG, 1),
    BankName.TWO_DOG: (KernelKind.DOG, 2),
    BankName.THREE_DOG: (KernelKind.DOG, 3),
    BankName.FOUR_DOG: (KernelKind.DOG, 4),
    BankName.ONE_GAUSS: (KernelKind.GAUSS, 1),
    BankName.TWO_GAUSS: (KernelKind.GAUSS, 2),
    BankName.THREE_GAUSS: (KernelKind.GAUSS, 3),
    BankName.FOUR_GAUSS: (KernelKind.GAUSS, 4),
}

# =========================
# ЗНАЧЕНИЯ ФИЛЬТРОВ
# =========================

def gaussian_kernel_value(i: int, j: int, x0: int, y0: int, sigma: float) -> float:
    """
    Гауссов фильтр G_sigma^{x0,y0}(i, j)

    Raises:
        KernelError: Если sigma <= 0
    """
    if not sigma > 0:
        raise KernelError(f"Gaussian scale must be positive, got {sigma}")
    r2 = (i - x0) ** 2 + (j - y0) ** 2
    return math.exp(-r2 / (2 * sigma ** 2)) / (2 * math.pi * sigma ** 2)


def dog_mother_value(i: float, j: float) -> float:
    """
    Материнский вейвлет DoG = G_{a1} - G_{a2}

    Скалярная формула в точке; по ней сверяются векторные шаблоны build_kernel.
    """
    return (
        gaussian_kernel_value(i, j, 0, 0, DOG_A1)
        - gaussian_kernel_value(i, j, 0, 0, DOG_A2)
    )


def _gaussian(u: np.ndarray, v: np.ndarray, sigma: float) -> np.ndarray:
    return np.exp(-(u * u + v * v) / (2 * sigma ** 2)) / (2 * math.pi * sigma ** 2)


def _mother(kind: KernelKind, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    if kind == KernelKind.DOG:
        return _gaussian(u, v, DOG_A1) - _gaussian(u, v, DOG_A2)
    return _gaussian(u, v, 1.0)

# =========================
# ПОСТРОЕНИЕ ЯДЕР
# =========================

def template_half_width(sigma: float, unit: float = HALF_WIDTH_UNIT) -> int:
    """
    Полуширина шаблона L для масштаба sigma: max(1, ceil(sigma / unit))

    0.24 -> 1 (3x3), 0.348 -> 2, 0.5046 -> 3, 0.7317 -> 4
    """
    if not sigma > 0:
        raise KernelError(f"Scale must be positive, got {sigma}")
    if not unit > 0:
        raise KernelError(f"Half-width unit must be positive, got {unit}")
    # допуск на ошибку деления: 0.48 / 0.24 не должно давать 3
    return max(1, math.ceil(sigma / unit - 1e-9))


def build_kernel(spec: KernelSpec) -> Kernel:
    """
    Нормированное ядро: сдвиг, масштабирование и L1-нормировка материнской функции

    Веса берутся в целых смещениях шаблона [-L, L]^2 и делятся на сумму
    модулей по тому же шаблону.

    Raises:
        KernelError: Если шаблон вырожден (все веса нулевые)
    """
    L = spec.template_half_width
    offsets = np.arange(-L, L + 1, dtype=np.float64) / spec.scale
    raw = _mother(spec.kind, offsets[:, None], offsets[None, :])

    norm = np.abs(raw).sum()
    if not np.isfinite(norm) or norm == 0.0:
        raise KernelError(
            f"Degenerate {spec.kind.value} template for scale {spec.scale} "
            f"and half width {L}"
        )

    return Kernel(spec=spec, weights=raw / norm)


def make_bank(
    kind: KernelKind,
    scales: list[float] | tuple[float, ...],
    half_width_unit: float = HALF_WIDTH_UNIT,
    half_widths: list[int] | tuple[int, ...] | None = None,
    name: str | None = None,
) -> FilterBank:
    """
    Банк из произвольного строго возрастающего списка масштабов

    Args:
        kind: Материнская функция (DoG или гауссиана)
        scales: Множество масштабов P
        half_width_unit: Масштаб, которому соответствует шаблон 3x3
        half_widths: Явные полуширины шаблонов (по одной на масштаб)
        name: Имя банка для отчётов

    Returns:
        FilterBank
    """
    scales = tuple(float(s) for s in scales)
    if not scales:
        raise KernelError("Filter bank needs at least one scale")
    if half_widths is not None and len(half_widths) != len(scales):
        raise KernelError("One half width per scale is required")

    kernels = []
    for index, sigma in enumerate(scales):
        L = half_widths[index] if half_widths is not None else template_half_width(sigma, half_width_unit)
        kernels.append(build_kernel(
            KernelSpec(scale=sigma, kind=kind, template_half_width=L)
        ))

    bank = FilterBank(kind=kind, scales=scales, kernels=tuple(kernels), name=name)
    logger.debug(f"Built {kind.value} bank {name or scales} with half widths {bank.half_widths}")
    return bank


def unit_bank() -> FilterBank:
    """
    Вырожденный банк FSM: одно ядро 1x1 с весом 1
    """
    spec = KernelSpec(scale=UNIT_SCALE, kind=KernelKind.DOG, template_half_width=0)
    return FilterBank(
        kind=KernelKind.DOG,
        scales=(UNIT_SCALE,),
        kernels=(build_kernel(spec),),
        name=BankName.FSM.value,
    )


def standard_bank(name: BankName | str) -> FilterBank:
    """
    Стандартный банк по имени (FSM, OneDoG..FourDoG, OneGauss..FourGauss)

    Raises:
        KernelError: Если имя неизвестно
    """
    try:
        name = BankName(name)
    except ValueError:
        known = ", ".join(b.value for b in BankName)
        raise KernelError(f"Unknown filter bank '{name}'. Known banks: {known}")

    if name == BankName.FSM:
        return unit_bank()

    kind, count = _STANDARD_BANKS[name]
    return make_bank(kind, STANDARD_SCALES[:count], name=name.value)


def model_for_bank(name: BankName | str) -> SamplingModel:
    """
    Модель сэмплирования, которой соответствует стандартный банк
    """
    name = BankName(name)
    if name == BankName.FSM:
        return SamplingModel.FSM
    kind, _ = _STANDARD_BANKS[name]
    return SamplingModel.RVSM_DOG if kind == KernelKind.DOG else SamplingModel.RVSM_GAUSS


def bank_for_volume(
    model: SamplingModel,
    scales: tuple[float, ...],
    half_width_unit: float = HALF_WIDTH_UNIT,
) -> FilterBank:
    """
    Восстановить банк по метаданным потока спайков

    Заголовок .spk хранит только масштабы, поэтому полуширины берутся
    из правила template_half_width. Для нестандартных шаблонов банк
    нужно передать явно.
    """
    if model == SamplingModel.FSM:
        return unit_bank()
    kind = KernelKind.DOG if model == SamplingModel.RVSM_DOG else KernelKind.GAUSS
    return make_bank(kind, scales, half_width_unit=half_width_unit)
