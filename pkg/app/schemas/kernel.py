from enum import Enum

from pydantic import BaseModel, ConfigDict, Field


class KernelKind(str, Enum):
    """
    Материнская функция рецептивного поля
    """
    DOG = "dog"
    GAUSS = "gauss"


class BankName(str, Enum):
    """
    Стандартные банки фильтров
    """
    FSM = "FSM"
    ONE_DOG = "OneDoG"
    TWO_DOG = "TwoDoG"
    THREE_DOG = "ThreeDoG"
    FOUR_DOG = "FourDoG"
    ONE_GAUSS = "OneGauss"
    TWO_GAUSS = "TwoGauss"
    THREE_GAUSS = "ThreeGauss"
    FOUR_GAUSS = "FourGauss"


class KernelSpec(BaseModel):
    """
    Схема фильтра: масштаб, центр, тип и полуширина шаблона

    template_half_width = 0 означает единичный шаблон 1x1 (банк FSM).
    """
    model_config = ConfigDict(frozen=True)

    scale: float = Field(gt=0, description="Receptive-field scale sigma")
    center: tuple[int, int] = (0, 0)
    kind: KernelKind = KernelKind.DOG
    template_half_width: int = Field(ge=0, description="Template half width L")
