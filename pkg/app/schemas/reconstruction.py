from enum import Enum

from pydantic import BaseModel, ConfigDict


class BrightnessAdjust(str, Enum):
    NONE = "none"
    MATCH_MEAN = "match_mean"
    MATCH_MEAN_STD = "match_mean_std"


class ReconstructionConfig(BaseModel):
    """
    Настройки реконструкции

    Коррекция яркости используется только при оценке качества:
    она берёт статистику из эталона.
    """
    model_config = ConfigDict(extra="forbid", frozen=True)

    brightness_adjust: BrightnessAdjust = BrightnessAdjust.MATCH_MEAN
    clamp: bool = True
