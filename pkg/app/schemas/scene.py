from enum import Enum

from pydantic import BaseModel, ConfigDict, Field, model_validator


class SceneKind(str, Enum):
    CONSTANT = "constant"
    GRADIENT = "gradient"
    ROTATING_BAR = "rotating_bar"
    MOVING_EDGE = "moving_edge"
    BLACK = "black"


class SceneParams(BaseModel):
    """
    Параметры синтетической сцены (замена датасета HMD)
    """
    model_config = ConfigDict(extra="forbid")

    height: int = Field(default=100, ge=1)
    width: int = Field(default=100, ge=1)
    length: int = Field(default=1000, ge=1, description="Number of frames T")
    intensity: float = Field(default=200.0, ge=0, le=255)
    background: float = Field(default=20.0, ge=0, le=255)
    period: int = Field(default=200, ge=1, description="Rotating bar period in frames")
    speed: float = Field(default=1.0, description="Moving edge speed, pixels per frame")
    bar_half_width: float = Field(default=3.0, gt=0)

    @model_validator(mode="after")
    def check_range(self):
        if self.background > self.intensity:
            raise ValueError("background must not exceed intensity")
        return self
