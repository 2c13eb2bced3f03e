from enum import Enum, IntEnum

from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.models.kernel import FilterBank


class SamplingModel(IntEnum):
    """
    Модель сэмплирования (значение совпадает с кодом в заголовке .spk)
    """
    FSM = 0
    RVSM_DOG = 1
    RVSM_GAUSS = 2


class ResetMode(str, Enum):
    """
    zero — обнуление аккумулятора после спайка,
    subtract — вычитание порога с переносом остатка
    """
    ZERO = "zero"
    SUBTRACT = "subtract"


class NoiseConfig(BaseModel):
    """
    Параметры шума: темновой ток, напряжение смещения, разброс ёмкости

    Стандартные отклонения равны beta * k. Значения по умолчанию —
    калибровочные, а не взятые с реальной камеры.
    """
    model_config = ConfigDict(extra="forbid", frozen=True)

    e1: float = Field(default=4.0, description="Dark current mean, units per step")
    e2: float = Field(default=0.0, description="Offset voltage mean")
    e3: float = Field(default=1.0, description="Capacitor factor mean")
    beta1: float = Field(default=12.0, ge=0)
    beta2: float = Field(default=20.0, ge=0)
    beta3: float = Field(default=0.02, ge=0)
    k: float = Field(default=1.0, ge=0, description="Noise intensity multiplier")

    def as_tuple(self) -> tuple[float, ...]:
        return (self.e1, self.e2, self.e3, self.beta1, self.beta2, self.beta3, self.k)


class SamplerConfig(BaseModel):
    """
    Конфигурация сэмплера: банк, порог(и), шум, сид
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    model: SamplingModel
    bank: FilterBank
    threshold: float = Field(default=400.0, gt=0)
    per_scale_threshold: tuple[float, ...] | None = None
    noise: NoiseConfig | None = None
    seed: int = Field(default=0, ge=0, lt=2**64)
    reset_mode: ResetMode = ResetMode.ZERO

    @model_validator(mode="after")
    def check_thresholds(self):
        if self.per_scale_threshold is not None:
            if len(self.per_scale_threshold) != len(self.bank):
                raise ValueError(
                    f"per_scale_threshold needs {len(self.bank)} values, "
                    f"got {len(self.per_scale_threshold)}"
                )
            if any(phi <= 0 for phi in self.per_scale_threshold):
                raise ValueError("Thresholds must be positive")
        if self.model == SamplingModel.FSM and len(self.bank) != 1:
            raise ValueError("FSM samples with a single scale")
        return self

    @property
    def thresholds(self) -> tuple[float, ...]:
        if self.per_scale_threshold is not None:
            return tuple(float(phi) for phi in self.per_scale_threshold)
        return tuple(float(self.threshold) for _ in self.bank.scales)
