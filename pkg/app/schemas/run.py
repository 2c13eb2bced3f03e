from enum import Enum

from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.schemas.kernel import BankName, KernelKind
from app.schemas.sampler import NoiseConfig, ResetMode
from app.schemas.scene import SceneKind


class SceneSource(str, Enum):
    SYNTH = "synth"
    DIRECTORY = "directory"


class NoiseSection(NoiseConfig):
    """
    Блок noise: параметры шума плюс флаг включения
    """
    enabled: bool = True

    def to_config(self) -> NoiseConfig | None:
        if not self.enabled:
            return None
        return NoiseConfig(**self.model_dump(exclude={"enabled"}))


class SceneSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    source: SceneSource = SceneSource.SYNTH
    kind: SceneKind = SceneKind.ROTATING_BAR
    height: int = Field(default=100, ge=1)
    width: int = Field(default=100, ge=1)
    length: int = Field(default=1000, ge=1)
    intensity: float = Field(default=200.0, ge=0, le=255)
    background: float = Field(default=20.0, ge=0, le=255)
    period: int = Field(default=200, ge=1)
    speed: float = 1.0
    path: str | None = None

    @model_validator(mode="after")
    def check_source(self):
        if self.source == SceneSource.DIRECTORY and not self.path:
            raise ValueError("scene.path is required when scene.source is 'directory'")
        return self


class OutputSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    spikes: str = "out.spk"
    frames: str | None = None
    report: str | None = None


class RunConfig(BaseModel):
    """
    Конфигурация прогона (YAML)

    Ровно одно из двух: model либо пара kind + scales.
    """
    model_config = ConfigDict(extra="forbid")

    model: BankName | None = None
    kind: KernelKind | None = None
    scales: list[float] | None = None
    half_width_unit: float = Field(default=0.24, gt=0)
    threshold: float = Field(default=400.0, gt=0)
    per_scale_threshold: list[float] | None = None
    reset_mode: ResetMode = ResetMode.ZERO
    seed: int = Field(default=0, ge=0, lt=2**64)
    noise: NoiseSection | None = None
    scene: SceneSection = Field(default_factory=SceneSection)
    output: OutputSection = Field(default_factory=OutputSection)

    @model_validator(mode="after")
    def check_bank(self):
        explicit = self.kind is not None or self.scales is not None
        if self.model is not None and explicit:
            raise ValueError("'model' and 'kind'/'scales' are mutually exclusive")
        if self.model is None and not explicit:
            raise ValueError("either 'model' or 'kind' with 'scales' is required")
        if explicit and (self.kind is None or not self.scales):
            raise ValueError("'kind' and a non-empty 'scales' list must be given together")
        return self
