from pydantic import Field
from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    # Число потоков для расчёта масштабов в сэмплере и сидов в развёртке
    NUM_THREADS: int = Field(default=1, ge=1)

    class Config:
        env_prefix = "RVSIM_"
        env_file = ".env"
        extra = "ignore"


settings = Settings()
