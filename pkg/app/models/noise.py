from dataclasses import dataclass

import numpy as np

from app.schemas.sampler import NoiseConfig


@dataclass(frozen=True, eq=False)
class NoiseField:
    """
    MODEL: Реализация шума для одного прогона

    v_os и theta — фиксированный шум, один раз на аккумулятор (|P| x H x W).
    Темновой ток генерируется по запросу из счётчикового потока с ключом dark_key.
    """
    config: NoiseConfig
    seed: int
    v_os: np.ndarray
    theta: np.ndarray
    dark_key: tuple[int, int]

    def __post_init__(self):
        self.v_os.setflags(write=False)
        self.theta.setflags(write=False)

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.v_os.shape
