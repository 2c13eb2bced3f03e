import numpy as np
import pytest
import yaml
from typer.testing import CliRunner

from app.models.scene import SceneStream


@pytest.fixture
def rng():
    """
    Fixture для воспроизводимых случайных данных
    """
    return np.random.default_rng(20240417)


@pytest.fixture
def constant_scene():
    """
    Fixture-фабрика постоянной сцены T x H x W
    """
    def make(value: float, height: int = 1, width: int = 1, length: int = 10) -> SceneStream:
        return SceneStream(np.full((length, height, width), value, dtype=np.float64))
    return make


@pytest.fixture
def random_scene(rng):
    """
    Fixture-фабрика случайной сцены с целыми яркостями 0..255
    """
    def make(height: int, width: int, length: int) -> SceneStream:
        return SceneStream(rng.integers(0, 256, size=(length, height, width)).astype(np.float64))
    return make


@pytest.fixture
def runner():
    """
    Fixture для вызова CLI
    """
    return CliRunner()


@pytest.fixture
def write_config(tmp_path):
    """
    Fixture-фабрика YAML-конфигурации прогона
    """
    def make(data: dict, name: str = "run.yaml"):
        path = tmp_path / name
        path.write_text(yaml.safe_dump(data, sort_keys=False))
        return path
    return make
