import numpy as np
import pytest

from app.schemas.scene import SceneKind, SceneParams
from app.services.scenes import synth_scene
from app.utils.errors import SceneError


@pytest.mark.parametrize("kind", list(SceneKind))
def test_scene_shape_and_range(kind):
    """
    Тест 73: Все виды сцен имеют нужный размер и диапазон яркости
    """
    scene = synth_scene(kind, height=12, width=15, length=7)

    assert scene.frames.shape == (7, 12, 15)
    assert scene.frames.min() >= 0.0
    assert scene.frames.max() <= 255.0


def test_constant_black_and_gradient():
    """
    Тест 74: Постоянная, чёрная и градиентная сцены
    """
    assert (synth_scene("constant", intensity=100.0, length=3).frames == 100.0).all()
    assert (synth_scene(SceneKind.BLACK, length=3).frames == 0.0).all()

    gradient = synth_scene(SceneKind.GRADIENT, width=11, length=2, background=0.0, intensity=200.0)
    assert gradient.frames[0, 0, 0] == 0.0
    assert gradient.frames[0, 0, -1] == 200.0
    assert (np.diff(gradient.frames[1, 5]) > 0).all()


def test_rotating_bar_is_periodic():
    """
    Тест 75: Вращающаяся полоса повторяется через period кадров
    """
    scene = synth_scene(SceneKind.ROTATING_BAR, height=21, width=21, length=45, period=20)

    assert np.array_equal(scene.frames[3], scene.frames[23])
    assert np.array_equal(scene.frames[3], scene.frames[43])
    assert not np.array_equal(scene.frames[0], scene.frames[5])
    # центр всегда на полосе
    assert (scene.frames[:, 10, 10] == 200.0).all()


def test_moving_edge_advances():
    """
    Тест 76: Граница сдвигается на speed пикселей за кадр
    """
    scene = synth_scene(SceneKind.MOVING_EDGE, height=4, width=10, length=12, speed=2.0)

    bright = (scene.frames[:, 0, :] == 200.0).sum(axis=1)
    assert bright[:5].tolist() == [0, 2, 4, 6, 8]
    assert bright[5] == 0


def test_scene_errors():
    """
    Тест 77: Неизвестный вид и некорректные параметры
    """
    with pytest.raises(SceneError):
        synth_scene("spiral")
    with pytest.raises(SceneError):
        synth_scene(SceneKind.CONSTANT, height=0)
    with pytest.raises(SceneError):
        synth_scene(SceneKind.CONSTANT, intensity=10.0, background=50.0)
    with pytest.raises(SceneError):
        synth_scene(SceneKind.CONSTANT, unknown=1)


def test_params_object_with_overrides():
    """
    Тест 78: Параметры объектом и точечная замена полей
    """
    params = SceneParams(height=5, width=6, length=4, intensity=90.0)
    scene = synth_scene(SceneKind.CONSTANT, params, length=2)

    assert scene.frames.shape == (2, 5, 6)
    assert (scene.frames == 90.0).all()
