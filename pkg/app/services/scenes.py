import logging
import math

import numpy as np
from pydantic import ValidationError

from app.models.scene import SceneStream
from app.schemas.scene import SceneKind, SceneParams
from app.utils.errors import SceneError

logger = logging.getLogger(__name__)


def _rotating_bar(params: SceneParams) -> np.ndarray:
    """
    Полоса через центр кадра, поворачивается на полный оборот за period кадров
    """
    T, H, W = params.length, params.height, params.width
    cx, cy = (H - 1) / 2.0, (W - 1) / 2.0
    x = np.arange(H, dtype=np.float64)[:, None] - cx
    y = np.arange(W, dtype=np.float64)[None, :] - cy

    frames = np.full((T, H, W), params.background, dtype=np.float64)
    for t in range(T):
        # угол считается от t % period, поэтому сцена строго периодична
        angle = 2.0 * math.pi * (t % params.period) / params.period
        distance = np.abs(-x * math.sin(angle) + y * math.cos(angle))
        frames[t][distance <= params.bar_half_width] = params.intensity
    return frames


def _moving_edge(params: SceneParams) -> np.ndarray:
    """
    Вертикальная граница, сдвигается на speed пикселей за кадр (по модулю W)
    """
    T, H, W = params.length, params.height, params.width
    columns = np.arange(W, dtype=np.float64)
    frames = np.full((T, H, W), params.background, dtype=np.float64)
    for t in range(T):
        position = (t * params.speed) % W
        frames[t][:, columns < position] = params.intensity
    return frames


def synth_scene(kind: SceneKind | str, params: SceneParams | None = None, **overrides) -> SceneStream:
    """
    Синтетическая сцена

    Args:
        kind: constant, gradient, rotating_bar, moving_edge или black
        params: Параметры сцены; overrides подменяют отдельные поля

    Returns:
        SceneStream

    Raises:
        SceneError: Неизвестный вид сцены или некорректные параметры
    """
    try:
        kind = SceneKind(kind)
    except ValueError:
        known = ", ".join(k.value for k in SceneKind)
        raise SceneError(f"Unknown scene kind '{kind}'. Known kinds: {known}")

    try:
        base = params.model_dump() if params is not None else {}
        params = SceneParams(**{**base, **overrides})
    except ValidationError as e:
        raise SceneError(f"Invalid scene parameters: {e}")

    shape = (params.length, params.height, params.width)
    if kind == SceneKind.BLACK:
        frames = np.zeros(shape, dtype=np.float64)
    elif kind == SceneKind.CONSTANT:
        frames = np.full(shape, params.intensity, dtype=np.float64)
    elif kind == SceneKind.GRADIENT:
        ramp = np.linspace(params.background, params.intensity, params.width)
        frames = np.broadcast_to(ramp, shape).copy()
    elif kind == SceneKind.ROTATING_BAR:
        frames = _rotating_bar(params)
    else:
        frames = _moving_edge(params)

    logger.debug(f"Synthesized {kind.value} scene {shape}")
    return SceneStream(frames)
