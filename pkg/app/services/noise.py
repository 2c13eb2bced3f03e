import hashlib
import hmac

import numpy as np

from app.models.noise import NoiseField
from app.schemas.sampler import NoiseConfig

# =========================
# СЧЁТЧИКОВЫЙ ГЕНЕРАТОР (Philox4x32-10)
# =========================

PHILOX_M0 = np.uint64(0xD2511F53)
PHILOX_M1 = np.uint64(0xCD9E8D57)
PHILOX_W0 = 0x9E3779B9
PHILOX_W1 = 0xBB67AE85
PHILOX_ROUNDS = 10

MASK32 = np.uint64(0xFFFFFFFF)
TWO_POW_32 = 4294967296.0

# Метки независимых потоков
DARK_STREAM = "dark-current"
OFFSET_STREAM = "offset-voltage"
GAIN_STREAM = "capacitor"


def derive_key(seed: int, stream: str) -> tuple[int, int]:
    """
    Ключ Philox из сида и метки потока

    HMAC-SHA256(key=seed, msg=stream), берём первые 8 байт.
    """
    digest = hmac.new(
        key=str(seed).encode("utf-8"),
        msg=stream.encode("utf-8"),
        digestmod=hashlib.sha256,
    ).digest()
    return int.from_bytes(digest[0:4], "little"), int.from_bytes(digest[4:8], "little")


def philox4x32(counters, key: tuple[int, int], rounds: int = PHILOX_ROUNDS):
    """
    Векторизованный Philox4x32

    Args:
        counters: Четыре массива (или числа) 32-битных слов счётчика
        key: Пара 32-битных слов ключа

    Returns:
        Четыре массива uint64 со значениями в [0, 2^32)
    """
    c0, c1, c2, c3 = np.broadcast_arrays(
        *(np.asarray(c, dtype=np.uint64) & MASK32 for c in counters)
    )
    k0, k1 = key[0] & 0xFFFFFFFF, key[1] & 0xFFFFFFFF

    for _ in range(rounds):
        p0 = c0 * PHILOX_M0
        p1 = c2 * PHILOX_M1
        hi1 = p1 >> 32
        hi1 ^= c1
        hi1 ^= np.uint64(k0)
        hi0 = p0 >> 32
        hi0 ^= c3
        hi0 ^= np.uint64(k1)
        p1 &= MASK32
        p0 &= MASK32
        c0, c1, c2, c3 = hi1, p1, hi0, p0
        k0 = (k0 + PHILOX_W0) & 0xFFFFFFFF
        k1 = (k1 + PHILOX_W1) & 0xFFFFFFFF

    return c0, c1, c2, c3


def _box_muller(w_a: np.ndarray, w_b: np.ndarray, out_cos: np.ndarray, out_sin: np.ndarray) -> None:
    # u1 в (0, 1], чтобы log не вырождался
    radius = w_a.astype(np.float64)
    radius += 1.0
    radius /= TWO_POW_32
    np.log(radius, out=radius)
    radius *= -2.0
    np.sqrt(radius, out=radius)

    angle = w_b.astype(np.float64)
    angle /= TWO_POW_32
    angle *= 2.0 * np.pi

    np.cos(angle, out=out_cos)
    out_cos *= radius
    np.sin(angle, out=out_sin)
    out_sin *= radius


def standard_normals(
    key: tuple[int, int],
    scale_index: int,
    times: np.ndarray,
    height: int,
    width: int,
) -> np.ndarray:
    """
    Стандартные нормальные величины для сетки (t, x, y)

    Значение в точке зависит только от (ключ, масштаб, x, y, t): счётчик
    (y // 4, x, t, масштаб), четыре слова Philox дают четыре значения
    для y % 4 = 0..3. Поэтому общие области разных размеров совпадают.

    Returns:
        Массив len(times) x height x width
    """
    times = np.asarray(times, dtype=np.uint64)
    blocks = -(-width // 4)
    t_grid = times[:, None, None]
    x_grid = np.arange(height, dtype=np.uint64)[None, :, None]
    b_grid = np.arange(blocks, dtype=np.uint64)[None, None, :]

    w0, w1, w2, w3 = philox4x32((b_grid, x_grid, t_grid, scale_index), key)
    normals = np.empty(w0.shape + (4,), dtype=np.float64)
    _box_muller(w0, w1, normals[..., 0], normals[..., 1])
    _box_muller(w2, w3, normals[..., 2], normals[..., 3])

    return normals.reshape(len(times), height, blocks * 4)[:, :, :width]

# =========================
# РЕАЛИЗАЦИЯ ШУМА
# =========================

def realize_noise(cfg: NoiseConfig, seed: int, shape: tuple[int, int, int]) -> NoiseField:
    """
    Сгенерировать фиксированный шум V_OS и theta и ключ темнового тока

    V_OS ~ N(e2, (beta2*k)^2), theta ~ N(e3, (beta3*k)^2) — по одному
    значению на аккумулятор (масштаб, x0, y0).

    Args:
        cfg: Параметры шума
        seed: Сид прогона
        shape: (|P|, H, W)
    """
    n_scales, height, width = shape
    zero_time = np.zeros(1, dtype=np.uint64)

    v_os = np.empty(shape, dtype=np.float64)
    theta = np.empty(shape, dtype=np.float64)
    offset_key = derive_key(seed, OFFSET_STREAM)
    gain_key = derive_key(seed, GAIN_STREAM)

    for s in range(n_scales):
        v_os[s] = cfg.e2 + cfg.beta2 * cfg.k * standard_normals(offset_key, s, zero_time, height, width)[0]
        theta[s] = cfg.e3 + cfg.beta3 * cfg.k * standard_normals(gain_key, s, zero_time, height, width)[0]

    return NoiseField(
        config=cfg,
        seed=seed,
        v_os=v_os,
        theta=theta,
        dark_key=derive_key(seed, DARK_STREAM),
    )


def dark_current(field: NoiseField, scale_index: int, t_start: int, count: int) -> np.ndarray:
    """
    Темновой ток I_dark ~ N(e1, (beta1*k)^2) для шагов t_start .. t_start + count - 1

    Returns:
        Массив count x H x W
    """
    _, height, width = field.shape
    cfg = field.config
    std = cfg.beta1 * cfg.k
    if std == 0.0:
        return np.full((count, height, width), cfg.e1, dtype=np.float64)

    times = np.arange(t_start, t_start + count, dtype=np.uint64)
    dark = standard_normals(field.dark_key, scale_index, times, height, width)
    dark *= std
    dark += cfg.e1
    return dark
