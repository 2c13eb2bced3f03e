"""
Формат потока спайков .spk и ввод/вывод кадров.

Заголовок (little-endian):
    magic "RVS1" | version u16 | model u8 | H u32 | W u32 | T u32 | n_scales u16
    | scales n x f64 | thresholds n x f64 | noise_enabled u8 | e1 e2 e3 b1 b2 b3 k (7 x f64)
    | seed u64

Данные: для каждого t, для каждого масштаба — плоскость H x W построчно,
по 2 бита на спайк, старшая пара первой (00 -> 0, 01 -> +1, 10 -> -1,
11 зарезервирован). Каждая плоскость выравнивается до целого байта.
"""
import io
import logging
import math
import struct
from pathlib import Path
from typing import BinaryIO, Iterator

import cv2
import numpy as np
from pydantic import ValidationError

from app.models.scene import SceneStream
from app.models.volume import SpikeVolume
from app.schemas.sampler import NoiseConfig, SamplingModel
from app.utils.errors import (
    BadMagicError,
    InvalidCodeError,
    InvalidHeaderError,
    SceneError,
    SpikeFormatError,
    TrailingDataError,
    TruncatedStreamError,
    UnsupportedVersionError,
)

logger = logging.getLogger(__name__)

# =========================
# КОНСТАНТЫ ФОРМАТА
# =========================

MAGIC = b"RVS1"
VERSION = 1

_FIXED_HEADER = struct.Struct("<4sHBIIIH")
_NOISE_BLOCK = struct.Struct("<B7d")
_SEED = struct.Struct("<Q")

CODE_ZERO = 0b00
CODE_POSITIVE = 0b01
CODE_NEGATIVE = 0b10
CODE_RESERVED = 0b11

# Сдвиги четырёх пар в байте, старшая пара первой
_SHIFTS = np.array([6, 4, 2, 0], dtype=np.uint8)

IMAGE_SUFFIXES = {".png", ".bmp", ".pgm", ".tif", ".tiff", ".jpg", ".jpeg"}


def header_size(n_scales: int) -> int:
    return _FIXED_HEADER.size + 16 * n_scales + _NOISE_BLOCK.size + _SEED.size


def plane_bytes(height: int, width: int) -> int:
    return -(-(height * width) // 4)

# =========================
# УПАКОВКА
# =========================

def pack_planes(planes: np.ndarray) -> bytes:
    """
    Упаковать плоскости (..., H, W) по 2 бита; каждая плоскость с выравниванием
    """
    height, width = planes.shape[-2:]
    flat = planes.reshape(-1, height * width)
    codes = np.zeros((flat.shape[0], plane_bytes(height, width) * 4), dtype=np.uint8)
    codes[:, :height * width][flat > 0] = CODE_POSITIVE
    codes[:, :height * width][flat < 0] = CODE_NEGATIVE
    packed = (codes.reshape(flat.shape[0], -1, 4) << _SHIFTS).sum(axis=2, dtype=np.uint8)
    return packed.tobytes()


def unpack_plane(data: bytes, height: int, width: int) -> np.ndarray:
    """
    Распаковать одну плоскость H x W

    Raises:
        InvalidCodeError: Встретился код 11 или ненулевое выравнивание
    """
    raw = np.frombuffer(data, dtype=np.uint8)
    codes = ((raw[:, None] >> _SHIFTS) & 0b11).reshape(-1)
    if np.any(codes == CODE_RESERVED):
        raise InvalidCodeError(f"Reserved code 11 at payload offset {int(np.argmax(codes == CODE_RESERVED)) // 4}")
    if np.any(codes[height * width:]):
        raise InvalidCodeError("Non-zero padding after the last spike of a plane")

    plane = np.zeros(height * width, dtype=np.int8)
    values = codes[:height * width]
    plane[values == CODE_POSITIVE] = 1
    plane[values == CODE_NEGATIVE] = -1
    return plane.reshape(height, width)

# =========================
# ЗАГОЛОВОК
# =========================

def _encode_header(volume: SpikeVolume) -> bytes:
    n = volume.n_scales
    noise = volume.noise
    noise_values = noise.as_tuple() if noise is not None else (0.0,) * 7
    return b"".join((
        _FIXED_HEADER.pack(
            MAGIC, VERSION, int(volume.model),
            volume.height, volume.width, volume.length, n,
        ),
        struct.pack(f"<{n}d", *volume.scales),
        struct.pack(f"<{n}d", *volume.thresholds),
        _NOISE_BLOCK.pack(1 if noise is not None else 0, *noise_values),
        _SEED.pack(volume.seed),
    ))


def _read_exact(source: BinaryIO, size: int, what: str) -> bytes:
    data = source.read(size)
    if len(data) != size:
        raise TruncatedStreamError(f"Stream ended inside {what}: expected {size} bytes, got {len(data)}")
    return data


def read_header(source: BinaryIO) -> dict:
    """
    Прочитать и проверить заголовок

    Raises:
        BadMagicError, UnsupportedVersionError, TruncatedStreamError, InvalidHeaderError,
        SpikeFormatError
    """
    head = source.read(_FIXED_HEADER.size)
    if len(head) >= 4 and head[:4] != MAGIC:
        raise BadMagicError(f"Not a spike stream: magic {head[:4]!r}, expected {MAGIC!r}")
    if len(head) != _FIXED_HEADER.size:
        raise TruncatedStreamError("Stream ended inside the header")

    magic, version, model, height, width, length, n_scales = _FIXED_HEADER.unpack(head)
    if version != VERSION:
        raise UnsupportedVersionError(f"Unsupported format version {version}, expected {VERSION}")
    try:
        model = SamplingModel(model)
    except ValueError:
        raise SpikeFormatError(f"Unknown sampling model code {model}")
    if n_scales < 1:
        raise SpikeFormatError("Header declares no scales")
    if model == SamplingModel.FSM and n_scales != 1:
        raise SpikeFormatError(f"FSM stream must have one scale, header declares {n_scales}")

    scales = struct.unpack(f"<{n_scales}d", _read_exact(source, 8 * n_scales, "scales"))
    thresholds = struct.unpack(f"<{n_scales}d", _read_exact(source, 8 * n_scales, "thresholds"))
    enabled, *noise_values = _NOISE_BLOCK.unpack(_read_exact(source, _NOISE_BLOCK.size, "noise parameters"))
    (seed,) = _SEED.unpack(_read_exact(source, _SEED.size, "seed"))

    if not all(math.isfinite(s) and s > 0 for s in scales):
        raise InvalidHeaderError(f"Scales must be positive and finite, header has {list(scales)}")
    if not all(math.isfinite(p) and p > 0 for p in thresholds):
        raise InvalidHeaderError(f"Thresholds must be positive and finite, header has {list(thresholds)}")
    if enabled not in (0, 1):
        raise InvalidHeaderError(f"Noise flag must be 0 or 1, got {enabled}")

    noise = None
    if enabled:
        keys = ("e1", "e2", "e3", "beta1", "beta2", "beta3", "k")
        try:
            noise = NoiseConfig(**dict(zip(keys, noise_values)))
        except ValidationError as e:
            raise InvalidHeaderError(f"Invalid noise parameters in header: {e.errors()[0]['msg']}")

    return {
        "model": model,
        "height": height,
        "width": width,
        "length": length,
        "scales": scales,
        "thresholds": thresholds,
        "noise": noise,
        "seed": seed,
    }

# =========================
# КОДЕК
# =========================

def encode_volume(volume: SpikeVolume, sink: BinaryIO) -> int:
    """
    Записать поток спайков

    Returns:
        Число записанных байт
    """
    written = sink.write(_encode_header(volume))
    for t in range(volume.length):
        written += sink.write(pack_planes(volume.spikes[t]))
    logger.debug(f"Encoded {volume.length}x{volume.n_scales} planes, {written} bytes")
    return written


def iter_planes(source: BinaryIO, header: dict | None = None) -> Iterator[tuple[int, int, np.ndarray]]:
    """
    Читать поток по одной плоскости

    Yields:
        (t, индекс масштаба, плоскость H x W), t начинается с 1
    """
    header = header or read_header(source)
    height, width = header["height"], header["width"]
    size = plane_bytes(height, width)
    for t in range(1, header["length"] + 1):
        for scale_index in range(len(header["scales"])):
            data = _read_exact(source, size, f"plane t={t}, scale={scale_index}")
            yield t, scale_index, unpack_plane(data, height, width)


def decode_volume(source: BinaryIO | bytes) -> SpikeVolume:
    """
    Прочитать поток спайков целиком

    Raises:
        SpikeFormatError: Любая ошибка формата (частичный том не возвращается)
    """
    if isinstance(source, (bytes, bytearray)):
        source = io.BytesIO(source)

    header = read_header(source)
    n_scales = len(header["scales"])
    spikes = np.zeros((header["length"], n_scales, header["height"], header["width"]), dtype=np.int8)
    for t, scale_index, plane in iter_planes(source, header):
        spikes[t - 1, scale_index] = plane

    if source.read(1):
        raise TrailingDataError("Unexpected bytes after the last spike plane")

    try:
        return SpikeVolume(
            model=header["model"],
            scales=header["scales"],
            thresholds=header["thresholds"],
            spikes=spikes,
            noise=header["noise"],
            seed=header["seed"],
        )
    except ValueError as e:
        raise SpikeFormatError(f"Inconsistent spike stream: {e}")


def save_volume(volume: SpikeVolume, path: Path | str) -> int:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("wb") as sink:
        written = encode_volume(volume, sink)
    logger.info(f"Wrote {path} ({written} bytes)")
    return written


def load_volume(path: Path | str) -> SpikeVolume:
    with Path(path).open("rb") as source:
        return decode_volume(source)

# =========================
# КАДРЫ
# =========================

def read_scene(directory: Path | str) -> SceneStream:
    """
    Прочитать каталог 8-битных серых кадров в лексикографическом порядке имён

    Raises:
        SceneError: Нет каталога или кадров, файл не читается, размеры различаются
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise SceneError(f"Scene directory not found: {directory}")

    paths = sorted(
        (p for p in directory.iterdir() if p.is_file() and p.suffix.lower() in IMAGE_SUFFIXES),
        key=lambda p: p.name,
    )
    if not paths:
        raise SceneError(f"No image frames in {directory}")

    frames = []
    for path in paths:
        image = cv2.imread(str(path), cv2.IMREAD_GRAYSCALE)
        if image is None:
            raise SceneError(f"Cannot read image {path}")
        if frames and image.shape != frames[0].shape:
            raise SceneError(
                f"Frame {path.name} has size {image.shape}, expected {frames[0].shape}"
            )
        frames.append(image)

    logger.info(f"Read {len(frames)} frames of {frames[0].shape} from {directory}")
    return SceneStream(np.stack(frames).astype(np.float64))


def write_images(frames: np.ndarray, directory: Path | str, prefix: str = "frame") -> list[Path]:
    """
    Записать кадры как 8-битные PNG с номерами, дополненными нулями

    Значения округляются и обрезаются до [0, 255].
    """
    frames = np.asarray(frames, dtype=np.float64)
    if frames.ndim != 3:
        raise SceneError(f"Frames must be T x H x W, got {frames.shape}")

    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    digits = max(4, len(str(frames.shape[0] - 1)))
    pixels = np.clip(np.rint(frames), 0, 255).astype(np.uint8)

    paths = []
    for index, image in enumerate(pixels):
        path = directory / f"{prefix}_{index:0{digits}d}.png"
        if not cv2.imwrite(str(path), image):
            raise SceneError(f"Cannot write image {path}")
        paths.append(path)

    logger.info(f"Wrote {len(paths)} frames to {directory}")
    return paths
