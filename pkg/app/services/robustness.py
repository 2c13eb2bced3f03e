import csv
import logging
from concurrent.futures import ThreadPoolExecutor
from functools import partial
from pathlib import Path

import numpy as np

from app.config import settings
from app.models.scene import SceneStream
from app.schemas.kernel import BankName
from app.schemas.metrics import RobustnessReport, RobustnessRow
from app.schemas.sampler import NoiseConfig
from app.schemas.scene import SceneKind
from app.services.metrics import robustness_report
from app.services.sampler import make_sampler_config, sample_sequence
from app.services.scenes import synth_scene
from app.utils.errors import ConfigError

logger = logging.getLogger(__name__)

DEFAULT_MODELS = (
    BankName.FSM,
    BankName.ONE_DOG,
    BankName.TWO_DOG,
    BankName.THREE_DOG,
    BankName.FOUR_DOG,
)


def parse_sweep(text: str) -> list[float]:
    """
    Разобрать развёртку 'a:b:n' в n равномерных значений от a до b

    Raises:
        ConfigError: Неверный формат или n < 1
    """
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"k sweep must look like 'a:b:n', got '{text}'")
    try:
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ConfigError(f"k sweep must look like 'a:b:n', got '{text}'")
    if count < 1:
        raise ConfigError(f"k sweep needs at least one point, got {count}")
    if min(start, stop) < 0:
        raise ConfigError("Noise intensity k must be non-negative")
    return [float(k) for k in np.linspace(start, stop, count)]


def _seed_report(
    scene: SceneStream,
    name: str,
    threshold: float,
    noise: NoiseConfig,
    k: float,
    seed: int,
) -> RobustnessReport:
    config = make_sampler_config(name, threshold=threshold, noise=noise, seed=seed)
    return robustness_report(sample_sequence(scene, config, 1), k, name)


def run_sweep(
    ks: list[float],
    models: list[BankName | str] = DEFAULT_MODELS,
    seeds: int = 10,
    height: int = 100,
    width: int = 100,
    length: int = 1000,
    threshold: float = 400.0,
    noise: NoiseConfig | None = None,
    first_seed: int = 0,
    threads: int | None = None,
) -> list[RobustnessRow]:
    """
    Развёртка по интенсивности шума на чёрной сцене

    Для каждой пары (k, модель) индексы I1, I2, I3 усредняются по сидам
    first_seed .. first_seed + seeds - 1. При threads > 1 сиды считаются
    параллельно, каждый прогон в одном потоке.
    """
    if seeds < 1:
        raise ConfigError(f"Need at least one seed, got {seeds}")
    workers = threads or settings.NUM_THREADS
    base = noise or NoiseConfig()
    scene = synth_scene(SceneKind.BLACK, height=height, width=width, length=length)

    rows = []
    for k in ks:
        noise_k = base.model_copy(update={"k": k})
        for model in models:
            name = BankName(model).value
            run_seed = partial(_seed_report, scene, name, threshold, noise_k, k)
            seed_range = range(first_seed, first_seed + seeds)
            if workers > 1:
                with ThreadPoolExecutor(max_workers=workers) as pool:
                    reports = list(pool.map(run_seed, seed_range))
            else:
                reports = [run_seed(seed) for seed in seed_range]

            row = RobustnessRow(
                k=k,
                model=name,
                seeds=seeds,
                ass=float(np.mean([r.ass for r in reports])),
                asas=float(np.mean([r.asas for r in reports])),
                asass=[float(v) for v in np.mean([r.asass for r in reports], axis=0)],
            )
            logger.info(f"k={k:g} {name}: I1={row.ass:.4f} I2={row.asas:.6f}")
            rows.append(row)
    return rows


def write_table(rows: list[RobustnessRow], path: Path | str) -> Path:
    """
    Таблица для построения графиков: k, model, seeds, I1, I2, I3_scale1..N
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    n_scales = max((len(r.asass) for r in rows), default=0)

    with path.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["k", "model", "seeds", "I1", "I2"] + [f"I3_scale{i + 1}" for i in range(n_scales)])
        for row in rows:
            i3 = [repr(v) for v in row.asass] + [""] * (n_scales - len(row.asass))
            writer.writerow([repr(row.k), row.model, row.seeds, repr(row.ass), repr(row.asas)] + i3)

    logger.info(f"Wrote robustness table {path} ({len(rows)} rows)")
    return path
