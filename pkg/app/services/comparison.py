import csv
import logging
from pathlib import Path

from app.models.scene import SceneStream
from app.schemas.kernel import BankName
from app.schemas.metrics import QualityRow
from app.schemas.reconstruction import ReconstructionConfig
from app.schemas.sampler import NoiseConfig
from app.services.metrics import evaluate_sequence
from app.services.reconstructor import reconstruct_sequence
from app.services.sampler import make_sampler_config, sample_sequence
from app.utils.errors import ConfigError

logger = logging.getLogger(__name__)

ALL_MODELS = tuple(BankName)


def run_comparison(
    scene: SceneStream,
    scene_name: str,
    models: list[BankName | str] = ALL_MODELS,
    noise: NoiseConfig | None = None,
    include_clean: bool = True,
    threshold: float = 400.0,
    seed: int = 0,
    skip_frames: int = 0,
    reconstruction: ReconstructionConfig | None = None,
    threads: int | None = None,
) -> list[QualityRow]:
    """
    Сравнение моделей по качеству реконструкции одной сцены

    Для каждой модели сцена сэмплируется без шума (include_clean) и с шумом
    (если задан noise), восстанавливается и сравнивается с самой сценой.
    Первые skip_frames кадров в оценку не входят: до первых спайков
    реконструкция ещё пустая.

    Raises:
        ConfigError: Нечего сравнивать или skip_frames не оставляет кадров
    """
    if not 0 <= skip_frames < scene.length:
        raise ConfigError(f"skip_frames must be in [0, {scene.length}), got {skip_frames}")
    variants = ([None] if include_clean else []) + ([noise] if noise is not None else [])
    if not variants:
        raise ConfigError("Nothing to compare: clean runs are off and no noise is given")
    if not models:
        raise ConfigError("No models given")

    rows = []
    for model in models:
        name = BankName(model).value
        for variant in variants:
            config = make_sampler_config(name, threshold=threshold, noise=variant, seed=seed)
            volume = sample_sequence(scene, config, threads)
            frames = reconstruct_sequence(volume, reconstruction, reference=scene, bank=config.bank)
            report = evaluate_sequence(frames[skip_frames:], scene.frames[skip_frames:])

            row = QualityRow(
                scene=scene_name,
                model=name,
                noise=variant is not None,
                k=variant.k if variant is not None else 0.0,
                seed=seed,
                spikes=volume.total_spikes(),
                frames=len(report.frames),
                mse=report.mse,
                psnr=report.psnr,
                ssim=report.ssim,
            )
            logger.info(
                f"{scene_name} {name} noise={row.noise}: "
                f"MSE={row.mse:.4f} PSNR={row.psnr:.4f} SSIM={row.ssim:.4f}"
            )
            rows.append(row)
    return rows


def write_quality_table(rows: list[QualityRow], path: Path | str) -> Path:
    """
    Таблица сравнения: scene, model, noise, k, seed, spikes, frames, MSE, PSNR, SSIM
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    columns = ["scene", "model", "noise", "k", "seed", "spikes", "frames", "mse", "psnr", "ssim"]

    with path.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([
                row.scene, row.model, int(row.noise), repr(row.k), row.seed, row.spikes,
                row.frames, repr(row.mse), repr(row.psnr), repr(row.ssim),
            ])

    logger.info(f"Wrote quality table {path} ({len(rows)} rows)")
    return path
