import csv
import logging
import math
from pathlib import Path
from typing import Optional

import click
import typer
from rich.table import Table

from app.api.common import console, handle_errors, load_noise_config, parse_models, write_yaml
from app.schemas.reconstruction import BrightnessAdjust, ReconstructionConfig
from app.schemas.sampler import NoiseConfig
from app.schemas.scene import SceneKind
from app.services.comparison import ALL_MODELS, run_comparison, write_quality_table
from app.services.filter_bank import HALF_WIDTH_UNIT
from app.services.metrics import evaluate_sequence
from app.services.reconstructor import reconstruct_sequence
from app.services.scenes import synth_scene
from app.services.spikeio import load_volume, read_scene, write_images
from app.utils.errors import ConfigError

logger = logging.getLogger(__name__)

# Значения --adjust
ADJUST_OPTIONS = {
    "none": BrightnessAdjust.NONE,
    "mean": BrightnessAdjust.MATCH_MEAN,
    "mean_std": BrightnessAdjust.MATCH_MEAN_STD,
}


# =========================
# RECONSTRUCT
# =========================

@handle_errors
def cmd_reconstruct(
    spikes: Path = typer.Argument(..., help="Input .spk file"),
    out_dir: Path = typer.Argument(..., help="Directory for reconstructed frames"),
    ref: Optional[Path] = typer.Option(None, "--ref", help="Reference frames for brightness adjustment"),
    adjust: Optional[str] = typer.Option(
        None,
        "--adjust",
        click_type=click.Choice(sorted(ADJUST_OPTIONS)),
        help="Brightness adjustment (default: mean with --ref, none without)",
    ),
    clamp: bool = typer.Option(True, "--clamp/--no-clamp", help="Clamp output to [0, 255]"),
    half_width_unit: float = typer.Option(HALF_WIDTH_UNIT, help="Sigma that maps to a 3x3 template"),
):
    """
    Восстановить кадры из потока спайков
    """
    volume = load_volume(spikes)
    reference = read_scene(ref) if ref is not None else None

    if adjust is None:
        adjust = "mean" if reference is not None else "none"
    config = ReconstructionConfig(brightness_adjust=ADJUST_OPTIONS[adjust], clamp=clamp)

    frames = reconstruct_sequence(volume, config, reference=reference, half_width_unit=half_width_unit)
    paths = write_images(frames, out_dir)
    typer.echo(f"Wrote {len(paths)} frames to {out_dir}")


# =========================
# EVALUATE
# =========================

def _format_db(value: float) -> str:
    return "inf" if math.isinf(value) else f"{value:.2f}"


def write_frame_table(report, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["frame", "mse", "psnr", "ssim"])
        for frame in report.frames:
            writer.writerow([frame.index, repr(frame.mse), repr(frame.psnr), repr(frame.ssim)])
    logger.info(f"Wrote per-frame table {path}")
    return path


@handle_errors
def cmd_evaluate(
    recon_dir: Path = typer.Argument(..., help="Reconstructed frames"),
    ref_dir: Path = typer.Argument(..., help="Reference frames"),
    report: Optional[Path] = typer.Option(None, "--report", help="YAML report path"),
    table: Optional[Path] = typer.Option(None, "--table", help="Per-frame CSV table path"),
):
    """
    Сравнить реконструкцию с эталоном: MSE, PSNR, SSIM
    """
    reconstruction = read_scene(recon_dir)
    reference = read_scene(ref_dir)
    result = evaluate_sequence(reconstruction.frames, reference.frames)

    if report is not None:
        write_yaml(result.model_dump(), report)
    if table is not None:
        write_frame_table(result, table)

    summary = Table(title="Reconstruction quality")
    summary.add_column("Frames", justify="right")
    summary.add_column("MSE", justify="right")
    summary.add_column("PSNR, dB", justify="right")
    summary.add_column("SSIM", justify="right")
    summary.add_row(
        str(len(result.frames)),
        f"{result.mse:.4f}",
        _format_db(result.psnr),
        f"{result.ssim:.4f}",
    )
    console.print(summary)

# =========================
# COMPARE
# =========================

@handle_errors
def cmd_compare(
    scene_dir: Optional[Path] = typer.Argument(None, help="Directory of grayscale frames"),
    kind: Optional[SceneKind] = typer.Option(None, help="Synthetic scene kind instead of SCENE_DIR"),
    height: int = typer.Option(100, help="Synthetic frame height H"),
    width: int = typer.Option(100, help="Synthetic frame width W"),
    length: int = typer.Option(1000, help="Synthetic number of frames T"),
    period: int = typer.Option(200, help="Rotating bar period, frames"),
    models: str = typer.Option(",".join(m.value for m in ALL_MODELS), help="Comma-separated model names"),
    threshold: float = typer.Option(400.0, help="Firing threshold phi"),
    noise: bool = typer.Option(True, "--noise/--no-noise", help="Also run every model with sensor noise"),
    k: float = typer.Option(1.0, help="Noise intensity multiplier"),
    config: Optional[Path] = typer.Option(None, "--config", "-c", help="YAML config with a noise block"),
    seed: int = typer.Option(0, help="Noise seed"),
    skip: int = typer.Option(0, help="Leading frames left out of the metrics"),
    adjust: str = typer.Option(
        "mean",
        "--adjust",
        click_type=click.Choice(sorted(ADJUST_OPTIONS)),
        help="Brightness adjustment against the scene",
    ),
    table: Path = typer.Option(Path("quality.csv"), "--table", help="Output CSV table"),
    threads: Optional[int] = typer.Option(None, help="Worker threads (default RVSIM_NUM_THREADS)"),
):
    """
    Сравнить модели по качеству реконструкции одной сцены, с шумом и без
    """
    if (scene_dir is None) == (kind is None):
        raise ConfigError("Provide either a scene directory or --kind")
    if scene_dir is not None:
        scene, scene_name = read_scene(scene_dir), scene_dir.name
    else:
        scene = synth_scene(kind, height=height, width=width, length=length, period=period)
        scene_name = kind.value

    if k < 0:
        raise ConfigError(f"Noise intensity k must be non-negative, got {k}")
    noise_config = None
    if noise:
        base = load_noise_config(config) if config is not None else NoiseConfig()
        noise_config = base.model_copy(update={"k": k})

    rows = run_comparison(
        scene,
        scene_name,
        models=parse_models(models),
        noise=noise_config,
        threshold=threshold,
        seed=seed,
        skip_frames=skip,
        reconstruction=ReconstructionConfig(brightness_adjust=ADJUST_OPTIONS[adjust]),
        threads=threads,
    )
    write_quality_table(rows, table)

    summary = Table(title=f"Reconstruction quality: {scene_name}")
    summary.add_column("Model")
    summary.add_column("Noise")
    summary.add_column("Spikes", justify="right")
    summary.add_column("MSE", justify="right")
    summary.add_column("PSNR, dB", justify="right")
    summary.add_column("SSIM", justify="right")
    for row in rows:
        summary.add_row(
            row.model,
            f"k={row.k:g}" if row.noise else "-",
            str(row.spikes),
            f"{row.mse:.4f}",
            _format_db(row.psnr),
            f"{row.ssim:.4f}",
        )
    console.print(summary)
