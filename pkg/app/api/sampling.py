import logging
from pathlib import Path
from typing import Optional

import typer
from rich.table import Table

from app.api.common import console, handle_errors, load_run_config, load_scene, write_yaml
from app.schemas.kernel import BankName
from app.schemas.reconstruction import BrightnessAdjust, ReconstructionConfig
from app.schemas.run import NoiseSection, RunConfig, SceneSection, SceneSource
from app.schemas.sampler import ResetMode
from app.schemas.scene import SceneKind
from app.services import metrics
from app.services.reconstructor import reconstruct_sequence
from app.services.sampler import config_from_run, sample_sequence
from app.services.scenes import synth_scene
from app.services.spikeio import save_volume, write_images
from app.utils.errors import ConfigError

logger = logging.getLogger(__name__)


# =========================
# SYNTH
# =========================

@handle_errors
def cmd_synth(
    kind: SceneKind = typer.Argument(..., help="Scene kind"),
    out_dir: Path = typer.Argument(..., help="Directory for the PNG frames"),
    height: int = typer.Option(100, help="Frame height H"),
    width: int = typer.Option(100, help="Frame width W"),
    length: int = typer.Option(1000, help="Number of frames T"),
    intensity: float = typer.Option(200.0, help="Foreground brightness"),
    background: float = typer.Option(20.0, help="Background brightness"),
    period: int = typer.Option(200, help="Rotating bar period, frames"),
    speed: float = typer.Option(1.0, help="Moving edge speed, pixels per frame"),
):
    """
    Сгенерировать синтетическую сцену и записать кадры
    """
    scene = synth_scene(
        kind,
        height=height,
        width=width,
        length=length,
        intensity=intensity,
        background=background,
        period=period,
        speed=speed,
    )
    paths = write_images(scene.frames, out_dir)
    typer.echo(f"Wrote {len(paths)} frames to {out_dir}")


# =========================
# SAMPLE
# =========================

def _run_from_options(
    scene_dir: Optional[Path],
    model: BankName,
    threshold: float,
    noise: bool,
    k: float,
    seed: int,
    reset_mode: ResetMode,
) -> RunConfig:
    if scene_dir is None:
        raise ConfigError("Provide a scene directory or --config")
    return RunConfig(
        model=model,
        threshold=threshold,
        seed=seed,
        reset_mode=reset_mode,
        noise=NoiseSection(k=k) if noise else None,
        scene=SceneSection(source=SceneSource.DIRECTORY, path=str(scene_dir)),
    )


def _sampling_report(run: RunConfig, volume) -> dict:
    return {
        "model": volume.model.name,
        "bank": run.model.value if run.model is not None else f"{run.kind.value}{list(volume.scales)}",
        "scales": list(volume.scales),
        "thresholds": list(volume.thresholds),
        "reset_mode": run.reset_mode.value,
        "noise": volume.noise.model_dump() if volume.noise is not None else None,
        "seed": volume.seed,
        "length": volume.length,
        "height": volume.height,
        "width": volume.width,
        "total_spikes": volume.total_spikes(),
        "ass": metrics.ass(volume),
        "asas": metrics.asas(volume),
        "asass": [metrics.asass(volume, sigma) for sigma in volume.scales],
        "mean_response_time": metrics.mean_response_time(volume),
    }


@handle_errors
def cmd_sample(
    scene_dir: Optional[Path] = typer.Argument(None, help="Directory of grayscale frames"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Output .spk file"),
    config: Optional[Path] = typer.Option(None, "--config", "-c", help="YAML run config"),
    model: BankName = typer.Option(BankName.FSM, help="Sampling model / filter bank"),
    threshold: float = typer.Option(400.0, help="Firing threshold phi"),
    noise: bool = typer.Option(False, "--noise/--no-noise", help="Enable the sensor noise model"),
    k: float = typer.Option(1.0, help="Noise intensity multiplier"),
    seed: int = typer.Option(0, help="Noise seed"),
    reset_mode: ResetMode = typer.Option(ResetMode.ZERO, help="Accumulator reset after a spike"),
    threads: Optional[int] = typer.Option(None, help="Worker threads (default RVSIM_NUM_THREADS)"),
):
    """
    Сэмплировать сцену в поток спайков .spk

    С --config все параметры берутся из YAML; SCENE_DIR, если указан,
    заменяет источник сцены.
    """
    if config is not None:
        run = load_run_config(config)
        if scene_dir is not None:
            run.scene = SceneSection(source=SceneSource.DIRECTORY, path=str(scene_dir))
    else:
        run = _run_from_options(scene_dir, model, threshold, noise, k, seed, reset_mode)

    sampler_config = config_from_run(run)
    scene = load_scene(run.scene)
    logger.info(f"Loaded scene: T={scene.length}, {scene.height}x{scene.width}")

    volume = sample_sequence(scene, sampler_config, threads)
    logger.info(f"Mean response time per scale: {metrics.mean_response_time(volume)}")
    out = out or Path(run.output.spikes)
    save_volume(volume, out)

    if run.output.frames:
        frames = reconstruct_sequence(
            volume,
            ReconstructionConfig(brightness_adjust=BrightnessAdjust.NONE),
            bank=sampler_config.bank,
        )
        write_images(frames, run.output.frames)
    if run.output.report:
        write_yaml(_sampling_report(run, volume), Path(run.output.report))

    table = Table(title=f"Sampled {out}")
    table.add_column("Model")
    table.add_column("T x H x W")
    table.add_column("Scales", justify="right")
    table.add_column("Spikes", justify="right")
    table.add_column("I1", justify="right")
    table.add_row(
        volume.model.name,
        f"{volume.length} x {volume.height} x {volume.width}",
        str(volume.n_scales),
        str(volume.total_spikes()),
        f"{metrics.ass(volume):.4f}",
    )
    console.print(table)
