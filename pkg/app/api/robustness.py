import logging
from pathlib import Path
from typing import Optional

import typer
from rich.table import Table

from app.api.common import console, handle_errors, load_noise_config, parse_models
from app.services.robustness import DEFAULT_MODELS, parse_sweep, run_sweep, write_table

logger = logging.getLogger(__name__)


@handle_errors
def cmd_robustness(
    k_sweep: str = typer.Option("0:2:5", "--k-sweep", help="Noise intensity sweep a:b:n"),
    seeds: int = typer.Option(10, help="Seeds per (k, model)"),
    first_seed: int = typer.Option(0, help="First seed of the range"),
    models: str = typer.Option(
        ",".join(m.value for m in DEFAULT_MODELS), help="Comma-separated model names"
    ),
    height: int = typer.Option(100, help="Frame height H"),
    width: int = typer.Option(100, help="Frame width W"),
    length: int = typer.Option(1000, help="Number of steps T"),
    threshold: float = typer.Option(400.0, help="Firing threshold phi"),
    config: Optional[Path] = typer.Option(None, "--config", "-c", help="YAML config with a noise block"),
    table: Path = typer.Option(Path("robustness.csv"), "--table", help="Output CSV table"),
    threads: Optional[int] = typer.Option(None, help="Worker threads (default RVSIM_NUM_THREADS)"),
):
    """
    Развёртка устойчивости к шуму на чёрной сцене: I1, I2, I3 по масштабам
    """
    ks = parse_sweep(k_sweep)
    model_list = parse_models(models)

    noise = load_noise_config(config) if config is not None else None

    rows = run_sweep(
        ks,
        models=model_list,
        seeds=seeds,
        height=height,
        width=width,
        length=length,
        threshold=threshold,
        noise=noise,
        first_seed=first_seed,
        threads=threads,
    )
    write_table(rows, table)

    n_scales = max(len(r.asass) for r in rows)
    summary = Table(title=f"Noise robustness ({seeds} seeds)")
    summary.add_column("k", justify="right")
    summary.add_column("Model")
    summary.add_column("I1", justify="right")
    summary.add_column("I2", justify="right")
    for index in range(n_scales):
        summary.add_column(f"I3 scale {index + 1}", justify="right")
    for row in rows:
        i3 = [f"{v:.6f}" for v in row.asass] + [""] * (n_scales - len(row.asass))
        summary.add_row(f"{row.k:g}", row.model, f"{row.ass:.4f}", f"{row.asas:.6f}", *i3)
    console.print(summary)
