import logging
from pathlib import Path
from typing import Optional

import typer

# Импорт команд
from app.api import reconstruction, robustness, sampling

logger = logging.getLogger(__name__)

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def setup_logging(verbose: bool = False, log_file: Optional[Path] = None) -> None:
    """
    Настройка логирования: консоль всегда, файл — по --log-file
    """
    handlers: list[logging.Handler] = [logging.StreamHandler()]  # Вывод в консоль (stderr)
    if log_file is not None:
        handlers.append(logging.FileHandler(log_file))  # Запись в файл

    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format=LOG_FORMAT,
        handlers=handlers,
        force=True,
    )


# Создание приложения
cli = typer.Typer(
    name="rvsim",
    help="Spike camera simulator: FSM/RVSM sampling, reconstruction, metrics",
    no_args_is_help=True,
    pretty_exceptions_enable=False,
)


@cli.callback()
def main(
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Debug logging"),
    log_file: Optional[Path] = typer.Option(None, "--log-file", help="Also write logs to this file"),
):
    setup_logging(verbose, log_file)


# Подключение команд
cli.command("synth")(sampling.cmd_synth)
cli.command("sample")(sampling.cmd_sample)
cli.command("reconstruct")(reconstruction.cmd_reconstruct)
cli.command("evaluate")(reconstruction.cmd_evaluate)
cli.command("compare")(reconstruction.cmd_compare)
cli.command("robustness")(robustness.cmd_robustness)


if __name__ == "__main__":
    cli()
