import functools
import logging
from pathlib import Path

import typer
import yaml
from pydantic import ValidationError
from rich.console import Console

from app.models.scene import SceneStream
from app.schemas.kernel import BankName
from app.schemas.run import NoiseSection, RunConfig, SceneSection, SceneSource
from app.schemas.sampler import NoiseConfig
from app.services.scenes import synth_scene
from app.services.spikeio import read_scene
from app.utils.errors import ConfigError, SpikeSimError

logger = logging.getLogger(__name__)

console = Console()

# Коды выхода CLI
EXIT_USAGE = 2
EXIT_INTERNAL = 1


def handle_errors(command):
    """
    Превратить исключения сервисов в диагностику и код выхода

    SpikeSimError и ошибки файловой системы -> код 2,
    всё остальное логируется с трейсбеком -> код 1.
    """
    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except typer.Exit:
            raise
        except SpikeSimError as e:
            logger.error(f"{type(e).__name__}: {e}")
            typer.echo(f"Error ({type(e).__name__}): {e}", err=True)
            raise typer.Exit(EXIT_USAGE)
        except OSError as e:
            logger.error(f"I/O error: {e}")
            typer.echo(f"Error (I/O): {e}", err=True)
            raise typer.Exit(EXIT_USAGE)
        except Exception as e:
            logger.error(f"Unhandled exception: {e}", exc_info=True)
            typer.echo(f"Internal error: {e}", err=True)
            raise typer.Exit(EXIT_INTERNAL)

    return wrapper


def _read_yaml(path: Path) -> dict:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"Config file not found: {path}")
    try:
        data = yaml.safe_load(path.read_text()) or {}
    except yaml.YAMLError as e:
        raise ConfigError(f"Config {path} is not valid YAML: {e}")
    if not isinstance(data, dict):
        raise ConfigError(f"Config {path} must be a mapping")
    return data


def load_run_config(path: Path) -> RunConfig:
    """
    Прочитать и провалидировать YAML-конфигурацию прогона

    Raises:
        ConfigError: Файл не найден, не YAML или не проходит схему
    """
    data = _read_yaml(path)
    try:
        run = RunConfig(**data)
    except ValidationError as e:
        raise ConfigError(f"Invalid config {path}: {e}")
    logger.info(f"Loaded run config {path}")
    return run


def load_noise_config(path: Path) -> NoiseConfig:
    """
    Прочитать из YAML только блок noise (остальные разделы не проверяются)

    Без блока noise берутся значения по умолчанию.

    Raises:
        ConfigError: Блок noise не проходит схему или выключен
    """
    section = _read_yaml(path).get("noise") or {}
    if not isinstance(section, dict):
        raise ConfigError(f"Section 'noise' in {path} must be a mapping")
    try:
        noise = NoiseSection(**section).to_config()
    except ValidationError as e:
        raise ConfigError(f"Invalid noise section in {path}: {e}")
    if noise is None:
        raise ConfigError(f"Noise is disabled in {path}; a robustness sweep needs noise")
    logger.info(f"Loaded noise parameters from {path}")
    return noise


def load_scene(section: SceneSection) -> SceneStream:
    if section.source == SceneSource.DIRECTORY:
        return read_scene(section.path)
    return synth_scene(section.kind, **section.model_dump(exclude={"source", "kind", "path"}))


def write_yaml(data: dict, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(yaml.safe_dump(data, sort_keys=False, allow_unicode=True))
    logger.info(f"Wrote report {path}")
    return path


def parse_models(text: str) -> list[BankName]:
    models = []
    for name in (part.strip() for part in text.split(",")):
        if not name:
            continue
        try:
            models.append(BankName(name))
        except ValueError:
            known = ", ".join(b.value for b in BankName)
            raise ConfigError(f"Unknown model '{name}'. Known models: {known}")
    if not models:
        raise ConfigError("No models given")
    return models
