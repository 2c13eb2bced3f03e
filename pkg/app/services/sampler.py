import logging
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from pydantic import ValidationError

from app.config import settings
from app.models.accumulator import AccumulatorGrid
from app.models.scene import SceneStream
from app.models.volume import SpikeVolume
from app.schemas.kernel import BankName, KernelKind
from app.schemas.run import RunConfig
from app.schemas.sampler import NoiseConfig, ResetMode, SamplerConfig, SamplingModel
from app.services.convolution import ClippedFilter
from app.services.filter_bank import make_bank, model_for_bank, standard_bank
from app.services.noise import dark_current, realize_noise
from app.utils.errors import ConfigError, KernelError, SceneError, ShapeMismatchError, TimeOrderError

logger = logging.getLogger(__name__)


class SamplerService:
    """
    CONTROLLER: Сэмплирование integrate-and-fire для FSM и RVSM

    Каждый аккумулятор (масштаб, x0, y0) накапливает взвешенную яркость своего
    рецептивного поля и выпускает спайк +1 (-1), когда накопление достигает
    порога (отрицательного порога), после чего сбрасывается.

    Объект принадлежит одному прогону; результат (SpikeVolume) неизменяем.
    """

    # Допуск сравнения с порогом (цифровые единицы яркости)
    FIRE_TOLERANCE = 1e-9

    # Сколько кадров фильтруется за один проход
    CHUNK_STEPS = 64

    def __init__(self, config: SamplerConfig, height: int, width: int, threads: int | None = None):
        self.config = config
        self.height = height
        self.width = width
        self.threads = threads or settings.NUM_THREADS

        self.filters = [ClippedFilter(kernel, height, width) for kernel in config.bank.kernels]
        self.n_scales = len(self.filters)

        self.noise = None
        if config.noise is not None:
            self.noise = realize_noise(config.noise, config.seed, (self.n_scales, height, width))

        self.trigger = self._trigger_levels()
        self.upper = self.trigger - self.FIRE_TOLERANCE
        self.lower = -self.trigger + self.FIRE_TOLERANCE
        # У FSM нет отрицательной ветки
        self.allow_negative = config.model != SamplingModel.FSM

    # =========================
    # ПОРОГИ
    # =========================

    def _trigger_levels(self) -> np.ndarray:
        """
        Уровень срабатывания каждого аккумулятора: theta * phi + V_OS

        Без шума theta = 1 и V_OS = 0.
        """
        phi = np.asarray(self.config.thresholds, dtype=np.float64)[:, None, None]
        if self.noise is None:
            return np.broadcast_to(phi, (self.n_scales, self.height, self.width)).copy()
        return self.noise.theta * phi + self.noise.v_os

    # =========================
    # НАКОПЛЕНИЕ И СПАЙКИ
    # =========================

    def new_state(self) -> AccumulatorGrid:
        return AccumulatorGrid.zeros(self.n_scales, self.height, self.width)

    def drive(self, frames: np.ndarray, t_start: int, pool: ThreadPoolExecutor | None = None) -> np.ndarray:
        """
        Приращения аккумуляторов для кадров в моменты t_start .. t_start + n - 1

        Args:
            frames: n x H x W
            t_start: Момент сэмплирования первого кадра (с 1)

        Returns:
            Массив n x |P| x H x W
        """
        count = frames.shape[0]

        def one_scale(scale_index: int) -> np.ndarray:
            planes = frames
            if self.noise is not None:
                planes = dark_current(self.noise, scale_index, t_start, count)
                planes += frames
            return self.filters[scale_index].analyze(planes)

        if pool is None:
            increments = [one_scale(s) for s in range(self.n_scales)]
        else:
            increments = list(pool.map(one_scale, range(self.n_scales)))
        return np.stack(increments, axis=1)

    def fire(self, state: AccumulatorGrid, increment: np.ndarray) -> np.ndarray:
        """
        Добавить приращение и выпустить спайки

        Returns:
            Плоскости спайков |P| x H x W со значениями {-1, 0, +1}
        """
        values = state.values
        values += increment

        positive = values >= self.upper
        if not self.allow_negative:
            if self.config.reset_mode == ResetMode.ZERO:
                np.copyto(values, 0.0, where=positive)
            else:
                np.subtract(values, self.trigger, out=values, where=positive)
            return positive.view(np.int8)

        negative = values <= self.lower
        negative &= ~positive
        if self.config.reset_mode == ResetMode.ZERO:
            np.copyto(values, 0.0, where=positive | negative)
        else:
            np.subtract(values, self.trigger, out=values, where=positive)
            np.add(values, self.trigger, out=values, where=negative)

        return positive.view(np.int8) - negative.view(np.int8)

    def step_accumulators(self, state: AccumulatorGrid, frame: np.ndarray, t: int) -> tuple[AccumulatorGrid, np.ndarray]:
        """
        Один шаг сэмплирования

        Args:
            state: Состояние аккумуляторов
            frame: Кадр яркости H x W
            t: Момент сэмплирования (на 1 больше предыдущего)

        Returns:
            (состояние, плоскости спайков |P| x H x W)

        Raises:
            ShapeMismatchError: Размер кадра не совпадает с состоянием
            TimeOrderError: t не равен state.t + 1
        """
        frame = np.asarray(frame, dtype=np.float64)
        if frame.shape != (self.height, self.width) or state.shape != (self.n_scales, self.height, self.width):
            raise ShapeMismatchError(
                f"Frame {frame.shape} does not match accumulators {state.shape}"
            )
        if t != state.t + 1:
            raise TimeOrderError(f"Expected step {state.t + 1}, got {t}")

        increment = self.drive(frame[None], t)[0]
        spikes = self.fire(state, increment)
        state.t = t
        return state, spikes

    def sample_sequence(self, scene: SceneStream) -> SpikeVolume:
        """
        Прогнать всю сцену с нулевого накопления (t_pre = 0)

        Кадры фильтруются блоками по CHUNK_STEPS, спайки считаются
        последовательно; результат совпадает с вызовами step_accumulators.
        """
        if scene.length == 0:
            raise SceneError("Scene has no frames")
        if scene.shape != (self.height, self.width):
            raise ShapeMismatchError(
                f"Scene {scene.shape} does not match sampler {(self.height, self.width)}"
            )

        state = self.new_state()
        spikes = np.zeros((scene.length, self.n_scales, self.height, self.width), dtype=np.int8)

        pool = ThreadPoolExecutor(max_workers=self.threads) if self.threads > 1 else None
        try:
            for start in range(0, scene.length, self.CHUNK_STEPS):
                frames = scene.frames[start:start + self.CHUNK_STEPS]
                increments = self.drive(frames, start + 1, pool)
                for offset in range(frames.shape[0]):
                    spikes[start + offset] = self.fire(state, increments[offset])
                state.t = start + frames.shape[0]
                logger.debug(f"Sampled steps {start + 1}..{state.t}")
        finally:
            if pool is not None:
                pool.shutdown()

        volume = SpikeVolume(
            model=self.config.model,
            scales=self.config.bank.scales,
            thresholds=self.config.thresholds,
            spikes=spikes,
            noise=self.config.noise,
            seed=self.config.seed,
        )
        logger.info(
            f"Sampled {self.config.model.name} ({self.config.bank.name or 'custom bank'}): "
            f"T={scene.length}, {self.height}x{self.width}, spikes={volume.total_spikes()}"
        )
        return volume


def sample_sequence(scene: SceneStream, config: SamplerConfig, threads: int | None = None) -> SpikeVolume:
    """
    Сэмплировать сцену по конфигурации
    """
    return SamplerService(config, scene.height, scene.width, threads).sample_sequence(scene)


def make_sampler_config(
    bank_name: BankName | str,
    threshold: float = 400.0,
    noise: NoiseConfig | None = None,
    seed: int = 0,
    reset_mode: ResetMode = ResetMode.ZERO,
    per_scale_threshold: list[float] | None = None,
) -> SamplerConfig:
    """
    Конфигурация для стандартного банка
    """
    return SamplerConfig(
        model=model_for_bank(bank_name),
        bank=standard_bank(bank_name),
        threshold=threshold,
        per_scale_threshold=per_scale_threshold,
        noise=noise,
        seed=seed,
        reset_mode=reset_mode,
    )


def config_from_run(run: RunConfig) -> SamplerConfig:
    """
    Конфигурация сэмплера из YAML-конфигурации прогона

    Raises:
        ConfigError: Конфигурация не проходит проверку
    """
    try:
        if run.model is not None:
            bank = standard_bank(run.model)
            model = model_for_bank(run.model)
        else:
            bank = make_bank(run.kind, run.scales, half_width_unit=run.half_width_unit)
            model = SamplingModel.RVSM_DOG if run.kind == KernelKind.DOG else SamplingModel.RVSM_GAUSS

        return SamplerConfig(
            model=model,
            bank=bank,
            threshold=run.threshold,
            per_scale_threshold=run.per_scale_threshold,
            noise=run.noise.to_config() if run.noise is not None else None,
            seed=run.seed,
            reset_mode=run.reset_mode,
        )
    except KernelError as e:
        raise ConfigError(f"Invalid filter bank: {e}")
    except ValidationError as e:
        raise ConfigError(f"Invalid sampler settings: {e}")
