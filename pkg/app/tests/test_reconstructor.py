import numpy as np
import pytest

from app.models.coefficients import CoefficientGrid
from app.models.scene import SceneStream
from app.models.volume import SpikeVolume
from app.schemas.kernel import BankName
from app.schemas.reconstruction import BrightnessAdjust, ReconstructionConfig
from app.schemas.sampler import SamplingModel
from app.services.filter_bank import standard_bank, unit_bank
from app.services.reconstructor import (
    match_mean,
    reconstruct_sequence,
    synthesize_frame,
    tfi_frame,
    update_coefficients,
)
from app.services.sampler import make_sampler_config, sample_sequence
from app.utils.errors import ModelMismatchError, ReferenceRequiredError, ShapeMismatchError, TimeOrderError

RAW = ReconstructionConfig(brightness_adjust=BrightnessAdjust.NONE, clamp=False)


# =========================
# TFI
# =========================

def test_tfi_exact_for_divisible_intensity(constant_scene):
    """
    Тест 38: I = 100, phi = 400 — первый спайк в t = 4, TFI ровно 100
    """
    volume = sample_sequence(constant_scene(100.0, 3, 3, 12), make_sampler_config(BankName.FSM))

    assert (tfi_frame(volume, 3) == 0.0).all()
    assert (tfi_frame(volume, 4) == 100.0).all()
    assert (tfi_frame(volume, 11) == 100.0).all()


def test_tfi_quantization_for_non_divisible_intensity(constant_scene):
    """
    Тест 39: I = 150, phi = 400 — TFI равен 400/3 = phi / ceil(phi / I)
    """
    volume = sample_sequence(constant_scene(150.0, length=10), make_sampler_config(BankName.FSM))

    assert tfi_frame(volume, 3)[0, 0] == pytest.approx(400.0 / 3.0, abs=1e-9)
    assert tfi_frame(volume, 7)[0, 0] == pytest.approx(400.0 / 3.0, abs=1e-9)


def test_tfi_uses_last_interval():
    """
    Тест 40: TFI считается по последнему межспайковому интервалу
    """
    spikes = np.zeros((10, 1, 1, 2), dtype=np.int8)
    spikes[[1, 4, 9], 0, 0, 0] = 1   # t = 2, 5, 10
    spikes[6, 0, 0, 1] = 1           # t = 7
    volume = SpikeVolume(SamplingModel.FSM, (1.0,), (300.0,), spikes)

    assert tfi_frame(volume, 2)[0, 0] == 150.0
    assert tfi_frame(volume, 9)[0, 0] == 100.0
    assert tfi_frame(volume, 10)[0, 0] == 60.0
    assert tfi_frame(volume, 7)[0, 1] == pytest.approx(300.0 / 7)
    assert tfi_frame(volume, 6)[0, 1] == 0.0


def test_tfi_errors():
    """
    Тест 41: TFI только для FSM и только для t в [1, T]
    """
    rvsm = SpikeVolume(SamplingModel.RVSM_DOG, (0.24,), (400.0,), np.zeros((3, 1, 2, 2)))
    fsm = SpikeVolume(SamplingModel.FSM, (1.0,), (400.0,), np.zeros((3, 1, 2, 2)))

    with pytest.raises(ModelMismatchError):
        tfi_frame(rvsm, 1)
    with pytest.raises(TimeOrderError):
        tfi_frame(fsm, 0)
    with pytest.raises(TimeOrderError):
        tfi_frame(fsm, 4)


def test_fsm_sequence_matches_tfi_frames(random_scene):
    """
    Тест 42: Реконструкция FSM-последовательности совпадает с tfi_frame
    """
    volume = sample_sequence(random_scene(5, 6, 40), make_sampler_config(BankName.FSM, threshold=300.0))
    frames = reconstruct_sequence(volume, RAW)

    for t in (1, 7, 23, 40):
        assert np.array_equal(frames[t - 1], tfi_frame(volume, t))

# =========================
# КОЭФФИЦИЕНТЫ И СИНТЕЗ
# =========================

def test_update_coefficients_by_hand():
    """
    Тест 43: K = +-phi / (t - t_pre), без спайка значения не меняются
    """
    grid = CoefficientGrid.zeros(1, 1, 2)

    update_coefficients(grid, np.array([[[1, 0]]]), 4, (400.0,))
    assert grid.K[0, 0, 0] == 100.0
    assert grid.K[0, 0, 1] == 0.0

    update_coefficients(grid, np.array([[[0, 0]]]), 5, (400.0,))
    assert grid.K[0, 0, 0] == 100.0

    update_coefficients(grid, np.array([[[-1, 1]]]), 6, (400.0,))
    assert grid.K[0, 0, 0] == -200.0
    assert grid.K[0, 0, 1] == pytest.approx(400.0 / 6)
    assert grid.last_fire.tolist() == [[[6, 6]]]

    with pytest.raises(TimeOrderError):
        update_coefficients(grid, np.zeros((1, 1, 2)), 6, (400.0,))
    with pytest.raises(ShapeMismatchError):
        update_coefficients(grid, np.zeros((2, 1, 2)), 7, (400.0,))


def test_unit_bank_synthesis_is_identity(rng):
    """
    Тест 44: Синтез по единичному банку возвращает сами коэффициенты
    """
    grid = CoefficientGrid.zeros(1, 6, 5)
    grid.K[0] = rng.normal(50.0, 20.0, size=(6, 5))

    assert np.array_equal(synthesize_frame(grid, unit_bank()), grid.K[0])


def test_synthesis_is_linear(rng):
    """
    Тест 45: Умножение всех K на c умножает изображение на c
    """
    bank = standard_bank(BankName.THREE_DOG)
    grid = CoefficientGrid.zeros(3, 12, 12)
    grid.K[:] = rng.normal(0.0, 30.0, size=grid.shape)
    scaled = CoefficientGrid(K=grid.K * 2.5, last_fire=grid.last_fire.copy())

    assert np.allclose(synthesize_frame(scaled, bank), 2.5 * synthesize_frame(grid, bank), atol=1e-9)


def test_constant_scene_roundtrip_one_gauss(constant_scene):
    """
    Тест 46: OneGauss, постоянная сцена 100, phi = 400 — внутри кадра ошибка 0
    """
    scene = constant_scene(100.0, 64, 64, 12)
    volume = sample_sequence(scene, make_sampler_config(BankName.ONE_GAUSS))

    frames = reconstruct_sequence(volume, RAW)

    L = standard_bank(BankName.ONE_GAUSS).half_widths[0]
    interior = frames[7:, 2 * L:-2 * L, 2 * L:-2 * L]
    assert np.abs(interior - 100.0).max() < 1e-9


def test_bank_must_match_volume(random_scene):
    """
    Тест 47: Банк с другими масштабами отклоняется
    """
    volume = sample_sequence(random_scene(6, 6, 10), make_sampler_config(BankName.TWO_DOG))

    with pytest.raises(ShapeMismatchError):
        reconstruct_sequence(volume, RAW, bank=standard_bank(BankName.THREE_DOG))

# =========================
# КОРРЕКЦИЯ ЯРКОСТИ
# =========================

def test_match_mean_matches_reference(rng):
    """
    Тест 48: После match_mean среднее кадра равно среднему эталона
    """
    frame = rng.uniform(1.0, 80.0, size=(10, 10))
    reference = rng.uniform(0.0, 255.0, size=(10, 10))

    assert match_mean(frame, reference).mean() == pytest.approx(reference.mean(), abs=1e-9)
    assert np.array_equal(match_mean(np.zeros((3, 3)), reference[:3, :3]), np.zeros((3, 3)))


def test_adjustment_modes(random_scene):
    """
    Тест 49: Коррекция яркости по эталону и обрезка до [0, 255]
    """
    scene = random_scene(12, 12, 30)
    volume = sample_sequence(scene, make_sampler_config(BankName.FOUR_DOG, threshold=200.0))

    mean_std = reconstruct_sequence(
        volume,
        ReconstructionConfig(brightness_adjust=BrightnessAdjust.MATCH_MEAN_STD, clamp=False),
        reference=scene,
    )
    last = mean_std[-1]
    assert last.mean() == pytest.approx(scene.frames[-1].mean(), abs=1e-9)
    assert last.std() == pytest.approx(scene.frames[-1].std(), rel=1e-9)

    clamped = reconstruct_sequence(volume, ReconstructionConfig(), reference=scene)
    assert clamped.min() >= 0.0 and clamped.max() <= 255.0


def test_adjustment_needs_reference(random_scene):
    """
    Тест 50: Коррекция без эталона и эталон другого размера — ошибки
    """
    scene = random_scene(6, 6, 10)
    volume = sample_sequence(scene, make_sampler_config(BankName.ONE_DOG))

    with pytest.raises(ReferenceRequiredError):
        reconstruct_sequence(volume, ReconstructionConfig())
    with pytest.raises(ShapeMismatchError):
        reconstruct_sequence(volume, ReconstructionConfig(), reference=SceneStream(np.zeros((9, 6, 6))))
