import csv

import numpy as np
import pytest
import yaml

from app.main import cli
from app.schemas.kernel import BankName
from app.schemas.scene import SceneKind
from app.services.spikeio import load_volume, read_scene, write_images

SMALL_SCENE = {"height": 12, "width": 13, "length": 16, "period": 8}


def invoke(runner, *args):
    return runner.invoke(cli, [str(a) for a in args])


# =========================
# КОНВЕЙЕР
# =========================

@pytest.mark.parametrize("kind", list(SceneKind))
@pytest.mark.parametrize("model", list(BankName))
def test_pipeline_all_kinds_and_models(runner, tmp_path, kind, model):
    """
    Тест 82: synth -> sample -> reconstruct -> evaluate для всех сцен и моделей
    """
    scene_dir = tmp_path / "scene"
    result = invoke(
        runner, "synth", kind.value, scene_dir,
        "--height", 12, "--width", 13, "--length", 16, "--period", 8,
    )
    assert result.exit_code == 0, result.output

    spikes = tmp_path / "out.spk"
    result = invoke(runner, "sample", scene_dir, "--out", spikes, "--model", model.value, "--threshold", 150)
    assert result.exit_code == 0, result.output
    assert load_volume(spikes).length == 16

    recon_dir = tmp_path / "recon"
    result = invoke(runner, "reconstruct", spikes, recon_dir, "--ref", scene_dir)
    assert result.exit_code == 0, result.output

    report = tmp_path / "report.yaml"
    result = invoke(runner, "evaluate", recon_dir, scene_dir, "--report", report)
    assert result.exit_code == 0, result.output

    data = yaml.safe_load(report.read_text())
    assert len(data["frames"]) == 16
    assert data["aggregation"] == "per_frame_mean"


def test_sample_black_scene_without_noise(runner, tmp_path, write_config):
    """
    Тест 83: Чёрная сцена 100x100x1000 без шума — ноль спайков
    """
    spikes = tmp_path / "black.spk"
    config = write_config({
        "model": "FSM",
        "scene": {"source": "synth", "kind": "black"},
        "output": {"spikes": str(spikes)},
    })

    result = invoke(runner, "sample", "--config", config)

    assert result.exit_code == 0, result.output
    volume = load_volume(spikes)
    assert volume.spikes.shape == (1000, 1, 100, 100)
    assert volume.total_spikes() == 0


def test_evaluate_identical_dirs(runner, tmp_path, rng):
    """
    Тест 84: Одинаковые каталоги — MSE 0, SSIM 1
    """
    frames = rng.integers(0, 256, size=(3, 16, 16)).astype(np.float64)
    write_images(frames, tmp_path / "a")
    write_images(frames, tmp_path / "b")

    report = tmp_path / "report.yaml"
    table = tmp_path / "frames.csv"
    result = invoke(runner, "evaluate", tmp_path / "a", tmp_path / "b", "--report", report, "--table", table)

    assert result.exit_code == 0, result.output
    data = yaml.safe_load(report.read_text())
    assert data["mse"] == 0.0
    assert data["ssim"] == pytest.approx(1.0, abs=1e-12)
    assert data["psnr"] == float("inf")

    with table.open() as handle:
        rows = list(csv.reader(handle))
    assert rows[0] == ["frame", "mse", "psnr", "ssim"]
    assert len(rows) == 4


def test_config_run_writes_frames_and_report(runner, tmp_path, write_config):
    """
    Тест 85: Явный банк из конфигурации, кадры и отчёт о сэмплировании
    """
    config = write_config({
        "kind": "gauss",
        "scales": [0.3, 0.6],
        "per_scale_threshold": [150.0, 300.0],
        "reset_mode": "subtract",
        "seed": 5,
        "noise": {"enabled": True, "k": 0.5},
        "scene": {"kind": "moving_edge", **SMALL_SCENE},
        "output": {
            "spikes": str(tmp_path / "run.spk"),
            "frames": str(tmp_path / "frames"),
            "report": str(tmp_path / "run.yaml"),
        },
    })

    result = invoke(runner, "sample", "-c", config)

    assert result.exit_code == 0, result.output
    volume = load_volume(tmp_path / "run.spk")
    assert volume.scales == (0.3, 0.6)
    assert volume.thresholds == (150.0, 300.0)
    assert volume.noise is not None and volume.noise.k == 0.5
    assert volume.seed == 5
    assert read_scene(tmp_path / "frames").length == 16

    report = yaml.safe_load((tmp_path / "run.yaml").read_text())
    assert report["model"] == "RVSM_GAUSS"
    assert report["reset_mode"] == "subtract"
    assert len(report["asass"]) == 2

# =========================
# ДЕТЕРМИНИЗМ
# =========================

def test_sample_is_byte_identical_across_threads(runner, tmp_path, write_config):
    """
    Тест 86: Один и тот же конфиг даёт побитово одинаковый .spk при 1 и 3 потоках
    """
    config = write_config({
        "model": "FourDoG",
        "seed": 11,
        "noise": {"k": 1.0},
        "scene": {"kind": "rotating_bar", **SMALL_SCENE},
    })
    outputs = []
    for name, threads in (("a.spk", 1), ("b.spk", 1), ("c.spk", 3)):
        path = tmp_path / name
        result = invoke(runner, "sample", "-c", config, "-o", path, "--threads", threads)
        assert result.exit_code == 0, result.output
        outputs.append(path.read_bytes())

    assert outputs[0] == outputs[1] == outputs[2]


def test_robustness_command(runner, tmp_path):
    """
    Тест 87: Команда robustness пишет таблицу (k, model, I1, I2, I3...)
    """
    table = tmp_path / "robustness.csv"
    result = invoke(
        runner, "robustness",
        "--k-sweep", "0:1:2", "--seeds", 2, "--models", "FSM,TwoDoG",
        "--height", 8, "--width", 8, "--length", 40, "--table", table,
    )

    assert result.exit_code == 0, result.output
    with table.open() as handle:
        rows = list(csv.reader(handle))
    assert rows[0][:5] == ["k", "model", "seeds", "I1", "I2"]
    assert [r[1] for r in rows[1:]] == ["FSM", "TwoDoG", "FSM", "TwoDoG"]

# =========================
# ОШИБКИ
# =========================

def test_unknown_config_key_rejected(runner, tmp_path, write_config):
    """
    Тест 88: Неизвестный ключ конфигурации — диагностика и код 2
    """
    config = write_config({"model": "FSM", "thresold": 10})

    result = invoke(runner, "sample", "--config", config)

    assert result.exit_code == 2
    assert "thresold" in result.output


@pytest.mark.parametrize("data", [
    {"model": "FSM", "kind": "dog", "scales": [0.24]},
    {"threshold": 100},
    {"kind": "dog"},
    {"model": "FSM", "scene": {"source": "directory"}},
    {"kind": "dog", "scales": [0.5, 0.3]},
])
def test_invalid_configs(runner, write_config, data):
    """
    Тест 89: Взаимоисключающие и неполные настройки банка отклоняются
    """
    result = invoke(runner, "sample", "--config", write_config(data))

    assert result.exit_code == 2
    assert "ConfigError" in result.output


def test_missing_inputs(runner, tmp_path):
    """
    Тест 90: Нет сцены, нет файла спайков, коррекция без эталона
    """
    assert invoke(runner, "sample").exit_code == 2
    assert invoke(runner, "sample", tmp_path / "missing").exit_code == 2
    assert invoke(runner, "reconstruct", tmp_path / "missing.spk", tmp_path / "out").exit_code == 2

    invoke(runner, "synth", "constant", tmp_path / "scene", "--height", 4, "--width", 4, "--length", 3)
    invoke(runner, "sample", tmp_path / "scene", "-o", tmp_path / "s.spk")
    result = invoke(runner, "reconstruct", tmp_path / "s.spk", tmp_path / "out", "--adjust", "mean")
    assert result.exit_code == 2
    assert "ReferenceRequiredError" in result.output


def test_corrupt_spike_file(runner, tmp_path):
    """
    Тест 91: Повреждённый .spk — имя ошибки формата в диагностике
    """
    path = tmp_path / "bad.spk"
    path.write_bytes(b"NOPE" + b"\x00" * 200)

    result = invoke(runner, "reconstruct", path, tmp_path / "out")

    assert result.exit_code == 2
    assert "BadMagicError" in result.output


def test_robustness_config_with_noise_block_only(runner, tmp_path, write_config):
    """
    Тест 97: robustness --config читает только блок noise; выключенный шум отклоняется
    """
    args = ["--k-sweep", "1:1:1", "--seeds", 1, "--models", "FSM", "--height", 6, "--width", 6, "--length", 150]

    quiet = write_config({"noise": {"e1": 0.0, "beta1": 0.0}})
    table = tmp_path / "quiet.csv"
    result = invoke(runner, "robustness", "--config", quiet, "--table", table, *args)
    assert result.exit_code == 0, result.output
    with table.open() as handle:
        rows = list(csv.reader(handle))
    assert float(rows[1][3]) == 0.0

    # без конфигурации темновой ток e1 = 4 за 150 шагов превышает порог
    table = tmp_path / "default.csv"
    result = invoke(runner, "robustness", "--table", table, *args)
    assert result.exit_code == 0, result.output
    with table.open() as handle:
        rows = list(csv.reader(handle))
    assert float(rows[1][3]) > 0.0

    disabled = write_config({"noise": {"enabled": False}})
    result = invoke(runner, "robustness", "--config", disabled, "--table", table, *args)
    assert result.exit_code == 2
    assert "ConfigError" in result.output


def test_compare_command(runner, tmp_path):
    """
    Тест 100: compare пишет строки (модель, шум, MSE, PSNR, SSIM) для синтетической сцены
    """
    table = tmp_path / "quality.csv"
    result = invoke(
        runner, "compare", "--kind", "moving_edge",
        "--height", 8, "--width", 9, "--length", 20,
        "--models", "FSM,TwoDoG", "--threshold", 150, "--skip", 2, "--k", 0.5,
        "--table", table,
    )

    assert result.exit_code == 0, result.output
    with table.open() as handle:
        rows = list(csv.reader(handle))
    assert rows[0][:3] == ["scene", "model", "noise"]
    assert [(r[0], r[1], r[2]) for r in rows[1:]] == [
        ("moving_edge", "FSM", "0"), ("moving_edge", "FSM", "1"),
        ("moving_edge", "TwoDoG", "0"), ("moving_edge", "TwoDoG", "1"),
    ]
    assert all(int(r[6]) == 18 for r in rows[1:])

    result = invoke(runner, "compare", "--table", table)
    assert result.exit_code == 2
    assert "ConfigError" in result.output
