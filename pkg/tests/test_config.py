"""
Tests for configuration loading, overrides and validation.
"""

import json
from pathlib import Path

import pytest

from src.config.config_loader import ConfigLoader, set_dotted
from src.models.schemas import GrudConfig, TransformerConfig
from src.utils.errors import ConfigError


@pytest.fixture
def loader(tmp_path, monkeypatch):
    monkeypatch.delenv("HRBENCH_OUTPUT_DIR", raising=False)
    monkeypatch.delenv("HRBENCH_WORKERS", raising=False)
    return ConfigLoader(config_dir=str(tmp_path))


def write_config(tmp_path: Path, raw, name="bench.json") -> Path:
    path = tmp_path / name
    path.write_text(json.dumps(raw), encoding="utf-8")
    return path


class TestDefaults:
    """An absent or empty config reproduces the reference setup."""

    def test_no_file(self, loader):
        config = loader.load()
        assert config.config_path is None
        assert (config.windows.T, config.windows.H) == (60, 10)
        assert config.windows.theta_candidates == [100.0, 95.0, 90.0, 85.0]
        assert config.split.ratios == [0.70, 0.15, 0.15]
        assert config.training.seeds == [0, 1, 2]
        assert config.training.epochs == 6
        assert config.calibration.beta == 2.0
        assert config.evaluation.n_bootstrap == 1000
        assert config.models.hidden_sweep == [32, 64, 128]

    def test_common_json_by_default(self, loader, tmp_path):
        write_config(tmp_path, {"windows": {"H": 20}}, name="common.json")
        config = loader.load()
        assert config.windows.H == 20
        assert config.config_path == tmp_path / "common.json"

    def test_bare_name(self, loader, tmp_path):
        write_config(tmp_path, {"evaluation": {"n_bootstrap": 50}}, name="small.json")
        assert loader.load("small.json").evaluation.n_bootstrap == 50


class TestOverrides:
    """Precedence of file, environment and command line."""

    def test_command_line_beats_file(self, loader, tmp_path):
        path = write_config(tmp_path, {"calibration": {"beta": 1.0}})
        config = loader.load(str(path), overrides={"calibration.beta": 3.0, "training.epochs": None})
        assert config.calibration.beta == 3.0
        assert config.training.epochs == 6

    def test_environment(self, loader, tmp_path, monkeypatch):
        monkeypatch.setenv("HRBENCH_OUTPUT_DIR", str(tmp_path / "elsewhere"))
        monkeypatch.setenv("HRBENCH_WORKERS", "3")
        config = loader.load()
        assert config.runs_dir == tmp_path / "elsewhere"
        assert config.output.workers == 3

    def test_set_dotted_creates_sections(self):
        raw = {"models": 5}
        set_dotted(raw, "models.grud.hidden_dim", 8)
        set_dotted(raw, "split.seed", 2)
        assert raw == {"models": {"grud": {"hidden_dim": 8}}, "split": {"seed": 2}}


class TestValidation:
    """Malformed configs surface as ConfigError."""

    def test_missing_file(self, loader):
        with pytest.raises(ConfigError):
            loader.load("does-not-exist.json")

    def test_bad_json(self, loader, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json", encoding="utf-8")
        with pytest.raises(ConfigError):
            loader.load(str(path))

    def test_top_level_not_object(self, loader, tmp_path):
        with pytest.raises(ConfigError):
            loader.load(str(write_config(tmp_path, [1, 2])))

    @pytest.mark.parametrize("raw", [
        {"split": {"ratios": [0.5, 0.5]}},
        {"split": {"ratios": [0.7, 0.2, 0.2]}},
        {"windows": {"T": 0}},
        {"training": {"lr": -1.0}},
        {"models": {"kinds": ["lstm"]}},
        {"windows": {"stride": 30}},
    ])
    def test_invalid_fields(self, loader, tmp_path, raw):
        with pytest.raises(ConfigError) as info:
            loader.load(str(write_config(tmp_path, raw)))
        assert "validation failed" in str(info.value)

    def test_exit_code(self, loader):
        with pytest.raises(ConfigError) as info:
            loader.load("absent.json")
        assert info.value.exit_code == 2


class TestEncoderConfig:
    """Per-kind encoder settings and capacity overrides."""

    def test_grud(self, loader):
        config = loader.load()
        assert config.encoder_config("grud") == GrudConfig(hidden_dim=64)
        assert config.encoder_config("grud", capacity=32).hidden_dim == 32

    def test_transformer(self, loader):
        tf = loader.load().encoder_config("transformer", capacity=128)
        assert isinstance(tf, TransformerConfig)
        assert (tf.d_model, tf.heads, tf.ffn_dim, tf.max_len) == (128, 4, 256, 60)

    def test_unknown_kind(self, loader):
        with pytest.raises(ConfigError):
            loader.load().encoder_config("lstm")
