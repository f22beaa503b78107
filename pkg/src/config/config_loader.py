"""
Configuration loader for the heart-rate benchmark.
"""

import copy
import json
import logging
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional

from dotenv import load_dotenv
from pydantic import ValidationError

from src.config.schemas import (
    BenchSettings,
    CalibrationSection,
    DataSection,
    EvaluationSection,
    ModelSection,
    OutputSection,
    SplitSection,
    SyntheticSection,
    TrainingSection,
    WindowSection,
)
from src.models.schemas import GrudConfig, TransformerConfig
from src.training.schemas import TrainConfig
from src.utils.errors import ConfigError

logger = logging.getLogger(__name__)

# environment variable -> dotted config key
ENV_OVERRIDES = {
    "HRBENCH_OUTPUT_DIR": "output.runs_dir",
    "HRBENCH_WORKERS": "output.workers",
}


@dataclass
class BenchConfig:
    """
    Unified configuration object for every pipeline command.
    """
    data: DataSection
    windows: WindowSection
    split: SplitSection
    models: ModelSection
    training: TrainingSection
    calibration: CalibrationSection
    evaluation: EvaluationSection
    synthetic: SyntheticSection
    output: OutputSection

    config_path: Optional[Path] = None
    verbose: bool = False

    # Raw config data after overrides
    raw: dict = field(default_factory=dict)

    @property
    def peaks_path(self) -> Path:
        return Path(self.data.peaks_path)

    @property
    def prepared_dir(self) -> Path:
        return Path(self.data.prepared_dir)

    @property
    def runs_dir(self) -> Path:
        return Path(self.output.runs_dir)

    def train_config(self) -> TrainConfig:
        return self.training.train_config()

    def encoder_config(self, kind: str, capacity: Optional[int] = None, max_len: Optional[int] = None):
        """
        Encoder settings for ``kind``; ``capacity`` overrides GRU-D hidden size
        or Transformer d_model (capacity sweep).
        """
        if kind == "grud":
            return GrudConfig(hidden_dim=capacity or self.models.grud.hidden_dim)
        if kind == "transformer":
            tf = self.models.transformer
            return TransformerConfig(
                d_model=capacity or tf.d_model,
                layers=tf.layers,
                heads=tf.heads,
                ffn_dim=tf.ffn_dim,
                max_len=max(max_len or self.windows.T, 60),
                layer_norm=tf.layer_norm,
            )
        raise ConfigError(f"unknown model kind {kind!r}")

    def to_dict(self) -> dict:
        settings = BenchSettings(
            data=self.data, windows=self.windows, split=self.split, models=self.models,
            training=self.training, calibration=self.calibration, evaluation=self.evaluation,
            synthetic=self.synthetic, output=self.output,
        )
        return settings.model_dump()


def set_dotted(raw: Dict[str, Any], key: str, value: Any) -> None:
    """Set ``raw['a']['b'] = value`` for key ``'a.b'``, creating sections as needed."""
    node = raw
    parts = key.split(".")
    for part in parts[:-1]:
        child = node.get(part)
        if not isinstance(child, dict):
            child = {}
            node[part] = child
        node = child
    node[parts[-1]] = value


class ConfigLoader:
    """
    Loads and validates benchmark configuration files.

    Precedence, lowest first: schema defaults, config file, environment
    (``.env`` honored), explicit overrides from the command line.
    """

    def __init__(self, config_dir: str = "./configs"):
        """
        Args:
            config_dir: Directory searched for config files given by bare name
        """
        self.config_dir = Path(config_dir)

    def resolve(self, config: Optional[str]) -> Optional[Path]:
        if config is None:
            default = self.config_dir / "common.json"
            return default if default.exists() else None
        path = Path(config)
        if not path.exists() and (self.config_dir / config).exists():
            path = self.config_dir / config
        if not path.exists():
            raise ConfigError(f"Configuration not found: {config}")
        return path

    def read(self, path: Optional[Path]) -> dict:
        if path is None:
            logger.info("No configuration file found; using built-in defaults")
            return {}
        try:
            with open(path, "r", encoding="utf-8") as f:
                raw = json.load(f)
        except json.JSONDecodeError as e:
            raise ConfigError(f"{path}: invalid JSON ({e})") from e
        if not isinstance(raw, dict):
            raise ConfigError(f"{path}: top level must be an object of sections")
        return raw

    def load(self, config: Optional[str] = None, overrides: Optional[Dict[str, Any]] = None,
             verbose: bool = False) -> BenchConfig:
        """
        Load, override and validate a configuration.

        Args:
            config: Path or bare file name under ``config_dir`` (default common.json)
            overrides: Dotted keys (e.g. ``"calibration.beta"``) to values
            verbose: Stored on the config for verbose console output

        Returns:
            BenchConfig with every section validated

        Raises:
            ConfigError: file missing or malformed, or any field fails validation
        """
        path = self.resolve(config)
        raw = copy.deepcopy(self.read(path))

        load_dotenv()
        for env_key, dotted in ENV_OVERRIDES.items():
            value = os.getenv(env_key)
            if value:
                logger.debug(f"Config override from environment: {dotted}={value}")
                set_dotted(raw, dotted, value)

        for dotted, value in (overrides or {}).items():
            if value is not None:
                logger.debug(f"Config override from command line: {dotted}={value}")
                set_dotted(raw, dotted, value)

        try:
            settings = BenchSettings(**raw)
        except ValidationError as e:
            lines = [f"  {'.'.join(str(p) for p in err['loc'])}: {err['msg']}" for err in e.errors()]
            raise ConfigError("Configuration validation failed:\n" + "\n".join(lines)) from e

        logger.info(f"Loaded configuration from {path or 'defaults'}")
        return BenchConfig(
            data=settings.data,
            windows=settings.windows,
            split=settings.split,
            models=settings.models,
            training=settings.training,
            calibration=settings.calibration,
            evaluation=settings.evaluation,
            synthetic=settings.synthetic,
            output=settings.output,
            config_path=path,
            verbose=verbose,
            raw=raw,
        )
