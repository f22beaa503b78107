"""
Encoder + task head bundle used by training, evaluation and checkpoints.
"""

import logging
from pathlib import Path
from typing import Dict, Optional, Union

import numpy as np

from src.autodiff.checkpoint import load_checkpoint, save_checkpoint
from src.autodiff.tensor import Parameter
from src.models.grud import GrudEncoder, init_grud
from src.models.heads import heads_forward, init_heads
from src.models.init import ParamBuilder, count_parameters
from src.models.schemas import GrudConfig, HeadOutputs, TransformerConfig
from src.models.transformer import TransformerEncoder, init_transformer
from src.utils.errors import ConfigError

logger = logging.getLogger(__name__)

EncoderConfig = Union[GrudConfig, TransformerConfig]


class SequenceModel:
    """
    A GRU-D or Transformer encoder followed by the head of one task.
    """

    def __init__(self, kind: str, task: str, encoder_config: EncoderConfig,
                 params: Dict[str, Parameter], target_mode: str = "residual"):
        self.kind = kind
        self.task = task
        self.encoder_config = encoder_config
        self.params = params
        self.target_mode = target_mode
        if kind == "grud":
            self.encoder = GrudEncoder(encoder_config, params)
        elif kind == "transformer":
            self.encoder = TransformerEncoder(encoder_config, params)
        else:
            raise ConfigError(f"unknown model kind {kind!r}")

    @classmethod
    def build(cls, kind: str, task: str, encoder_config: EncoderConfig, seed: int,
              target_mode: str = "residual") -> "SequenceModel":
        """Create a freshly initialized model; the seed fixes every weight."""
        builder = ParamBuilder(np.random.default_rng(seed))
        if kind == "grud":
            init_grud(encoder_config, builder)
        elif kind == "transformer":
            init_transformer(encoder_config, builder)
        else:
            raise ConfigError(f"unknown model kind {kind!r}")
        init_heads(encoder_config.output_dim, builder, tasks=(task,))
        model = cls(kind, task, encoder_config, builder.params, target_mode)
        logger.debug(f"Built {kind}/{task} with {model.n_parameters} parameters (seed={seed})")
        return model

    @property
    def n_parameters(self) -> int:
        return count_parameters(self.params)

    def forward(self, x_tilde: np.ndarray) -> HeadOutputs:
        """Run encoder and head on B x T normalized contexts."""
        x_tilde = np.asarray(x_tilde, dtype=np.float64)
        h_T = self.encoder.encode(x_tilde)
        return heads_forward(h_T, self.params, x_tilde[:, -1], residual=self.target_mode == "residual")

    def predict(self, x_tilde: np.ndarray, batch_size: int = 256) -> Dict[str, np.ndarray]:
        """
        Batched inference without recording a tape.

        Returns:
            {"logit"} for classification, {"mu_tilde", "sigma_n"} for forecasting
        """
        chunks: Dict[str, list] = {}
        for start in range(0, len(x_tilde), batch_size):
            out = self.forward(x_tilde[start:start + batch_size])
            if self.task == "classification":
                chunks.setdefault("logit", []).append(out.cls_logit.data)
            else:
                chunks.setdefault("mu_tilde", []).append(out.mu_tilde.data)
                chunks.setdefault("sigma_n", []).append(out.sigma_n.data)
        return {k: np.concatenate(v) for k, v in chunks.items()}

    # --- persistence ---

    def config_dict(self) -> dict:
        return {
            "kind": self.kind,
            "task": self.task,
            "target_mode": self.target_mode,
            "encoder": self.encoder_config.model_dump(),
        }

    def save(self, path: Path, extra: Optional[dict] = None) -> Path:
        config = self.config_dict()
        config.update(extra or {})
        return save_checkpoint(path, self.params, config)

    @classmethod
    def load(cls, path: Path) -> "SequenceModel":
        params, config = load_checkpoint(path)
        kind = config.get("kind")
        encoder_cls = GrudConfig if kind == "grud" else TransformerConfig
        return cls(kind, config["task"], encoder_cls(**config["encoder"]), params,
                   config.get("target_mode", "residual"))
