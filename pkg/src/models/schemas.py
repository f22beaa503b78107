"""
Model configurations and head outputs.
"""

from dataclasses import dataclass
from typing import List, Literal, Optional

from pydantic import BaseModel, Field, model_validator

from src.autodiff.tensor import Tensor

ModelKind = Literal["grud", "transformer"]
Task = Literal["classification", "forecasting"]
TargetMode = Literal["residual", "absolute"]

SIGMA_FLOOR = 1e-4


class GrudConfig(BaseModel):
    """GRU-D encoder settings; ``train_mean`` is in normalized units."""
    input_dim: int = Field(default=1, gt=0)
    hidden_dim: int = Field(default=64, gt=0)
    train_mean: List[float] = Field(default_factory=lambda: [0.0])

    @model_validator(mode="after")
    def _mean_matches_input(self):
        if len(self.train_mean) != self.input_dim:
            raise ValueError(f"train_mean has {len(self.train_mean)} entries, expected {self.input_dim}")
        return self

    @property
    def output_dim(self) -> int:
        return self.hidden_dim


class TransformerConfig(BaseModel):
    """Compact post-norm Transformer encoder settings."""
    d_model: int = Field(default=64, gt=0)
    layers: int = Field(default=2, gt=0)
    heads: int = Field(default=4, gt=0)
    ffn_dim: int = Field(default=256, gt=0)
    max_len: int = Field(default=60, ge=60)
    layer_norm: bool = True

    @model_validator(mode="after")
    def _heads_divide_width(self):
        if self.d_model % self.heads:
            raise ValueError(f"d_model={self.d_model} is not divisible by heads={self.heads}")
        return self

    @property
    def output_dim(self) -> int:
        return self.d_model


@dataclass
class HeadOutputs:
    """Per-window head outputs; fields of heads that were not built are None."""
    cls_logit: Optional[Tensor] = None
    delta_mu: Optional[Tensor] = None
    sigma_n: Optional[Tensor] = None
    mu_tilde: Optional[Tensor] = None
