"""
Training configuration and optimizer state.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Literal

import numpy as np
from pydantic import BaseModel, Field


class TrainConfig(BaseModel):
    """Matched training budget shared by every model and task."""
    lr: float = Field(default=1e-3, gt=0)
    batch_size: int = Field(default=64, gt=0)
    epochs: int = Field(default=6, ge=1)
    seeds: List[int] = Field(default_factory=lambda: [0, 1, 2], min_length=1)
    weight_decay: float = Field(default=0.01, ge=0)
    eps_prevalence: float = Field(default=1e-6, gt=0)
    target_mode: Literal["residual", "absolute"] = "residual"
    beta1: float = Field(default=0.9, ge=0, lt=1)
    beta2: float = Field(default=0.999, ge=0, lt=1)
    adam_eps: float = Field(default=1e-8, gt=0)


@dataclass
class AdamWState:
    """First/second moments per parameter name and the step counter."""
    m: Dict[str, np.ndarray] = field(default_factory=dict)
    v: Dict[str, np.ndarray] = field(default_factory=dict)
    step: int = 0
