"""
Synthetic corpus settings and episode bookkeeping.
"""

from dataclasses import dataclass, field
from typing import Dict, List

import numpy as np
from pydantic import BaseModel, Field, model_validator


class SyntheticSpec(BaseModel):
    """Parameters of the synthetic R-peak corpus."""
    n_records: int = Field(default=20, ge=1)
    record_seconds: int = Field(default=1800, ge=2, description="Length of each record in seconds")
    base_hr: float = Field(default=75.0, ge=20, le=220, description="Corpus-wide resting rate (bpm)")
    base_hr_spread: float = Field(default=5.0, ge=0, description="Std of per-record resting rates (bpm)")
    ar_coef: float = Field(default=0.7, ge=0, lt=1, description="AR(1) coefficient of the HR deviation")
    noise_std: float = Field(default=2.0, ge=0, description="Innovation std of the AR(1) deviation (bpm)")
    episode_rate: float = Field(default=4.0, ge=0, description="Tachycardia episodes per hour")
    episode_min_seconds: int = Field(default=90, ge=1)
    episode_max_seconds: int = Field(default=240, ge=1)
    episode_amplitude: float = Field(default=40.0, ge=0, description="Mean episode elevation (bpm)")
    ramp_seconds: int = Field(default=30, ge=0, description="Linear onset and offset length")
    seed: int = 0

    @model_validator(mode="after")
    def _episode_bounds(self):
        if self.episode_min_seconds > self.episode_max_seconds:
            raise ValueError("episode_min_seconds exceeds episode_max_seconds")
        return self


@dataclass(frozen=True)
class Episode:
    """One injected tachycardia episode (plateau at ``amplitude`` above baseline)."""
    record_id: str
    start: int
    plateau_seconds: int
    ramp_seconds: int
    amplitude: float

    @property
    def end(self) -> int:
        return self.start + self.plateau_seconds + 2 * self.ramp_seconds


@dataclass
class SyntheticCorpus:
    """Generated HR, the derived R-peaks and the episode list."""
    spec: SyntheticSpec
    hr: Dict[str, np.ndarray] = field(default_factory=dict)
    peaks: Dict[str, np.ndarray] = field(default_factory=dict)
    episodes: List[Episode] = field(default_factory=list)

    @property
    def record_ids(self) -> List[str]:
        return list(self.hr)
