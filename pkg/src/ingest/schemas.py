"""
Domain types for R-peak ingestion, windowing and standardization.

Array-valued records are frozen dataclasses over numpy arrays; the small
records that are written to sidecar JSON files are pydantic models.
"""

from dataclasses import dataclass
from typing import Dict, List, Literal

import numpy as np
from pydantic import BaseModel, Field, field_validator

HR_MIN = 20.0
HR_MAX = 220.0
DEFAULT_THETA_CANDIDATES = (100.0, 95.0, 90.0, 85.0)

SplitName = Literal["train", "val", "test"]
SPLIT_NAMES = ("train", "val", "test")


@dataclass(frozen=True)
class RPeakRecord:
    """R-peak times (seconds) of one record."""
    record_id: str
    peak_times: np.ndarray

    def __post_init__(self):
        peaks = np.asarray(self.peak_times, dtype=np.float64)
        object.__setattr__(self, "peak_times", peaks)
        if peaks.ndim != 1:
            raise ValueError(f"{self.record_id}: peak_times must be one-dimensional")
        if peaks.size and peaks[0] < 0:
            raise ValueError(f"{self.record_id}: peak times must be non-negative")
        if peaks.size > 1 and np.any(np.diff(peaks) <= 0):
            raise ValueError(f"{self.record_id}: peak times must be strictly increasing")


@dataclass(frozen=True)
class HrSeries:
    """Per-second heart rate (bpm) of one record; index 0 is ``start_second``."""
    record_id: str
    hr: np.ndarray
    start_second: int = 0

    def __len__(self) -> int:
        return int(self.hr.size)


@dataclass(frozen=True)
class LabeledWindow:
    """One 60 s context with its horizon label and one-step target."""
    record_id: str
    context: np.ndarray
    cls_label: int
    fc_target: float
    start_index: int


class ThresholdGuardResult(BaseModel):
    """Outcome of the positive-support guard over label thresholds."""
    theta: float = Field(description="Selected label threshold (bpm)")
    n_positive_windows: int = Field(ge=0)
    n_positive_records: int = Field(ge=0)
    n_windows: int = Field(default=0, ge=0, description="Total windows at this theta")


class StandardizationStats(BaseModel):
    """Train-split location and scale used for every split."""
    mu: float
    sigma: float = Field(gt=0)

    def transform(self, bpm):
        return (np.asarray(bpm, dtype=np.float64) - self.mu) / self.sigma

    def inverse(self, normalized):
        return np.asarray(normalized, dtype=np.float64) * self.sigma + self.mu

    def inverse_scale(self, sigma_n):
        return np.asarray(sigma_n, dtype=np.float64) * self.sigma


class SplitAssignment(BaseModel):
    """Record-level split membership."""
    assignment: Dict[str, SplitName]

    @field_validator("assignment")
    @classmethod
    def _non_empty(cls, value):
        if not value:
            raise ValueError("split assignment is empty")
        return value

    def records(self, split: str) -> List[str]:
        return sorted(r for r, s in self.assignment.items() if s == split)

    def split_of(self, record_id: str) -> str:
        return self.assignment[record_id]


class PreparedSidecar(BaseModel):
    """Sidecar JSON written next to the prepared dataset CSV."""
    mu: float
    sigma: float
    theta: float
    T: int
    H: int
    split: Dict[str, SplitName]
    n_windows: int = 0
    n_positive_windows: int = 0
    n_positive_records: int = 0
    fc_diff_std: float = Field(default=1.0, description="Train std of one-step HR differences (bpm)")


@dataclass
class RecordSummary:
    """Per-record bookkeeping written to records.csv by prepare."""
    record_id: str
    n_seconds: int
    mean_hr: float
    max_hr: float
    n_windows: int = 0
    n_positive: int = 0
    split: str = ""
