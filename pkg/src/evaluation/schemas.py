"""
Prediction containers and report rows for evaluation.
"""

from dataclasses import dataclass
from functools import cached_property
from typing import Dict, List, Optional

import numpy as np
from pydantic import BaseModel, Field

from src.utils.errors import ContractViolation

REPORT_COLUMNS = ["task", "model", "seed", "metric", "point", "ci_low", "ci_high", "n_valid_draws"]
SUMMARY_COLUMNS = ["task", "model", "metric", "mean", "std", "n_seeds"]


@dataclass
class PredictionSet:
    """
    Per-example predictions of one model on one split.

    Classification sets carry ``probs`` and ``labels``; forecasting sets carry
    ``mu``, ``sigma`` and ``target``, all in bpm.
    """
    record_id: np.ndarray
    probs: Optional[np.ndarray] = None
    labels: Optional[np.ndarray] = None
    mu: Optional[np.ndarray] = None
    sigma: Optional[np.ndarray] = None
    target: Optional[np.ndarray] = None

    def __post_init__(self):
        self.record_id = np.asarray(self.record_id)
        n = self.record_id.size
        for name in ("probs", "labels", "mu", "sigma", "target"):
            value = getattr(self, name)
            if value is None:
                continue
            value = np.asarray(value, dtype=np.float64)
            if value.shape != (n,):
                raise ContractViolation(f"PredictionSet.{name} has shape {value.shape}, expected ({n},)")
            setattr(self, name, value)
        if self.probs is not None and (np.any(self.probs < 0) or np.any(self.probs > 1)):
            raise ContractViolation("probabilities must lie in [0, 1]")
        if self.sigma is not None and np.any(self.sigma <= 0):
            raise ContractViolation("forecast sigma must be positive")

    def __len__(self) -> int:
        return int(self.record_id.size)

    @cached_property
    def groups(self) -> Dict[str, np.ndarray]:
        """Example indices of every record, keyed by record id (sorted)."""
        return {r: np.flatnonzero(self.record_id == r) for r in sorted(set(self.record_id.tolist()))}

    def take(self, indices: np.ndarray) -> "PredictionSet":
        def pick(a):
            return None if a is None else a[indices]
        return PredictionSet(
            record_id=self.record_id[indices],
            probs=pick(self.probs),
            labels=pick(self.labels),
            mu=pick(self.mu),
            sigma=pick(self.sigma),
            target=pick(self.target),
        )


class MetricEstimate(BaseModel):
    """Point estimate and percentile interval of one metric."""
    metric: str
    point: Optional[float] = Field(default=None, description="None when undefined on the full set")
    ci_low: Optional[float] = None
    ci_high: Optional[float] = None
    n_valid_draws: int = Field(default=0, ge=0)
    n_bootstrap: int = Field(default=0, ge=0)


class MetricReport(BaseModel):
    """Every metric of one (task, model, seed) evaluation."""
    task: str
    model: str
    seed: Optional[int] = None
    metrics: List[MetricEstimate] = Field(default_factory=list)

    def rows(self) -> List[dict]:
        return [
            {"task": self.task, "model": self.model, "seed": self.seed, "metric": m.metric,
             "point": m.point, "ci_low": m.ci_low, "ci_high": m.ci_high, "n_valid_draws": m.n_valid_draws}
            for m in self.metrics
        ]

    def get(self, metric: str) -> Optional[MetricEstimate]:
        return next((m for m in self.metrics if m.metric == metric), None)
