"""
Standardized window dataset grouped by record and split.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np

from src.ingest.schemas import SPLIT_NAMES, LabeledWindow, SplitAssignment, StandardizationStats
from src.ingest.windows import windows_as_arrays
from src.utils.errors import ContractViolation, DegenerateScale, MissingSplit

logger = logging.getLogger(__name__)


@dataclass
class SplitView:
    """Arrays for the windows of one split, in raw and normalized units."""
    name: str
    record_id: np.ndarray
    start_index: np.ndarray
    cls_label: np.ndarray
    fc_target: np.ndarray
    context: np.ndarray
    x_tilde: np.ndarray
    y_tilde: np.ndarray
    residual: np.ndarray

    def __len__(self) -> int:
        return int(self.cls_label.size)

    @property
    def prevalence(self) -> float:
        return float(self.cls_label.mean()) if len(self) else 0.0


@dataclass
class WindowedDataset:
    """
    Windows of every split standardized with train statistics.

    Split views are handed out by ``split``; every access is logged so a
    pipeline stage can prove it never touched the test split.
    """
    record_id: np.ndarray
    start_index: np.ndarray
    cls_label: np.ndarray
    fc_target: np.ndarray
    context: np.ndarray
    split_name: np.ndarray
    stats: StandardizationStats
    T: int = 60
    split_access: List[str] = field(default_factory=list)

    def __len__(self) -> int:
        return int(self.cls_label.size)

    def split(self, name: str) -> SplitView:
        if name not in SPLIT_NAMES:
            raise ContractViolation(f"unknown split {name!r}")
        self.split_access.append(name)
        logger.debug(f"Dataset access: split={name}")
        idx = np.flatnonzero(self.split_name == name)
        if idx.size == 0:
            raise MissingSplit(f"split {name!r} has no windows")
        context = self.context[idx]
        x_tilde = self.stats.transform(context)
        y_tilde = self.stats.transform(self.fc_target[idx])
        return SplitView(
            name=name,
            record_id=self.record_id[idx],
            start_index=self.start_index[idx],
            cls_label=self.cls_label[idx],
            fc_target=self.fc_target[idx],
            context=context,
            x_tilde=x_tilde,
            y_tilde=y_tilde,
            residual=y_tilde - x_tilde[:, -1],
        )

    def has_split(self, name: str) -> bool:
        return bool(np.any(self.split_name == name))

    def touched(self, name: str) -> bool:
        return name in self.split_access

    def one_step_diff_std(self) -> float:
        """Std (bpm) of fc_target - last context sample over the train split."""
        idx = self.split_name == "train"
        diffs = self.fc_target[idx] - self.context[idx, -1]
        return float(np.std(diffs)) if diffs.size else 0.0


def standardize(dataset: Sequence[LabeledWindow], split: SplitAssignment) -> Tuple[WindowedDataset, StandardizationStats]:
    """
    Standardize every window with statistics of the training contexts.

    mu and sigma (population std) come from every context sample of the train
    split; normalized contexts, targets and residual targets
    (y_tilde - x_tilde_T) are derived from them for all splits.

    Raises:
        ContractViolation: the train split holds no window
        DegenerateScale: train contexts are constant
    """
    arrays = windows_as_arrays(dataset)
    split_name = np.array([split.split_of(r) for r in arrays["record_id"]], dtype=object)
    train = arrays["context"][split_name == "train"] if len(dataset) else np.empty((0, 0))
    if train.size == 0:
        raise ContractViolation("standardize needs at least one training window")

    mu = float(train.mean())
    sigma = float(train.std())
    if not sigma > 0.0:
        raise DegenerateScale(f"training contexts are constant at {mu:.3f} bpm (sigma = 0)")

    stats = StandardizationStats(mu=mu, sigma=sigma)
    logger.info(f"Standardization: mu={mu:.4f} bpm, sigma={sigma:.4f} bpm from {train.shape[0]} train windows")
    windowed = WindowedDataset(
        record_id=arrays["record_id"],
        start_index=arrays["start_index"],
        cls_label=arrays["cls_label"],
        fc_target=arrays["fc_target"],
        context=arrays["context"],
        split_name=split_name,
        stats=stats,
        T=arrays["context"].shape[1],
    )
    return windowed, stats
