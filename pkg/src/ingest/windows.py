"""
Context windows, horizon labels and the positive-support threshold guard.
"""

import logging
from typing import Dict, List, Sequence

import numpy as np

from src.ingest.schemas import (
    DEFAULT_THETA_CANDIDATES,
    HrSeries,
    LabeledWindow,
    ThresholdGuardResult,
)
from src.utils.errors import ContractViolation, GuardUnsatisfied

logger = logging.getLogger(__name__)

MIN_POSITIVE_RECORDS = 3
MIN_POSITIVE_WINDOWS = 40


def build_windows(series: HrSeries, T: int = 60, H: int = 10, theta: float = 100.0,
                  candidates: Sequence[float] = DEFAULT_THETA_CANDIDATES) -> List[LabeledWindow]:
    """
    Cut a series into non-overlapping contexts with horizon labels.

    Windows start at offsets 0, T, 2T, ...; the H-second label horizon may
    overlap the next context. A window is kept only if all T + H samples
    exist.

    Args:
        series: Per-second heart rate of one record
        T: Context length (seconds)
        H: Label horizon (seconds)
        theta: Tachycardia threshold (bpm)
        candidates: Admissible thresholds

    Returns:
        Windows in offset order (empty if the series is shorter than T + H)
    """
    if theta not in candidates:
        raise ContractViolation(f"theta={theta} not among candidates {list(candidates)}")
    if T < 1 or H < 1:
        raise ContractViolation(f"T and H must be positive (got T={T}, H={H})")

    hr = series.hr
    windows = []
    for offset in range(0, hr.size - (T + H) + 1, T):
        context = hr[offset:offset + T].copy()
        horizon = hr[offset + T:offset + T + H]
        windows.append(LabeledWindow(
            record_id=series.record_id,
            context=context,
            cls_label=int(horizon.mean() >= theta),
            fc_target=float(horizon[0]),
            start_index=offset,
        ))
    return windows


def count_positives(corpus: Sequence[HrSeries], theta: float, T: int = 60, H: int = 10,
                    candidates: Sequence[float] = DEFAULT_THETA_CANDIDATES) -> Dict[str, int]:
    """
    Corpus-wide window and positive counts at one threshold.

    Returns:
        Dict with n_windows, n_positive_windows, n_positive_records
    """
    n_windows = 0
    n_positive_windows = 0
    n_positive_records = 0
    for series in corpus:
        labels = [w.cls_label for w in build_windows(series, T, H, theta, candidates)]
        n_windows += len(labels)
        positives = sum(labels)
        n_positive_windows += positives
        n_positive_records += int(positives > 0)
    return {
        "n_windows": n_windows,
        "n_positive_windows": n_positive_windows,
        "n_positive_records": n_positive_records,
    }


def select_threshold(corpus: Sequence[HrSeries],
                     candidates: Sequence[float] = DEFAULT_THETA_CANDIDATES,
                     T: int = 60, H: int = 10,
                     min_positive_records: int = MIN_POSITIVE_RECORDS,
                     min_positive_windows: int = MIN_POSITIVE_WINDOWS) -> ThresholdGuardResult:
    """
    Pick the first candidate threshold with enough positive support.

    Args:
        corpus: Heart-rate series of every record
        candidates: Thresholds in preference order
        T: Context length
        H: Label horizon
        min_positive_records: Guard on records with at least one positive window
        min_positive_windows: Guard on positive windows corpus-wide

    Returns:
        ThresholdGuardResult for the selected threshold

    Raises:
        GuardUnsatisfied: no candidate meets both guards
    """
    if not corpus:
        raise ContractViolation("select_threshold needs a non-empty corpus")

    best = None
    for theta in candidates:
        counts = count_positives(corpus, theta, T, H, candidates)
        logger.info(
            f"theta={theta:g}: {counts['n_positive_windows']} positive windows "
            f"across {counts['n_positive_records']} records ({counts['n_windows']} windows)"
        )
        result = ThresholdGuardResult(theta=theta, **counts)
        if (counts["n_positive_records"] >= min_positive_records
                and counts["n_positive_windows"] >= min_positive_windows):
            return result
        if best is None or ((result.n_positive_records, result.n_positive_windows)
                            > (best.n_positive_records, best.n_positive_windows)):
            best = result

    raise GuardUnsatisfied(
        f"no threshold in {list(candidates)} gives >= {min_positive_records} positive records "
        f"and >= {min_positive_windows} positive windows; best was theta={best.theta:g} with "
        f"{best.n_positive_records} records / {best.n_positive_windows} windows",
        best_theta=best.theta,
        n_positive_windows=best.n_positive_windows,
        n_positive_records=best.n_positive_records,
    )


def windows_as_arrays(windows: Sequence[LabeledWindow]) -> Dict[str, np.ndarray]:
    """Stack windows column-wise (contexts become an N x T matrix)."""
    if not windows:
        return {
            "record_id": np.empty(0, dtype=object),
            "start_index": np.empty(0, dtype=np.int64),
            "cls_label": np.empty(0, dtype=np.int64),
            "fc_target": np.empty(0, dtype=np.float64),
            "context": np.empty((0, 0), dtype=np.float64),
        }
    return {
        "record_id": np.array([w.record_id for w in windows], dtype=object),
        "start_index": np.array([w.start_index for w in windows], dtype=np.int64),
        "cls_label": np.array([w.cls_label for w in windows], dtype=np.int64),
        "fc_target": np.array([w.fc_target for w in windows], dtype=np.float64),
        "context": np.stack([w.context for w in windows]).astype(np.float64),
    }
