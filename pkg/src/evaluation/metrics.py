"""
Classification and forecasting metrics.

Metrics that are undefined on the given data raise ``MetricUndefined``; the
bootstrap skips such draws and reports render them as missing.
"""

import math
from typing import Dict, List, Tuple

import numpy as np
from scipy.special import ndtr
from scipy.stats import norm
from sklearn.metrics import (
    average_precision_score,
    brier_score_loss,
    f1_score,
    mean_absolute_error,
    mean_squared_error,
    roc_auc_score,
)

from src.utils.errors import ContractViolation, MetricUndefined

_INV_SQRT_PI = 1.0 / math.sqrt(math.pi)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


def _binary(labels) -> np.ndarray:
    return np.asarray(labels).astype(np.int64)


def auroc(probs, labels) -> float:
    """Mann-Whitney AUROC; tied pairs count one half."""
    y = _binary(labels)
    if y.size == 0 or y.min() == y.max():
        raise MetricUndefined("AUROC needs both classes")
    return float(roc_auc_score(y, np.asarray(probs, dtype=np.float64)))


def auprc(probs, labels) -> float:
    """Average precision (recall-step weighted precision)."""
    y = _binary(labels)
    if not y.any():
        raise MetricUndefined("AUPRC needs at least one positive")
    return float(average_precision_score(y, np.asarray(probs, dtype=np.float64)))


def brier(probs, labels) -> float:
    y = _binary(labels)
    if y.size == 0:
        raise MetricUndefined("Brier score of an empty set")
    return float(brier_score_loss(y, np.asarray(probs, dtype=np.float64), pos_label=1))


def _bin_index(probs: np.ndarray, n_bins: int) -> np.ndarray:
    # [k/B, (k+1)/B) with the last bin closed at 1
    return np.minimum(np.floor(probs * n_bins).astype(np.int64), n_bins - 1)


def ece(probs, labels, n_bins: int = 10) -> float:
    """Expected calibration error over equal-width bins; empty bins add 0."""
    if n_bins < 1:
        raise ContractViolation(f"n_bins must be >= 1, got {n_bins}")
    p = np.asarray(probs, dtype=np.float64)
    y = np.asarray(labels, dtype=np.float64)
    if p.size == 0:
        raise MetricUndefined("ECE of an empty set")
    bins = _bin_index(p, n_bins)
    conf = np.bincount(bins, weights=p, minlength=n_bins)
    acc = np.bincount(bins, weights=y, minlength=n_bins)
    return float(np.abs(acc - conf).sum() / p.size)


def reliability_bins(probs, labels, n_bins: int = 10) -> List[Dict[str, float]]:
    """Per-bin count, mean confidence and accuracy (reliability-diagram data)."""
    p = np.asarray(probs, dtype=np.float64)
    y = np.asarray(labels, dtype=np.float64)
    bins = _bin_index(p, n_bins)
    rows = []
    for b in range(n_bins):
        members = bins == b
        count = int(members.sum())
        rows.append({
            "bin_low": b / n_bins,
            "bin_high": (b + 1) / n_bins,
            "count": count,
            "mean_conf": float(p[members].mean()) if count else float("nan"),
            "accuracy": float(y[members].mean()) if count else float("nan"),
        })
    return rows


def f1_at_threshold(probs, labels, threshold: float) -> float:
    """F1 of the decision p >= threshold; 0 when nothing is predicted positive."""
    y = _binary(labels)
    predicted = (np.asarray(probs, dtype=np.float64) >= threshold).astype(np.int64)
    return float(f1_score(y, predicted, zero_division=0))


def mae_rmse(mu_bpm, targets_bpm) -> Tuple[float, float]:
    mu = np.asarray(mu_bpm, dtype=np.float64)
    y = np.asarray(targets_bpm, dtype=np.float64)
    if y.size == 0:
        raise MetricUndefined("MAE/RMSE of an empty set")
    return float(mean_absolute_error(y, mu)), float(math.sqrt(mean_squared_error(y, mu)))


def crps_gaussian(mu, sigma, y) -> np.ndarray:
    """
    Closed-form CRPS of N(mu, sigma^2) at y, elementwise:
    sigma * [z (2 Phi(z) - 1) + 2 phi(z) - 1 / sqrt(pi)], z = (y - mu) / sigma.
    """
    mu = np.asarray(mu, dtype=np.float64)
    sigma = np.asarray(sigma, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if np.any(sigma <= 0):
        raise ContractViolation("CRPS needs sigma > 0")
    z = (y - mu) / sigma
    pdf = _INV_SQRT_2PI * np.exp(-0.5 * z * z)
    return sigma * (z * (2.0 * ndtr(z) - 1.0) + 2.0 * pdf - _INV_SQRT_PI)


def mean_crps(mu, sigma, y) -> float:
    values = crps_gaussian(mu, sigma, y)
    if values.size == 0:
        raise MetricUndefined("CRPS of an empty set")
    return float(np.mean(values))


def interval_coverage(mu, sigma, y, level: float = 0.9) -> float:
    """Fraction of targets inside the central Gaussian interval at ``level``."""
    half_width = norm.ppf(0.5 + level / 2.0) * np.asarray(sigma, dtype=np.float64)
    inside = np.abs(np.asarray(y, dtype=np.float64) - np.asarray(mu, dtype=np.float64)) <= half_width
    if inside.size == 0:
        raise MetricUndefined("coverage of an empty set")
    return float(inside.mean())
