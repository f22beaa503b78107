"""
Operating-point selection by validation F-beta over the PR curve.
"""

import logging
from typing import Tuple

import numpy as np

from src.utils.errors import ThresholdUndefined

logger = logging.getLogger(__name__)


def fbeta_sweep(probs, labels, beta: float = 2.0) -> Tuple[np.ndarray, np.ndarray]:
    """
    F-beta at every candidate threshold (unique probabilities plus 0 and 1).

    A window is predicted positive when p >= tau; F-beta is 0 when nothing is
    predicted positive.

    Returns:
        (thresholds ascending, f_beta per threshold)
    """
    p = np.asarray(probs, dtype=np.float64)
    y = np.asarray(labels).astype(bool)
    thresholds = np.unique(np.concatenate([p, [0.0, 1.0]]))
    predicted = p[None, :] >= thresholds[:, None]
    tp = (predicted & y[None, :]).sum(axis=1).astype(np.float64)
    fp = (predicted & ~y[None, :]).sum(axis=1).astype(np.float64)
    n_pos = float(y.sum())
    precision = np.divide(tp, tp + fp, out=np.zeros_like(tp), where=(tp + fp) > 0)
    recall = tp / n_pos if n_pos else np.zeros_like(tp)
    b2 = beta * beta
    denom = b2 * precision + recall
    scores = np.divide((1.0 + b2) * precision * recall, denom, out=np.zeros_like(tp), where=denom > 0)
    return thresholds, scores


def select_threshold_fbeta(val_probs, val_labels, beta: float = 2.0) -> float:
    """
    Threshold maximizing validation F-beta; ties go to the larger threshold.

    Raises:
        ThresholdUndefined: no positive example in validation
    """
    labels = np.asarray(val_labels)
    if labels.size == 0 or not labels.any():
        raise ThresholdUndefined("F-beta threshold needs at least one positive validation window")
    thresholds, scores = fbeta_sweep(val_probs, labels, beta)
    best = np.flatnonzero(scores == scores.max())[-1]
    logger.info(f"Operating point: tau*={thresholds[best]:.4f} (F{beta:g}={scores[best]:.4f})")
    return float(thresholds[best])
