"""
Non-learned baselines: always-negative classifier and persistence forecaster.
"""

from typing import Tuple

import numpy as np


def baseline_always_negative(n_windows: int) -> np.ndarray:
    """Probability 0 for every window."""
    return np.zeros(int(n_windows), dtype=np.float64)


def baseline_persistence(context_bpm: np.ndarray, sigma_bpm: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    Next value equals the last context sample.

    For CRPS the point forecast is widened to a Gaussian with the given
    scale (the train-split std of one-step differences).

    Args:
        context_bpm: N x T raw contexts
        sigma_bpm: Forecast scale in bpm, > 0

    Returns:
        (mu_bpm, sigma_bpm) arrays of length N
    """
    context_bpm = np.asarray(context_bpm, dtype=np.float64)
    mu = context_bpm[:, -1].copy()
    return mu, np.full(mu.shape, float(sigma_bpm))
