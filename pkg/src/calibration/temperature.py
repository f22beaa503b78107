"""
Post-hoc temperature scaling of classification logits.
"""

import logging

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import expit

from src.utils.errors import CalibrationSkipped, ContractViolation

logger = logging.getLogger(__name__)

LOG_T_BOUNDS = (float(np.log(0.05)), float(np.log(20.0)))
LOG_T_TOLERANCE = 1e-4


def mean_bce(logits: np.ndarray, labels: np.ndarray, temperature: float = 1.0) -> float:
    """Mean binary cross-entropy of sigmoid(s / T), computed from logits."""
    s = np.asarray(logits, dtype=np.float64) / temperature
    y = np.asarray(labels, dtype=np.float64)
    return float(np.mean(y * np.logaddexp(0.0, -s) + (1.0 - y) * np.logaddexp(0.0, s)))


def fit_temperature(val_logits, val_labels) -> float:
    """
    Temperature minimizing validation BCE.

    Bounded scalar search over log T in [log 0.05, log 20] to 1e-4 absolute
    tolerance; T = 1 is returned instead when it scores at least as well, so
    scaling never raises validation BCE.

    Raises:
        CalibrationSkipped: validation holds a single class (fallback T = 1)
    """
    logits = np.asarray(val_logits, dtype=np.float64)
    labels = np.asarray(val_labels, dtype=np.float64)
    if logits.size == 0 or labels.min() == labels.max():
        raise CalibrationSkipped("temperature scaling needs both classes in validation; using T = 1")

    search = minimize_scalar(
        lambda log_t: mean_bce(logits, labels, float(np.exp(log_t))),
        bounds=LOG_T_BOUNDS,
        method="bounded",
        options={"xatol": LOG_T_TOLERANCE},
    )
    temperature = float(np.exp(search.x))
    before = mean_bce(logits, labels, 1.0)
    after = mean_bce(logits, labels, temperature)
    if after > before:
        temperature, after = 1.0, before
    logger.info(f"Temperature scaling: T*={temperature:.4f}, val BCE {before:.5f} -> {after:.5f}")
    return temperature


def apply_temperature(logits, temperature: float) -> np.ndarray:
    """sigmoid(s / T) elementwise."""
    if not temperature > 0:
        raise ContractViolation(f"temperature must be positive, got {temperature}")
    return expit(np.asarray(logits, dtype=np.float64) / temperature)
