"""
Finite-difference verification of analytic gradients.
"""

import logging
from typing import Callable, Dict, Sequence

import numpy as np

from src.autodiff.tensor import Parameter, Tape, Tensor

logger = logging.getLogger(__name__)


def analytic_gradients(closure: Callable[[], Tensor], params: Sequence[Parameter]) -> Dict[str, np.ndarray]:
    """Zero gradients, run one recorded forward pass and the reverse pass."""
    for p in params:
        p.zero_grad()
    with Tape() as tape:
        loss = closure()
    tape.backward(loss)
    return {p.name: p.grad.copy() for p in params}


def check_gradients(closure: Callable[[], Tensor], params: Sequence[Parameter],
                    epsilon: float = 1e-4) -> float:
    """
    Compare analytic gradients with central differences coordinate by coordinate.

    The closure must be deterministic and rebuild the loss from the current
    parameter values on every call.

    Returns:
        max over coordinates of |a - n| / max(|a|, |n|, 1e-8)
    """
    analytic = analytic_gradients(closure, params)
    worst = 0.0
    worst_at = ""
    for p in params:
        flat = p.data.reshape(-1)
        grad = analytic[p.name].reshape(-1)
        for k in range(flat.size):
            original = flat[k]
            flat[k] = original + epsilon
            f_plus = closure().item()
            flat[k] = original - epsilon
            f_minus = closure().item()
            flat[k] = original
            numeric = (f_plus - f_minus) / (2.0 * epsilon)
            err = abs(grad[k] - numeric) / max(abs(grad[k]), abs(numeric), 1e-8)
            if err > worst:
                worst, worst_at = err, f"{p.name}[{k}]"
    logger.debug(f"Gradient check: max relative error {worst:.3e} at {worst_at or '-'}")
    return worst
