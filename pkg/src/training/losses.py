"""
Training objectives: class-weighted BCE and the heteroscedastic Gaussian NLL.
"""

import numpy as np

from src.autodiff import ops
from src.autodiff.tensor import Tensor, as_tensor


def positive_class_weight(prevalence: float, eps: float = 1e-6) -> float:
    """alpha = (1 - p) / max(p, eps)."""
    return (1.0 - prevalence) / max(prevalence, eps)


def weighted_bce(logits, labels, alpha: float) -> Tensor:
    """
    Mean of -[alpha y log sigmoid(s) + (1 - y) log(1 - sigmoid(s))].

    Uses log sigmoid(s) = -softplus(-s) and log(1 - sigmoid(s)) = -softplus(s),
    which stays finite for any logit magnitude.
    """
    s = as_tensor(logits)
    y = np.asarray(labels, dtype=np.float64).reshape(s.shape)
    positive = ops.mul(alpha * y, ops.softplus(ops.scale(s, -1.0)))
    negative = ops.mul(1.0 - y, ops.softplus(s))
    return ops.mean(ops.add(positive, negative))


def gaussian_nll(mu_tilde, sigma_n, targets_tilde) -> Tensor:
    """
    (1/2N) sum ((y - mu) / sigma)^2 + (1/N) sum log sigma.

    The constant 0.5 log(2 pi) is left out.
    """
    mu = as_tensor(mu_tilde)
    sigma = as_tensor(sigma_n)
    y = np.asarray(targets_tilde, dtype=np.float64).reshape(mu.shape)
    z = ops.div(ops.sub(y, mu), sigma)
    return ops.add(ops.scale(ops.mean(ops.mul(z, z)), 0.5), ops.mean(ops.log(sigma)))
