"""
GRU-D encoder: learned input/hidden decays, imputation toward the train mean,
a tanh input projection and a standard GRU cell.
"""

import logging
from typing import Dict, Optional

import numpy as np

from src.autodiff import ops
from src.autodiff.tensor import Parameter, Tensor
from src.models.init import ParamBuilder
from src.models.schemas import GrudConfig
from src.utils.errors import ContractViolation, ShapeError

logger = logging.getLogger(__name__)

PREFIX = "grud"


def init_grud(config: GrudConfig, builder: ParamBuilder) -> Dict[str, Parameter]:
    D, H = config.input_dim, config.hidden_dim
    builder.weight(f"{PREFIX}.W_gamma_x", (D, D))
    builder.weight(f"{PREFIX}.W_gamma_h", (D, H))
    builder.weight(f"{PREFIX}.W_z", (2 * D, H))
    builder.bias(f"{PREFIX}.b_z", H)
    # GRU cell, gates stacked as [reset | update | candidate]
    builder.weight(f"{PREFIX}.W_x", (H, 3 * H))
    builder.weight(f"{PREFIX}.W_h", (H, 3 * H))
    builder.bias(f"{PREFIX}.b_x", 3 * H)
    builder.bias(f"{PREFIX}.b_h", 3 * H)
    return builder.params


def gru_cell(z: Tensor, h: Tensor, params: Dict[str, Parameter], hidden: int) -> Tensor:
    """
    One GRU step (PyTorch gate layout).

    r = sigmoid(z W_xr + b_xr + h W_hr + b_hr)
    u = sigmoid(z W_xu + b_xu + h W_hu + b_hu)
    n = tanh(z W_xn + b_xn + r * (h W_hn + b_hn))
    h' = (1 - u) * n + u * h
    """
    gx = ops.add(ops.matmul(z, params[f"{PREFIX}.W_x"]), params[f"{PREFIX}.b_x"])
    gh = ops.add(ops.matmul(h, params[f"{PREFIX}.W_h"]), params[f"{PREFIX}.b_h"])
    r = ops.sigmoid(ops.add(ops.slice(gx, 0, hidden), ops.slice(gh, 0, hidden)))
    u = ops.sigmoid(ops.add(ops.slice(gx, hidden, 2 * hidden), ops.slice(gh, hidden, 2 * hidden)))
    n = ops.tanh(ops.add(ops.slice(gx, 2 * hidden, 3 * hidden),
                         ops.mul(r, ops.slice(gh, 2 * hidden, 3 * hidden))))
    return ops.add(n, ops.mul(u, ops.sub(h, n)))


def grud_forward(config: GrudConfig, params: Dict[str, Parameter], context: np.ndarray,
                 mask: Optional[np.ndarray] = None, delta: Optional[np.ndarray] = None) -> Tensor:
    """
    Run GRU-D over a batch of contexts and return the final hidden state.

    Args:
        config: Encoder configuration (train_mean in normalized units)
        params: Parameters created by ``init_grud``
        context: B x T x D normalized inputs
        mask: B x T x D observation indicators (default all observed)
        delta: B x T x D time since last observation, >= 0 (default zeros)

    Returns:
        h_T as a B x hidden tensor
    """
    context = np.asarray(context, dtype=np.float64)
    if context.ndim != 3 or context.shape[2] != config.input_dim or context.shape[1] < 1:
        raise ShapeError("grud_forward context", context.shape)
    B, T, D = context.shape
    mask = np.ones_like(context) if mask is None else np.asarray(mask, dtype=np.float64)
    delta = np.zeros_like(context) if delta is None else np.asarray(delta, dtype=np.float64)
    if mask.shape != context.shape or delta.shape != context.shape:
        raise ShapeError("grud_forward mask/delta", context.shape, mask.shape, delta.shape)
    if np.any(delta < 0):
        raise ContractViolation("GRU-D time deltas must be non-negative")

    H = config.hidden_dim
    x_bar = np.broadcast_to(np.asarray(config.train_mean, dtype=np.float64), (B, D))
    h = Tensor(np.zeros((B, H)))
    for t in range(T):
        x_t, m_t, d_t = context[:, t, :], mask[:, t, :], delta[:, t, :]
        gamma_x = ops.exp(ops.scale(ops.relu(ops.matmul(d_t, params[f"{PREFIX}.W_gamma_x"])), -1.0))
        gamma_h = ops.exp(ops.scale(ops.relu(ops.matmul(d_t, params[f"{PREFIX}.W_gamma_h"])), -1.0))
        # x_hat = m x + (1 - m)(gamma_x x + (1 - gamma_x) x_bar)
        decayed = ops.add(x_bar, ops.mul(gamma_x, x_t - x_bar))
        x_hat = ops.add(m_t * x_t, ops.mul(1.0 - m_t, decayed))
        z = ops.tanh(ops.add(ops.matmul(ops.concat([x_hat, m_t], axis=-1), params[f"{PREFIX}.W_z"]),
                             params[f"{PREFIX}.b_z"]))
        h = gru_cell(z, ops.mul(gamma_h, h), params, H)
    return h


class GrudEncoder:
    """Wraps ``grud_forward`` for univariate 1 Hz contexts (mask 1, delta 0)."""

    kind = "grud"

    def __init__(self, config: GrudConfig, params: Dict[str, Parameter]):
        self.config = config
        self.params = params

    @property
    def output_dim(self) -> int:
        return self.config.hidden_dim

    def encode(self, x_tilde: np.ndarray) -> Tensor:
        x = np.asarray(x_tilde, dtype=np.float64)
        if x.ndim == 2:
            x = x[:, :, None]
        return grud_forward(self.config, self.params, x)
