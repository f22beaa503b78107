"""
Task heads shared by both encoders.
"""

from typing import Dict, Sequence

import numpy as np

from src.autodiff import ops
from src.autodiff.tensor import Parameter, Tensor
from src.models.init import ParamBuilder
from src.models.schemas import SIGMA_FLOOR, HeadOutputs

PREFIX = "head"


def init_heads(hidden: int, builder: ParamBuilder,
               tasks: Sequence[str] = ("classification", "forecasting")) -> Dict[str, Parameter]:
    if "classification" in tasks:
        builder.weight(f"{PREFIX}.w_o", (hidden, 1))
        builder.bias(f"{PREFIX}.b_o", 1)
    if "forecasting" in tasks:
        builder.weight(f"{PREFIX}.w_mu", (hidden, 1))
        builder.bias(f"{PREFIX}.b_mu", 1)
        builder.weight(f"{PREFIX}.w_s", (hidden, 1))
        builder.bias(f"{PREFIX}.b_s", 1)
    return builder.params


def _affine(h_T: Tensor, params: Dict[str, Parameter], w: str, b: str) -> Tensor:
    out = ops.add(ops.matmul(h_T, params[f"{PREFIX}.{w}"]), params[f"{PREFIX}.{b}"])
    return ops.reshape(out, (h_T.shape[0],))


def heads_forward(h_T: Tensor, params: Dict[str, Parameter], x_tilde_T: np.ndarray,
                  residual: bool = True) -> HeadOutputs:
    """
    Apply whichever heads exist in ``params``.

    s = w_o h + b_o;  dmu = w_mu h + b_mu;  sigma_n = softplus(w_s h + b_s) + 1e-4;
    mu~ = x~_T + dmu in residual mode, dmu itself in absolute mode.
    """
    outputs = HeadOutputs()
    if f"{PREFIX}.w_o" in params:
        outputs.cls_logit = _affine(h_T, params, "w_o", "b_o")
    if f"{PREFIX}.w_mu" in params:
        outputs.delta_mu = _affine(h_T, params, "w_mu", "b_mu")
        raw_scale = _affine(h_T, params, "w_s", "b_s")
        outputs.sigma_n = ops.shift(ops.softplus(raw_scale), SIGMA_FLOOR)
        if residual:
            outputs.mu_tilde = ops.add(np.asarray(x_tilde_T, dtype=np.float64), outputs.delta_mu)
        else:
            outputs.mu_tilde = outputs.delta_mu
    return outputs
