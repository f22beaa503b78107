"""
Compact Transformer encoder with sinusoidal positions and last-token pooling.

Each layer is post-norm: H~ = LN(MHA(H) + H), H' = LN(FFN(H~) + H~).
Attention is unmasked; every context sample precedes the prediction time.
"""

import logging
from typing import Dict, List, Optional

import numpy as np

from src.autodiff import ops
from src.autodiff.tensor import Parameter, Tensor
from src.models.init import ParamBuilder
from src.models.schemas import TransformerConfig
from src.utils.errors import ContractViolation, ShapeError

logger = logging.getLogger(__name__)

PREFIX = "tf"


def sinusoidal_positions(length: int, d_model: int) -> np.ndarray:
    """p[t, 2i] = sin(t / 10000^(2i/d)), p[t, 2i+1] = cos(t / 10000^(2i/d))."""
    positions = np.arange(length, dtype=np.float64)[:, None]
    rates = np.power(10000.0, -np.arange(0, d_model, 2, dtype=np.float64) / d_model)
    table = np.zeros((length, d_model))
    table[:, 0::2] = np.sin(positions * rates)
    table[:, 1::2] = np.cos(positions * rates[: d_model // 2])
    return table


def init_transformer(config: TransformerConfig, builder: ParamBuilder) -> Dict[str, Parameter]:
    d, f = config.d_model, config.ffn_dim
    builder.weight(f"{PREFIX}.W_in", (1, d))
    for layer in range(config.layers):
        p = f"{PREFIX}.l{layer}"
        for name in ("q", "k", "v", "o"):
            builder.weight(f"{p}.W_{name}", (d, d))
            builder.bias(f"{p}.b_{name}", d)
        builder.weight(f"{p}.W_ff1", (d, f))
        builder.bias(f"{p}.b_ff1", f)
        builder.weight(f"{p}.W_ff2", (f, d))
        builder.bias(f"{p}.b_ff2", d)
        if config.layer_norm:
            for norm in ("ln1", "ln2"):
                builder.ones(f"{p}.{norm}_g", d)
                builder.bias(f"{p}.{norm}_b", d)
    return builder.params


def _linear(x: Tensor, params: Dict[str, Parameter], weight: str, bias: str) -> Tensor:
    return ops.add(ops.matmul(x, params[weight]), params[bias])


def multi_head_attention(x: Tensor, params: Dict[str, Parameter], prefix: str, heads: int,
                         attention_out: Optional[List[np.ndarray]] = None) -> Tensor:
    """Scaled dot-product self-attention over B x T x d inputs."""
    B, T, d = x.shape
    dk = d // heads

    def split_heads(t: Tensor) -> Tensor:
        return ops.transpose(ops.reshape(t, (B, T, heads, dk)), (0, 2, 1, 3))

    q = split_heads(_linear(x, params, f"{prefix}.W_q", f"{prefix}.b_q"))
    k = split_heads(_linear(x, params, f"{prefix}.W_k", f"{prefix}.b_k"))
    v = split_heads(_linear(x, params, f"{prefix}.W_v", f"{prefix}.b_v"))
    scores = ops.scale(ops.matmul(q, ops.transpose(k, (0, 1, 3, 2))), 1.0 / np.sqrt(dk))
    weights = ops.softmax(scores)
    if attention_out is not None:
        attention_out.append(weights.data)
    mixed = ops.reshape(ops.transpose(ops.matmul(weights, v), (0, 2, 1, 3)), (B, T, d))
    return _linear(mixed, params, f"{prefix}.W_o", f"{prefix}.b_o")


def _norm(x: Tensor, params: Dict[str, Parameter], prefix: str, enabled: bool) -> Tensor:
    if not enabled:
        return x
    return ops.layer_norm(x, params[f"{prefix}_g"], params[f"{prefix}_b"])


def transformer_forward(config: TransformerConfig, params: Dict[str, Parameter], context: np.ndarray,
                        attention_out: Optional[List[np.ndarray]] = None) -> Tensor:
    """
    Encode B x T normalized contexts and return the last position of the final layer.

    Args:
        config: Encoder configuration
        params: Parameters created by ``init_transformer``
        context: B x T normalized inputs
        attention_out: When given, receives each layer's B x heads x T x T weights

    Returns:
        h_T as a B x d_model tensor
    """
    context = np.asarray(context, dtype=np.float64)
    if context.ndim != 2 or context.shape[1] < 1:
        raise ShapeError("transformer_forward context", context.shape)
    B, T = context.shape
    if T > config.max_len:
        raise ContractViolation(f"context length {T} exceeds max_len {config.max_len}")

    d = config.d_model
    positions = np.broadcast_to(sinusoidal_positions(T, d), (B, T, d))
    h = ops.add(ops.matmul(context[:, :, None], params[f"{PREFIX}.W_in"]), positions)
    for layer in range(config.layers):
        p = f"{PREFIX}.l{layer}"
        attended = multi_head_attention(h, params, p, config.heads, attention_out)
        h = _norm(ops.add(attended, h), params, f"{p}.ln1", config.layer_norm)
        hidden = ops.relu(_linear(h, params, f"{p}.W_ff1", f"{p}.b_ff1"))
        h = _norm(ops.add(_linear(hidden, params, f"{p}.W_ff2", f"{p}.b_ff2"), h),
                  params, f"{p}.ln2", config.layer_norm)
    return ops.reshape(ops.slice(h, T - 1, T, axis=1), (B, d))


class TransformerEncoder:
    """Wraps ``transformer_forward`` behind the encoder interface."""

    kind = "transformer"

    def __init__(self, config: TransformerConfig, params: Dict[str, Parameter]):
        self.config = config
        self.params = params

    @property
    def output_dim(self) -> int:
        return self.config.d_model

    def encode(self, x_tilde: np.ndarray) -> Tensor:
        return transformer_forward(self.config, self.params, x_tilde)
