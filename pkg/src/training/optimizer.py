"""
AdamW with decoupled weight decay.
"""

from typing import Dict, Mapping, Optional

import numpy as np

from src.autodiff.tensor import Parameter
from src.training.schemas import AdamWState, TrainConfig


def init_adamw(params: Mapping[str, Parameter]) -> AdamWState:
    return AdamWState(
        m={name: np.zeros_like(p.data) for name, p in params.items()},
        v={name: np.zeros_like(p.data) for name, p in params.items()},
        step=0,
    )


def adamw_step(params: Mapping[str, Parameter], state: AdamWState, config: TrainConfig,
               grads: Optional[Mapping[str, np.ndarray]] = None) -> AdamWState:
    """
    One AdamW update in place.

    Weights first shrink by (1 - lr * weight_decay); then the bias-corrected
    Adam step is applied with the raw gradient.

    Args:
        params: Parameters to update
        state: Moments and step counter (updated in place)
        config: lr, weight_decay, beta1, beta2, adam_eps
        grads: Gradients by name; defaults to each parameter's ``grad``
    """
    state.step += 1
    b1, b2 = config.beta1, config.beta2
    correction1 = 1.0 - b1 ** state.step
    correction2 = 1.0 - b2 ** state.step
    for name, p in params.items():
        g = p.grad if grads is None else grads[name]
        if config.weight_decay:
            p.data *= 1.0 - config.lr * config.weight_decay
        m = state.m[name] = b1 * state.m[name] + (1.0 - b1) * g
        v = state.v[name] = b2 * state.v[name] + (1.0 - b2) * g * g
        p.data -= config.lr * (m / correction1) / (np.sqrt(v / correction2) + config.adam_eps)
    return state


def zero_grads(params: Dict[str, Parameter]) -> None:
    for p in params.values():
        p.zero_grad()
