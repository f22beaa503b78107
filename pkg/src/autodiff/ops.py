"""
Differentiable operations.

Shapes must match exactly, with one exception: ``add``/``sub`` accept a
vector right operand whose length equals the last axis (bias add).
``matmul`` follows numpy's rule for an N-d left operand against a 2-d
right operand, or two operands with identical leading dimensions.
"""

from typing import Optional, Sequence, Tuple, Union

import numpy as np
from scipy.special import expit

from src.autodiff.tensor import Tape, Tensor, as_tensor
from src.utils.errors import ContractViolation, ShapeError

Operand = Union[Tensor, np.ndarray, float]


def _emit(op: str, value: np.ndarray, inputs: Sequence[Tensor], backward) -> Tensor:
    out = Tensor(value)
    tape = Tape.current()
    if tape is not None and any(t.requires_grad for t in inputs):
        tape.record(op, out, inputs, backward)
    return out


def _is_bias(a: Tensor, b: Tensor) -> bool:
    return b.ndim == 1 and a.ndim >= 1 and a.shape[-1] == b.shape[0] and a.shape != b.shape


def _sum_to_bias(grad: np.ndarray) -> np.ndarray:
    return grad.reshape(-1, grad.shape[-1]).sum(axis=0)


# --- linear algebra and arithmetic ---

def matmul(a: Operand, b: Operand) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    if a.ndim < 2 or b.ndim < 2 or a.shape[-1] != b.shape[-2]:
        raise ShapeError("matmul", a.shape, b.shape)
    if b.ndim != 2 and a.shape[:-2] != b.shape[:-2]:
        raise ShapeError("matmul", a.shape, b.shape)

    def backward(g):
        ga = g @ np.swapaxes(b.data, -1, -2)
        if b.ndim == 2:
            gb = a.data.reshape(-1, a.shape[-1]).T @ g.reshape(-1, g.shape[-1])
        else:
            gb = np.swapaxes(a.data, -1, -2) @ g
        return ga, gb

    return _emit("matmul", a.data @ b.data, (a, b), backward)


def add(a: Operand, b: Operand) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    if a.shape == b.shape:
        return _emit("add", a.data + b.data, (a, b), lambda g: (g, g))
    if _is_bias(a, b):
        return _emit("add", a.data + b.data, (a, b), lambda g: (g, _sum_to_bias(g)))
    raise ShapeError("add", a.shape, b.shape)


def sub(a: Operand, b: Operand) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    if a.shape == b.shape:
        return _emit("sub", a.data - b.data, (a, b), lambda g: (g, -g))
    if _is_bias(a, b):
        return _emit("sub", a.data - b.data, (a, b), lambda g: (g, -_sum_to_bias(g)))
    raise ShapeError("sub", a.shape, b.shape)


def mul(a: Operand, b: Operand) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    if a.shape != b.shape:
        raise ShapeError("mul", a.shape, b.shape)
    return _emit("mul", a.data * b.data, (a, b), lambda g: (g * b.data, g * a.data))


def div(a: Operand, b: Operand) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    if a.shape != b.shape:
        raise ShapeError("div", a.shape, b.shape)
    value = a.data / b.data

    def backward(g):
        return g / b.data, -g * value / b.data

    return _emit("div", value, (a, b), backward)


def scale(x: Operand, factor: float) -> Tensor:
    """Multiply by a constant scalar."""
    x = as_tensor(x)
    factor = float(factor)
    return _emit("scale", x.data * factor, (x,), lambda g: (g * factor,))


def shift(x: Operand, offset: float) -> Tensor:
    """Add a constant scalar."""
    x = as_tensor(x)
    offset = float(offset)
    return _emit("shift", x.data + offset, (x,), lambda g: (g,))


# --- elementwise nonlinearities ---

def tanh(x: Operand) -> Tensor:
    x = as_tensor(x)
    value = np.tanh(x.data)
    return _emit("tanh", value, (x,), lambda g: (g * (1.0 - value * value),))


def sigmoid(x: Operand) -> Tensor:
    x = as_tensor(x)
    value = expit(x.data)
    return _emit("sigmoid", value, (x,), lambda g: (g * value * (1.0 - value),))


def relu(x: Operand) -> Tensor:
    x = as_tensor(x)
    active = x.data > 0.0
    return _emit("relu", np.where(active, x.data, 0.0), (x,), lambda g: (g * active,))


def exp(x: Operand) -> Tensor:
    x = as_tensor(x)
    value = np.exp(x.data)
    return _emit("exp", value, (x,), lambda g: (g * value,))


def log(x: Operand) -> Tensor:
    x = as_tensor(x)
    if np.any(x.data <= 0.0):
        raise ContractViolation("log of a non-positive value")
    return _emit("log", np.log(x.data), (x,), lambda g: (g / x.data,))


def softplus(x: Operand) -> Tensor:
    """log(1 + e^x), evaluated without overflow."""
    x = as_tensor(x)
    return _emit("softplus", np.logaddexp(0.0, x.data), (x,), lambda g: (g * expit(x.data),))


def softmax(x: Operand) -> Tensor:
    """Softmax over the last axis."""
    x = as_tensor(x)
    shifted = x.data - x.data.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    value = e / e.sum(axis=-1, keepdims=True)

    def backward(g):
        return (value * (g - (g * value).sum(axis=-1, keepdims=True)),)

    return _emit("softmax", value, (x,), backward)


# --- structure ---

def concat(tensors: Sequence[Operand], axis: int = -1) -> Tensor:
    tensors = [as_tensor(t) for t in tensors]
    ndim = tensors[0].ndim
    ax = axis % ndim
    for t in tensors[1:]:
        if t.ndim != ndim or t.shape[:ax] + t.shape[ax + 1:] != tensors[0].shape[:ax] + tensors[0].shape[ax + 1:]:
            raise ShapeError("concat", *(u.shape for u in tensors))
    bounds = np.cumsum([t.shape[ax] for t in tensors])[:-1]

    def backward(g):
        return tuple(np.split(g, bounds, axis=ax))

    return _emit("concat", np.concatenate([t.data for t in tensors], axis=ax), tensors, backward)


def slice(x: Operand, start: int, stop: int, axis: int = -1) -> Tensor:
    """x[..., start:stop, ...] along ``axis``."""
    x = as_tensor(x)
    ax = axis % x.ndim
    if not 0 <= start < stop <= x.shape[ax]:
        raise ShapeError(f"slice[{start}:{stop}] on axis {ax}", x.shape)
    index = tuple(np.s_[start:stop] if k == ax else np.s_[:] for k in range(x.ndim))

    def backward(g):
        full = np.zeros_like(x.data)
        full[index] = g
        return (full,)

    return _emit("slice", x.data[index], (x,), backward)


def reshape(x: Operand, shape: Tuple[int, ...]) -> Tensor:
    x = as_tensor(x)
    try:
        value = x.data.reshape(shape)
    except ValueError:
        raise ShapeError(f"reshape to {shape}", x.shape)
    return _emit("reshape", value, (x,), lambda g: (g.reshape(x.shape),))


def transpose(x: Operand, axes: Optional[Tuple[int, ...]] = None) -> Tensor:
    x = as_tensor(x)
    if axes is None:
        axes = tuple(reversed(range(x.ndim)))
    inverse = tuple(np.argsort(axes))
    return _emit("transpose", np.transpose(x.data, axes), (x,), lambda g: (np.transpose(g, inverse),))


# --- reductions ---

def sum(x: Operand, axis: Optional[int] = None) -> Tensor:
    x = as_tensor(x)
    if axis is None:
        return _emit("sum", np.asarray(x.data.sum()), (x,), lambda g: (np.broadcast_to(g, x.shape).copy(),))
    ax = axis % x.ndim

    def backward(g):
        return (np.broadcast_to(np.expand_dims(g, ax), x.shape).copy(),)

    return _emit("sum", x.data.sum(axis=ax), (x,), backward)


def mean(x: Operand, axis: Optional[int] = None) -> Tensor:
    x = as_tensor(x)
    count = x.data.size if axis is None else x.shape[axis % x.ndim]
    return scale(sum(x, axis), 1.0 / count)


# --- fused layers ---

def layer_norm(x: Operand, gamma: Operand, beta: Operand, eps: float = 1e-5) -> Tensor:
    """Normalize over the last axis, then apply elementwise gain and bias."""
    x, gamma, beta = as_tensor(x), as_tensor(gamma), as_tensor(beta)
    if gamma.shape != (x.shape[-1],) or beta.shape != (x.shape[-1],):
        raise ShapeError("layer_norm", x.shape, gamma.shape, beta.shape)
    centered = x.data - x.data.mean(axis=-1, keepdims=True)
    inv_std = 1.0 / np.sqrt((centered ** 2).mean(axis=-1, keepdims=True) + eps)
    normed = centered * inv_std

    def backward(g):
        gn = g * gamma.data
        gx = inv_std * (gn - gn.mean(axis=-1, keepdims=True)
                        - normed * (gn * normed).mean(axis=-1, keepdims=True))
        return gx, _sum_to_bias(g * normed), _sum_to_bias(g)

    return _emit("layer_norm", normed * gamma.data + beta.data, (x, gamma, beta), backward)
