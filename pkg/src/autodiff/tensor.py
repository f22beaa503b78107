"""
Tensors, parameters and the define-by-run tape.

A ``Tape`` is opened with ``with Tape() as tape:``; every operation on a
gradient-carrying tensor inside the block appends a node holding its inputs,
its output and a backward rule. Outside a tape operations only compute
values, which is how inference runs.
"""

import logging
import threading
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.utils.errors import ContractViolation

logger = logging.getLogger(__name__)

DTYPE = np.float64


class Tensor:
    """Row-major float64 array plus the tape bookkeeping for reverse mode."""

    __slots__ = ("data", "requires_grad", "_tape")

    def __init__(self, data, requires_grad: bool = False):
        self.data = np.asarray(data, dtype=DTYPE)
        self.requires_grad = requires_grad
        self._tape: Optional["Tape"] = None

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    def item(self) -> float:
        return float(self.data.reshape(-1)[0]) if self.data.size == 1 else float("nan")

    def numpy(self) -> np.ndarray:
        return self.data

    def __repr__(self) -> str:
        return f"Tensor(shape={self.shape}, requires_grad={self.requires_grad})"

    # Operator sugar; the rules live in ops.py.
    def __add__(self, other):
        from src.autodiff import ops
        return ops.add(self, other)

    def __sub__(self, other):
        from src.autodiff import ops
        return ops.sub(self, other)

    def __mul__(self, other):
        from src.autodiff import ops
        return ops.mul(self, other)

    def __truediv__(self, other):
        from src.autodiff import ops
        return ops.div(self, other)

    def __matmul__(self, other):
        from src.autodiff import ops
        return ops.matmul(self, other)

    def __neg__(self):
        from src.autodiff import ops
        return ops.scale(self, -1.0)


class Parameter(Tensor):
    """Named trainable tensor with an accumulated gradient of the same shape."""

    __slots__ = ("name", "grad")

    def __init__(self, name: str, data):
        super().__init__(data, requires_grad=True)
        self.name = name
        self.grad = np.zeros_like(self.data)

    def zero_grad(self):
        self.grad = np.zeros_like(self.data)

    def __repr__(self) -> str:
        return f"Parameter({self.name!r}, shape={self.shape})"


@dataclass
class Node:
    """One recorded operation."""
    op: str
    output: Tensor
    inputs: Tuple[Tensor, ...]
    backward: Callable[[np.ndarray], Sequence[Optional[np.ndarray]]]


class Tape:
    """Ordered record of operations for one forward/backward pass."""

    _local = threading.local()

    def __init__(self):
        self.nodes: List[Node] = []
        self._backward_done = False

    # --- context management (one active tape per thread) ---

    @classmethod
    def _stack(cls) -> List["Tape"]:
        if not hasattr(cls._local, "stack"):
            cls._local.stack = []
        return cls._local.stack

    @classmethod
    def current(cls) -> Optional["Tape"]:
        stack = cls._stack()
        return stack[-1] if stack else None

    def __enter__(self) -> "Tape":
        self._stack().append(self)
        return self

    def __exit__(self, exc_type, exc, tb):
        stack = self._stack()
        if stack and stack[-1] is self:
            stack.pop()
        return False

    # --- recording ---

    def record(self, op: str, output: Tensor, inputs: Sequence[Tensor],
               backward: Callable[[np.ndarray], Sequence[Optional[np.ndarray]]]) -> Tensor:
        output.requires_grad = True
        output._tape = self
        self.nodes.append(Node(op=op, output=output, inputs=tuple(inputs), backward=backward))
        return output

    def __len__(self) -> int:
        return len(self.nodes)

    # --- reverse pass ---

    def backward(self, loss: Tensor) -> Dict[str, np.ndarray]:
        """
        Accumulate d(loss)/d(p) into ``p.grad`` for every parameter reachable
        from ``loss``.

        Raises:
            ContractViolation: loss is not a scalar recorded on this tape
        """
        if loss.data.size != 1:
            raise ContractViolation(f"backward needs a scalar loss, got shape {loss.shape}")
        if loss._tape is not self:
            raise ContractViolation("loss was not produced on this tape")
        if self._backward_done:
            raise ContractViolation("backward already ran on this tape; record a new one")

        grads: Dict[int, np.ndarray] = {id(loss): np.ones_like(loss.data)}
        reached: Dict[int, Parameter] = {}
        for node in reversed(self.nodes):
            upstream = grads.pop(id(node.output), None)
            if upstream is None:
                continue
            input_grads = node.backward(upstream)
            for tensor, grad in zip(node.inputs, input_grads):
                if grad is None or not tensor.requires_grad:
                    continue
                key = id(tensor)
                if key in grads:
                    grads[key] = grads[key] + grad
                else:
                    grads[key] = grad
                if isinstance(tensor, Parameter):
                    reached[key] = tensor

        for key, param in reached.items():
            param.grad = param.grad + grads[key]
        self._backward_done = True
        return {p.name: p.grad for p in reached.values()}


def as_tensor(value) -> Tensor:
    """Wrap arrays and numbers as constant tensors; tensors pass through."""
    if isinstance(value, Tensor):
        return value
    return Tensor(value, requires_grad=False)


def backward(loss: Tensor) -> Dict[str, np.ndarray]:
    """Run the reverse pass on the tape that produced ``loss``."""
    if loss._tape is None:
        raise ContractViolation("loss carries no tape; build it inside `with Tape():`")
    return loss._tape.backward(loss)
