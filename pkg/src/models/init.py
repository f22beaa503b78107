"""
Seeded parameter initialization.

Weight matrices draw from uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) where
fan_in is the number of rows; biases start at zero and layer-norm gains at
one. Tensors are drawn in declaration order, so a seed fixes every value.
"""

from typing import Dict, Tuple

import numpy as np

from src.autodiff.tensor import Parameter

Shape = Tuple[int, ...]


class ParamBuilder:
    """Collects named parameters drawn from one generator."""

    def __init__(self, rng: np.random.Generator):
        self.rng = rng
        self.params: Dict[str, Parameter] = {}

    def weight(self, name: str, shape: Shape) -> Parameter:
        bound = 1.0 / np.sqrt(shape[0])
        return self._add(name, self.rng.uniform(-bound, bound, size=shape))

    def bias(self, name: str, size: int) -> Parameter:
        return self._add(name, np.zeros(size))

    def ones(self, name: str, size: int) -> Parameter:
        return self._add(name, np.ones(size))

    def _add(self, name: str, value: np.ndarray) -> Parameter:
        if name in self.params:
            raise KeyError(f"duplicate parameter name {name}")
        self.params[name] = Parameter(name, value)
        return self.params[name]


def count_parameters(params: Dict[str, Parameter]) -> int:
    return int(sum(p.data.size for p in params.values()))

