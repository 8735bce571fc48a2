"""Activation plug-ins the trainer can backpropagate through."""

from __future__ import annotations

from abc import ABC, abstractmethod
from collections.abc import Callable, Sequence
from typing import Any

import numpy as np

from evoact.config import Granularity
from evoact.errors import GraphStructureError
from evoact.graph.graph import MAX_PARAMS, ActivationGraph, GradResult


class ActivationFunction(ABC):
    """Elementwise activation with learnable parameters.

    `params` is a sequence with one entry per parameter index; entries are scalars
    or arrays broadcastable against `x` (one value per unit or per layer).

    `granularity` is the parameter sharing the activation was designed for; None
    leaves it to the training spec.
    """

    granularity: Granularity | None = None

    @property
    @abstractmethod
    def name(self) -> str:
        """Display name (canonical expression for graphs)."""
        ...

    @abstractmethod
    def initial_params(self) -> list[float]:
        """Starting value of every parameter index."""
        ...

    @abstractmethod
    def forward_backward(self, x: np.ndarray, params: Sequence[Any]) -> GradResult:
        """Value, derivative in x, and derivative in each parameter (all elementwise)."""
        ...

    @property
    def param_count(self) -> int:
        return len(self.initial_params())

    def forward(self, x: np.ndarray, params: Sequence[Any] | None = None) -> np.ndarray:
        params = self.initial_params() if params is None else params
        return self.forward_backward(x, params).value

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self.forward(np.asarray(x, dtype=np.float64))


class GraphActivation(ActivationFunction):
    """An evolved activation graph; every parameter starts at one."""

    def __init__(self, graph: ActivationGraph):
        if graph.param_count > MAX_PARAMS:
            raise GraphStructureError(f"{graph.param_count} parameters; a trainable activation allows at most {MAX_PARAMS}")
        self.graph = graph

    @property
    def name(self) -> str:
        return str(self.graph)

    def initial_params(self) -> list[float]:
        return [1.0] * self.graph.param_count

    def forward(self, x: np.ndarray, params: Sequence[Any] | None = None) -> np.ndarray:
        params = self.initial_params() if params is None else params
        return self.graph.eval(params, x)

    def forward_backward(self, x: np.ndarray, params: Sequence[Any]) -> GradResult:
        return self.graph.eval_grad(params, x)


NativeKernel = Callable[[np.ndarray, Sequence[Any]], GradResult]


class NativeActivation(ActivationFunction):
    """Activation given by a closed-form kernel rather than a graph."""

    def __init__(
        self,
        name: str,
        kernel: NativeKernel,
        initial: Sequence[float] = (),
        granularity: Granularity | None = None,
    ):
        self._name = name
        self.granularity = granularity
        self._kernel = kernel
        self._initial = [float(v) for v in initial]

    @property
    def name(self) -> str:
        return self._name

    def initial_params(self) -> list[float]:
        return list(self._initial)

    def forward_backward(self, x: np.ndarray, params: Sequence[Any]) -> GradResult:
        if len(params) != len(self._initial):
            raise ValueError(f"{self._name} has {len(self._initial)} parameter(s), got {len(params)}")
        x = np.asarray(x, dtype=np.float64)
        with np.errstate(all="ignore"):
            return self._kernel(x, params)


class ScaledActivation(ActivationFunction):
    """alpha * inner(beta * x); alpha and beta come first, then the inner parameters."""

    def __init__(self, inner: ActivationFunction):
        self.inner = inner
        self.granularity = inner.granularity

    @property
    def name(self) -> str:
        return f"alpha*{self.inner.name}(beta*x)"

    def initial_params(self) -> list[float]:
        return [1.0, 1.0, *self.inner.initial_params()]

    def forward_backward(self, x: np.ndarray, params: Sequence[Any]) -> GradResult:
        alpha, beta, *rest = params
        x = np.asarray(x, dtype=np.float64)
        with np.errstate(all="ignore"):
            inner = self.inner.forward_backward(beta * x, rest)
            value = alpha * inner.value
            d_dx = alpha * beta * inner.d_dx
            d_alpha = inner.value
            d_beta = alpha * x * inner.d_dx
            d_rest = tuple(alpha * d for d in inner.d_dparams)
        return GradResult(value, d_dx, (d_alpha, d_beta, *d_rest))


def as_activation(fn: ActivationFunction | ActivationGraph) -> ActivationFunction:
    if isinstance(fn, ActivationFunction):
        return fn
    if isinstance(fn, ActivationGraph):
        return GraphActivation(fn)
    raise TypeError(f"not an activation: {fn!r}")
