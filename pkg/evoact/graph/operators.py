"""The fixed operator vocabulary: 27 unary and 7 binary kernels.

Every kernel is a numpy/scipy ufunc composition, so the same code evaluates a
scalar or an elementwise array. Kernels never raise; non-finite values are
ordinary outputs and are detected downstream.
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
from scipy import special

ELU_ALPHA = 1.0
SELU_LAMBDA = 1.05070098
SELU_ALPHA = 1.67326324
HARD_SIGMOID_SLOPE = 0.2

_TWO_OVER_SQRT_PI = 2.0 / np.sqrt(np.pi)

Kernel = Callable[..., np.ndarray]
Derivative = Callable[..., tuple[np.ndarray, ...]]


@dataclass(frozen=True)
class Operator:
    """One entry of the operator vocabulary."""

    name: str
    arity: int
    forward: Kernel
    derivative: Derivative
    # False where the derivative jumps or the kernel is masked
    smooth: bool = True


def _zeros(x: np.ndarray) -> np.ndarray:
    return np.zeros_like(x)


def _ones(x: np.ndarray) -> np.ndarray:
    return np.ones_like(x)


def _ones_pair(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.ones(np.broadcast_shapes(np.shape(a), np.shape(b)))


def _nonzero(x: np.ndarray) -> np.ndarray:
    """Replace exact zeros by one so a masked division is well defined."""
    return np.where(x == 0, 1.0, x)


# -- unary kernels -----------------------------------------------------------


def _safe_reciprocal(x):
    return np.where(x == 0, 0.0, 1.0 / _nonzero(x))


def _safe_reciprocal_d(x):
    return (np.where(x == 0, 0.0, -1.0 / _nonzero(x) ** 2),)


def _sigmoid_d(x):
    s = special.expit(x)
    return (s * (1.0 - s),)


def _log_sigmoid(x):
    return -np.logaddexp(0.0, -x)


def _i0e_d(x):
    return (special.i1e(x) - np.sign(x) * special.i0e(x),)


def _i1e_d(x):
    safe = _nonzero(x)
    slope = special.i0e(x) - special.i1e(x) / safe - np.sign(x) * special.i1e(x)
    return (np.where(x == 0, 0.5, slope),)


def _elu(x):
    return np.where(x > 0, x, ELU_ALPHA * np.expm1(np.minimum(x, 0.0)))


def _elu_d(x):
    return (np.where(x >= 0, 1.0, ELU_ALPHA * np.exp(np.minimum(x, 0.0))),)


def _selu(x):
    return SELU_LAMBDA * np.where(x > 0, x, SELU_ALPHA * np.expm1(np.minimum(x, 0.0)))


def _selu_d(x):
    return (SELU_LAMBDA * np.where(x >= 0, 1.0, SELU_ALPHA * np.exp(np.minimum(x, 0.0))),)


def _swish_d(x):
    s = special.expit(x)
    return (s + x * s * (1.0 - s),)


def _hard_sigmoid(x):
    return np.clip(HARD_SIGMOID_SLOPE * x + 0.5, 0.0, 1.0)


def _hard_sigmoid_d(x):
    return (np.where(np.abs(x) < 2.5, HARD_SIGMOID_SLOPE, 0.0),)


# -- binary kernels ----------------------------------------------------------


def _safe_div(a, b):
    return np.where(b == 0, 0.0, a / _nonzero(b))


def _safe_div_d(a, b):
    safe = _nonzero(b)
    masked = b == 0
    return (
        np.where(masked, 0.0, 1.0 / safe),
        np.where(masked, 0.0, -a / safe**2),
    )


def _pow_d(a, b):
    value = np.power(a, b)
    d_a = np.where(b == 0, 0.0, b * np.power(a, b - 1.0))
    d_b = np.where(a == 0, 0.0, value * np.log(np.abs(_nonzero(a))))
    return d_a, d_b


def _max_d(a, b):
    first = a >= b
    return first.astype(np.float64), (~first).astype(np.float64)


def _min_d(a, b):
    first = a <= b
    return first.astype(np.float64), (~first).astype(np.float64)


UNARY_OPERATORS: tuple[Operator, ...] = (
    Operator("const0", 1, _zeros, lambda x: (_zeros(x),)),
    Operator("const1", 1, _ones, lambda x: (_zeros(x),)),
    Operator("identity", 1, lambda x: x + 0.0, lambda x: (_ones(x),)),
    Operator("negate", 1, np.negative, lambda x: (-_ones(x),)),
    Operator("abs", 1, np.abs, lambda x: (np.sign(x),), smooth=False),
    Operator("safe_reciprocal", 1, _safe_reciprocal, _safe_reciprocal_d, smooth=False),
    Operator("square", 1, np.square, lambda x: (2.0 * x,)),
    Operator("exp", 1, np.exp, lambda x: (np.exp(x),)),
    Operator("expm1", 1, np.expm1, lambda x: (np.exp(x),)),
    Operator("erf", 1, special.erf, lambda x: (_TWO_OVER_SQRT_PI * np.exp(-x * x),)),
    Operator("erfc", 1, special.erfc, lambda x: (-_TWO_OVER_SQRT_PI * np.exp(-x * x),)),
    Operator("sinh", 1, np.sinh, lambda x: (np.cosh(x),)),
    Operator("cosh", 1, np.cosh, lambda x: (np.sinh(x),)),
    Operator("tanh", 1, np.tanh, lambda x: (1.0 - np.tanh(x) ** 2,)),
    Operator("sigmoid", 1, special.expit, _sigmoid_d),
    Operator("log_sigmoid", 1, _log_sigmoid, lambda x: (special.expit(-x),)),
    Operator("arcsinh", 1, np.arcsinh, lambda x: (1.0 / np.sqrt(1.0 + x * x),)),
    Operator("arctan", 1, np.arctan, lambda x: (1.0 / (1.0 + x * x),)),
    Operator("bessel_i0e", 1, special.i0e, _i0e_d, smooth=False),
    Operator("bessel_i1e", 1, special.i1e, _i1e_d, smooth=False),
    Operator("relu", 1, lambda x: np.maximum(x, 0.0), lambda x: ((x > 0).astype(np.float64),), smooth=False),
    Operator("elu", 1, _elu, _elu_d),
    Operator("selu", 1, _selu, _selu_d, smooth=False),
    Operator("swish", 1, lambda x: x * special.expit(x), _swish_d),
    Operator("softplus", 1, lambda x: np.logaddexp(0.0, x), lambda x: (special.expit(x),)),
    Operator("softsign", 1, lambda x: x / (1.0 + np.abs(x)), lambda x: (1.0 / (1.0 + np.abs(x)) ** 2,)),
    Operator("hard_sigmoid", 1, _hard_sigmoid, _hard_sigmoid_d, smooth=False),
)

BINARY_OPERATORS: tuple[Operator, ...] = (
    Operator("add", 2, np.add, lambda a, b: (_ones_pair(a, b), _ones_pair(a, b))),
    Operator("sub", 2, np.subtract, lambda a, b: (_ones_pair(a, b), -_ones_pair(a, b))),
    Operator("mul", 2, np.multiply, lambda a, b: tuple(np.broadcast_arrays(b, a))),
    Operator("safe_div", 2, _safe_div, _safe_div_d, smooth=False),
    Operator("pow", 2, np.power, _pow_d, smooth=False),
    Operator("max", 2, np.maximum, _max_d, smooth=False),
    Operator("min", 2, np.minimum, _min_d, smooth=False),
)

OPERATORS: dict[str, Operator] = {op.name: op for op in UNARY_OPERATORS + BINARY_OPERATORS}
UNARY_NAMES: tuple[str, ...] = tuple(op.name for op in UNARY_OPERATORS)
BINARY_NAMES: tuple[str, ...] = tuple(op.name for op in BINARY_OPERATORS)
ALL_NAMES: tuple[str, ...] = UNARY_NAMES + BINARY_NAMES

# Neutral second input for a freshly inserted binary operator; None means
# "copy the first input".
BINARY_NEUTRAL: dict[str, str | None] = {
    "add": "const0",
    "sub": "const0",
    "mul": "const1",
    "safe_div": "const1",
    "pow": "const1",
    "max": None,
    "min": None,
}


def get_operator(kind: str | Operator) -> Operator:
    """Look up an operator by name."""
    if isinstance(kind, Operator):
        return kind
    try:
        return OPERATORS[kind]
    except KeyError:
        raise KeyError(f"Unknown operator: {kind}") from None


def _unwrap(result: np.ndarray, scalar: bool):
    return float(result) if scalar else result


def op_forward(kind: str | Operator, *inputs):
    """Evaluate one operator; scalar inputs give a float back."""
    op = get_operator(kind)
    if len(inputs) != op.arity:
        raise ValueError(f"{op.name} takes {op.arity} input(s), got {len(inputs)}")
    arrays = [np.asarray(v, dtype=np.float64) for v in inputs]
    scalar = all(a.ndim == 0 for a in arrays)
    with np.errstate(all="ignore"):
        return _unwrap(op.forward(*arrays), scalar)


def op_derivative(kind: str | Operator, *inputs) -> tuple:
    """Partial derivatives of one operator with respect to each input."""
    op = get_operator(kind)
    if len(inputs) != op.arity:
        raise ValueError(f"{op.name} takes {op.arity} input(s), got {len(inputs)}")
    arrays = [np.asarray(v, dtype=np.float64) for v in inputs]
    scalar = all(a.ndim == 0 for a in arrays)
    with np.errstate(all="ignore"):
        return tuple(_unwrap(np.asarray(p, dtype=np.float64), scalar) for p in op.derivative(*arrays))
