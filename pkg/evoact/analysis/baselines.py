"""Reference activation functions: fixed, parametric and learnable."""

from __future__ import annotations

from collections.abc import Callable, Sequence
from typing import Any

import numpy as np
from scipy.special import expit

from evoact.config import Granularity
from evoact.errors import UnknownBaselineError
from evoact.graph.grammar import parse
from evoact.graph.graph import ActivationGraph, GradResult
from evoact.trainer.activations import (
    ActivationFunction,
    GraphActivation,
    NativeActivation,
    ScaledActivation,
    as_activation,
)

LEAKY_SLOPE = 0.01
PRELU_INIT = 0.25
GELU_C = np.sqrt(2.0 / np.pi)
GELU_CUBIC = 0.044715

APL_HINGES = 7
APL_INIT_OFFSETS = tuple(np.linspace(-3.0, 3.0, APL_HINGES))

PAU_NUMERATOR = (0.02979246, 0.61837738, 2.32335207, 3.05202660, 1.48548002, 0.25103717)
PAU_DENOMINATOR = (1.14201226, 4.39322834, 0.87154450, 0.34720652)

SPLASH_HINGES = (0.0, 1.0, 2.0, 2.5)


def _elish(x: np.ndarray, params: Sequence[Any]) -> GradResult:
    sig = expit(x)
    positive = x >= 0
    em1 = np.expm1(np.minimum(x, 0.0))
    value = np.where(positive, x * sig, em1 * sig)
    d_dx = np.where(positive, sig + x * sig * (1 - sig), (em1 + 1) * sig + em1 * sig * (1 - sig))
    return GradResult(value, d_dx, ())


def _gelu(x: np.ndarray, params: Sequence[Any]) -> GradResult:
    t = np.tanh(GELU_C * (x + GELU_CUBIC * x**3))
    value = 0.5 * x * (1 + t)
    d_dx = 0.5 * (1 + t) + 0.5 * x * (1 - t * t) * GELU_C * (1 + 3 * GELU_CUBIC * x * x)
    return GradResult(value, d_dx, ())


def _leaky_relu(x: np.ndarray, params: Sequence[Any]) -> GradResult:
    positive = x >= 0
    return GradResult(np.where(positive, x, LEAKY_SLOPE * x), np.where(positive, 1.0, LEAKY_SLOPE), ())


def _prelu(x: np.ndarray, params: Sequence[Any]) -> GradResult:
    (alpha,) = params
    positive = x >= 0
    return GradResult(
        np.where(positive, x, alpha * x),
        np.where(positive, 1.0, alpha),
        (np.where(positive, 0.0, x),),
    )


def _apl(x: np.ndarray, params: Sequence[Any]) -> GradResult:
    """max(0, x) + sum_s a_s max(0, -x + b_s); params are a_1..a_S then b_1..b_S."""
    slopes, offsets = params[:APL_HINGES], params[APL_HINGES:]
    value = np.maximum(x, 0.0)
    d_dx = (x > 0).astype(np.float64)
    d_slopes, d_offsets = [], []
    for a, b in zip(slopes, offsets):
        hinge = b - x
        active = (hinge > 0).astype(np.float64)
        value = value + a * np.maximum(hinge, 0.0)
        d_dx = d_dx - a * active
        d_slopes.append(np.maximum(hinge, 0.0))
        d_offsets.append(a * active)
    return GradResult(value, d_dx, (*d_slopes, *d_offsets))


def _pau(x: np.ndarray, params: Sequence[Any]) -> GradResult:
    """Safe Pade unit P(x) / (1 + |Q(x)|) of degree (5, 4)."""
    numerator_coefficients = params[: len(PAU_NUMERATOR)]
    denominator_coefficients = params[len(PAU_NUMERATOR) :]
    powers = [np.ones_like(x)]
    for _ in range(max(len(PAU_NUMERATOR), len(PAU_DENOMINATOR) + 1)):
        powers.append(powers[-1] * x)

    p = sum(a * powers[j] for j, a in enumerate(numerator_coefficients))
    dp = sum(j * a * powers[j - 1] for j, a in enumerate(numerator_coefficients) if j > 0)
    q = sum(b * powers[k + 1] for k, b in enumerate(denominator_coefficients))
    dq = sum((k + 1) * b * powers[k] for k, b in enumerate(denominator_coefficients))
    sign = np.sign(q)
    denominator = 1.0 + np.abs(q)

    value = p / denominator
    d_dx = (dp * denominator - p * sign * dq) / denominator**2
    d_numerator = [powers[j] / denominator for j in range(len(numerator_coefficients))]
    d_denominator = [-p * sign * powers[k + 1] / denominator**2 for k in range(len(denominator_coefficients))]
    return GradResult(value, d_dx, (*d_numerator, *d_denominator))


def _splash(x: np.ndarray, params: Sequence[Any]) -> GradResult:
    """sum_s a+_s max(0, x - b_s) + a-_s max(0, -x - b_s) with fixed hinges b."""
    positive, negative = params[: len(SPLASH_HINGES)], params[len(SPLASH_HINGES) :]
    value = np.zeros_like(x)
    d_dx = np.zeros_like(x)
    d_positive, d_negative = [], []
    for a_pos, a_neg, b in zip(positive, negative, SPLASH_HINGES):
        right = x - b
        left = -x - b
        value = value + a_pos * np.maximum(right, 0.0) + a_neg * np.maximum(left, 0.0)
        d_dx = d_dx + a_pos * (right > 0) - a_neg * (left > 0)
        d_positive.append(np.maximum(right, 0.0))
        d_negative.append(np.maximum(left, 0.0))
    return GradResult(value, d_dx, (*d_positive, *d_negative))


def _graph(text: str) -> Callable[[], ActivationFunction]:
    return lambda: GraphActivation(parse(text))


def _native(
    name: str, kernel, initial: Sequence[float] = (), granularity: Granularity | None = None
) -> Callable[[], ActivationFunction]:
    return lambda: NativeActivation(name, kernel, initial, granularity)


_SPLASH_INIT = (1.0,) + (0.0,) * (2 * len(SPLASH_HINGES) - 1)

FIXED: dict[str, Callable[[], ActivationFunction]] = {
    "relu": _graph("relu(x)"),
    "elish": _native("elish", _elish),
    "elu": _graph("elu(x)"),
    "gelu": _native("gelu", _gelu),
    "hard_sigmoid": _graph("hard_sigmoid(x)"),
    "leaky_relu": _native("leaky_relu", _leaky_relu),
    "mish": _graph("mul(x, tanh(softplus(x)))"),
    "selu": _graph("selu(x)"),
    "sigmoid": _graph("sigmoid(x)"),
    "softplus": _graph("softplus(x)"),
    "softsign": _graph("softsign(x)"),
    "swish": _graph("swish(x)"),
    "tanh": _graph("tanh(x)"),
}

PARAMETRIC: dict[str, Callable[[], ActivationFunction]] = {
    "prelu": _native("prelu", _prelu, [PRELU_INIT]),
    "pswish": _graph("mul(x, sigmoid(p0(x)))"),
}

LEARNABLE: dict[str, Callable[[], ActivationFunction]] = {
    "apl": _native("apl", _apl, [0.0] * APL_HINGES + list(APL_INIT_OFFSETS), Granularity.PER_NEURON),
    "pau": _native("pau", _pau, PAU_NUMERATOR + PAU_DENOMINATOR, Granularity.PER_LAYER),
    "splash": _native("splash", _splash, _SPLASH_INIT, Granularity.PER_LAYER),
}

BASELINES: dict[str, Callable[[], ActivationFunction]] = {**FIXED, **PARAMETRIC, **LEARNABLE}


def baseline_names() -> list[str]:
    return list(BASELINES)


def baseline(name: str) -> ActivationFunction:
    """Fresh instance of a named baseline.

    Raises:
        UnknownBaselineError: if `name` is not registered; lists the valid names.
    """
    factory = BASELINES.get(name)
    if factory is None:
        raise UnknownBaselineError(name, baseline_names())
    return factory()


def wrap_scaled(fn: ActivationFunction | ActivationGraph | str) -> ScaledActivation:
    """alpha * fn(beta * x) with alpha = beta = 1 initially; strings name a baseline."""
    inner = baseline(fn) if isinstance(fn, str) else as_activation(fn)
    return ScaledActivation(inner)
