"""Tests for the operator vocabulary."""

import math

import numpy as np
import pytest

from evoact.graph.operators import (
    BINARY_OPERATORS,
    OPERATORS,
    SELU_ALPHA,
    SELU_LAMBDA,
    UNARY_OPERATORS,
    op_derivative,
    op_forward,
)

FD_STEP = 1e-5


def central_difference(name, inputs, slot):
    up = list(inputs)
    down = list(inputs)
    up[slot] += FD_STEP
    down[slot] -= FD_STEP
    return (op_forward(name, *up) - op_forward(name, *down)) / (2 * FD_STEP)


def away_from_kinks(name, inputs):
    if name in ("abs", "relu", "selu", "safe_reciprocal", "bessel_i0e", "bessel_i1e"):
        return abs(inputs[0]) > 0.05
    if name == "hard_sigmoid":
        return abs(abs(inputs[0]) - 2.5) > 0.05
    if name == "safe_div":
        return abs(inputs[1]) > 0.05
    if name in ("max", "min"):
        return abs(inputs[0] - inputs[1]) > 0.05
    return True


class TestVocabulary:
    """Tests for the operator table itself."""

    def test_counts(self) -> None:
        assert len(UNARY_OPERATORS) == 27
        assert len(BINARY_OPERATORS) == 7
        assert len(OPERATORS) == 34
        assert all(op.arity == 1 for op in UNARY_OPERATORS)
        assert all(op.arity == 2 for op in BINARY_OPERATORS)

    def test_totality_on_non_finite_inputs(self) -> None:
        specials = [0.0, -0.0, 1e308, -1e308, math.inf, -math.inf, math.nan]
        for op in UNARY_OPERATORS:
            for value in specials:
                op_forward(op.name, value)
                op_derivative(op.name, value)
        for op in BINARY_OPERATORS:
            for a in specials:
                for b in specials:
                    op_forward(op.name, a, b)
                    op_derivative(op.name, a, b)

    def test_wrong_input_count_rejected(self) -> None:
        with pytest.raises(ValueError):
            op_forward("add", 1.0)
        with pytest.raises(ValueError):
            op_derivative("tanh", 1.0, 2.0)


class TestForward:
    """Tests for operator values."""

    def test_documented_values(self) -> None:
        assert op_forward("relu", -2.0) == 0.0
        assert op_forward("safe_div", 1.0, 0.0) == 0.0
        assert op_forward("safe_reciprocal", 0.0) == 0.0
        assert op_forward("selu", 1.0) == pytest.approx(1.05070098, abs=1e-12)
        assert op_forward("hard_sigmoid", 0.0) == 0.5
        assert op_forward("elu", -1.0) == pytest.approx(-0.6321205588285577)
        assert op_forward("swish", 1.0) == pytest.approx(0.7310585786300049)
        assert op_forward("selu", -1.0) == pytest.approx(SELU_LAMBDA * SELU_ALPHA * (math.exp(-1) - 1))

    def test_constants_ignore_input(self) -> None:
        assert op_forward("const0", 123.0) == 0.0
        assert op_forward("const1", -7.0) == 1.0

    def test_log_sigmoid_is_stable(self) -> None:
        assert op_forward("log_sigmoid", -800.0) == pytest.approx(-800.0)
        assert op_forward("log_sigmoid", 800.0) == 0.0

    def test_pow_may_be_non_finite(self) -> None:
        assert math.isnan(op_forward("pow", -2.0, 0.5))
        assert op_forward("pow", 2.0, 3.0) == 8.0

    def test_scalar_returns_float(self) -> None:
        assert isinstance(op_forward("tanh", 0.3), float)

    def test_array_matches_scalar(self, rng) -> None:
        xs = rng.uniform(-3, 3, size=20)
        for op in UNARY_OPERATORS:
            array = op_forward(op.name, xs)
            scalars = [op_forward(op.name, float(v)) for v in xs]
            np.testing.assert_allclose(array, scalars, rtol=1e-14, atol=1e-15)


class TestDerivative:
    """Tests for analytic partial derivatives."""

    def test_documented_choices(self) -> None:
        assert op_derivative("tanh", 0.0) == (1.0,)
        assert op_derivative("abs", 0.0) == (0.0,)
        assert op_derivative("relu", 0.0) == (0.0,)
        assert op_derivative("max", 1.0, 1.0) == (1.0, 0.0)
        assert op_derivative("min", 1.0, 1.0) == (1.0, 0.0)
        assert op_derivative("safe_div", 3.0, 0.0) == (0.0, 0.0)
        assert op_derivative("safe_reciprocal", 0.0) == (0.0,)
        assert op_derivative("hard_sigmoid", 2.5) == (0.0,)
        assert op_derivative("hard_sigmoid", 0.0) == (0.2,)
        assert op_derivative("elu", 0.0) == (1.0,)
        assert op_derivative("bessel_i1e", 0.0) == (0.5,)
        assert op_derivative("const1", 4.0) == (0.0,)

    def test_unary_against_central_difference(self, rng) -> None:
        for op in UNARY_OPERATORS:
            checked = 0
            for value in rng.uniform(-3, 3, size=80):
                inputs = [float(value)]
                if not away_from_kinks(op.name, inputs):
                    continue
                (analytic,) = op_derivative(op.name, *inputs)
                numeric = central_difference(op.name, inputs, 0)
                assert analytic == pytest.approx(numeric, rel=1e-6, abs=1e-8), (op.name, value)
                checked += 1
            assert checked >= 50, op.name

    def test_binary_against_central_difference(self, rng) -> None:
        for op in BINARY_OPERATORS:
            checked = 0
            while checked < 50:
                a = float(rng.uniform(0.2, 3.0) if op.name == "pow" else rng.uniform(-3, 3))
                b = float(rng.uniform(-2, 2))
                if not away_from_kinks(op.name, [a, b]):
                    continue
                partials = op_derivative(op.name, a, b)
                for slot in (0, 1):
                    numeric = central_difference(op.name, [a, b], slot)
                    assert partials[slot] == pytest.approx(numeric, rel=1e-6, abs=1e-8), (op.name, a, b, slot)
                checked += 1
