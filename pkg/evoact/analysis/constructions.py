"""Indicator and piecewise-analytic functions built from the operator vocabulary.

These graphs exceed the evolvable node limit on purpose; constants are fixed
parameter values on edges leaving `const1` nodes.
"""

from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from typing import Any, Literal, NamedTuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from evoact.graph.graph import ActivationGraph, Edge

IndicatorKind = Literal["left", "right", "open_interval", "point"]


@dataclass(frozen=True)
class Construction:
    """An unbounded graph plus the fixed values of its parameters."""

    graph: ActivationGraph
    params: tuple[float, ...]

    def eval(self, x: Any) -> Any:
        return self.graph.eval(self.params, x)

    def __call__(self, x: Any) -> Any:
        return self.eval(x)


class _Term(NamedTuple):
    """A value feeding some future node: a child id (None for x) and an optional edge scale."""

    child: int | None
    scale: float | None = None


@dataclass
class _Builder:
    nodes: dict[int, tuple[str, tuple[int | None, ...]]] = field(default_factory=dict)
    sites: list[tuple[Edge, int]] = field(default_factory=list)
    values: list[float] = field(default_factory=list)

    x = _Term(None)

    def node(self, op: str, *inputs: _Term) -> _Term:
        node_id = len(self.nodes)
        self.nodes[node_id] = (op, tuple(term.child for term in inputs))
        for slot, term in enumerate(inputs):
            if term.scale is not None:
                self.sites.append((Edge(node_id, slot), len(self.values)))
                self.values.append(term.scale)
        return _Term(node_id)

    def const(self, value: float) -> _Term:
        if value == 0.0:
            return self.node("const0", self.x)
        one = self.node("const1", self.x)
        return one if value == 1.0 else _Term(one.child, float(value))

    def finish(self, root: _Term) -> Construction:
        if root.child is None:
            root = self.node("identity", root)
        sites = list(self.sites)
        values = list(self.values)
        if root.scale is not None:
            sites.append((Edge(-1, -1), len(values)))
            values.append(root.scale)
        graph = ActivationGraph.build(self.nodes, root.child, sites)
        return Construction(graph, tuple(values))

    # -- indicators -------------------------------------------------------

    def below(self, b: float) -> _Term:
        """1 for x < b: max(b - x, 0) / (b - x) with division by zero giving 0."""
        numerator = self.node("max", self.node("sub", self.const(b), self.x), self.node("const0", self.x))
        return self.node("safe_div", numerator, self.node("sub", self.const(b), self.x))

    def above(self, a: float) -> _Term:
        """1 for x > a: min(a - x, 0) / (a - x)."""
        numerator = self.node("min", self.node("sub", self.const(a), self.x), self.node("const0", self.x))
        return self.node("safe_div", numerator, self.node("sub", self.const(a), self.x))

    def between(self, a: float, b: float) -> _Term:
        return self.node("mul", self.below(b), self.above(a))

    def at(self, a: float) -> _Term:
        """1 at x == a: (1 - below(a)) * (1 - above(a))."""
        not_below = self.node("sub", self.const(1.0), self.below(a))
        not_above = self.node("sub", self.const(1.0), self.above(a))
        return self.node("mul", not_below, not_above)

    # -- power series -----------------------------------------------------

    def series(
        self,
        center: float,
        coefficients: Sequence[float],
        gate: Callable[[], _Term] | None = None,
    ) -> _Term:
        """Horner form of sum a_n (x - center)^n.

        With `gate`, each (x - center) factor is multiplied by a fresh gate subtree,
        so the series sees x where the gate is 1 and its center elsewhere.
        """
        *lower, highest = coefficients
        acc = self.const(highest)
        for coefficient in reversed(lower):
            shifted = self.node("sub", self.x, self.const(center))
            if gate is not None:
                shifted = self.node("mul", gate(), shifted)
            acc = self.node("add", self.const(coefficient), self.node("mul", shifted, acc))
        return acc


def build_indicator(kind: IndicatorKind, a: float | None = None, b: float | None = None) -> Construction:
    """Indicator function graph.

    Args:
        kind: "left" is 1 on (-inf, b); "right" is 1 on (a, inf);
            "open_interval" is 1 on (a, b); "point" is 1 exactly at a.
        a: lower bound or the point.
        b: upper bound.

    Raises:
        ValueError: missing bound, or a >= b for an open interval.
    """
    builder = _Builder()
    if kind == "left":
        if b is None:
            raise ValueError("left indicator needs b")
        root = builder.below(b)
    elif kind == "right":
        if a is None:
            raise ValueError("right indicator needs a")
        root = builder.above(a)
    elif kind == "open_interval":
        if a is None or b is None:
            raise ValueError("open interval needs a and b")
        if not a < b:
            raise ValueError(f"open interval needs a < b, got a={a}, b={b}")
        root = builder.between(a, b)
    elif kind == "point":
        if a is None:
            raise ValueError("point indicator needs a")
        root = builder.at(a)
    else:
        raise ValueError(f"unknown indicator kind {kind!r}")
    return builder.finish(root)


class SeriesPiece(BaseModel):
    """Truncated power series sum a_n (x - center)^n."""

    model_config = ConfigDict(extra="forbid")

    center: float = 0.0
    coefficients: list[float] = Field(min_length=1)

    def evaluate(self, x: Any) -> Any:
        # coefficients run lowest order first
        return np.polynomial.polynomial.polyval(np.asarray(x, dtype=np.float64) - self.center, self.coefficients)


class PiecewiseSpec(BaseModel):
    """f_0 on (-inf, k_1), K_i at k_i, f_i on (k_i, k_{i+1}), f_n on (k_n, inf)."""

    model_config = ConfigDict(extra="forbid")

    breakpoints: list[float] = Field(default_factory=list)
    values: list[float] = Field(default_factory=list)
    pieces: list[SeriesPiece] = Field(min_length=1)

    @model_validator(mode="after")
    def _check_layout(self) -> PiecewiseSpec:
        if any(b >= c for b, c in zip(self.breakpoints, self.breakpoints[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        if len(self.values) != len(self.breakpoints):
            raise ValueError("need one point value per breakpoint")
        if len(self.pieces) != len(self.breakpoints) + 1:
            raise ValueError("need one more piece than breakpoints")
        return self

    def evaluate(self, x: Any) -> np.ndarray:
        """Direct piecewise evaluation."""
        xs = np.asarray(x, dtype=np.float64)
        index = np.searchsorted(self.breakpoints, xs, side="left")
        result = np.empty_like(xs)
        for i, piece in enumerate(self.pieces):
            mask = index == i
            result[mask] = piece.evaluate(xs[mask])
        for breakpoint, value in zip(self.breakpoints, self.values):
            result[xs == breakpoint] = value
        return result


def compile_piecewise(spec: PiecewiseSpec) -> Construction:
    """Indicator-gated sum of the pieces and point values as one graph."""
    builder = _Builder()
    pieces = spec.pieces
    points = spec.breakpoints
    if not points:
        return builder.finish(builder.series(pieces[0].center, pieces[0].coefficients))

    def gated(gate: Callable[[], _Term], piece: SeriesPiece) -> _Term:
        # outside the gate the series is evaluated at its center
        return builder.node("mul", gate(), builder.series(piece.center, piece.coefficients, gate))

    terms = [gated(lambda: builder.below(points[0]), pieces[0])]
    for i, (point, value) in enumerate(zip(points, spec.values)):
        terms.append(builder.node("mul", builder.at(point), builder.const(value)))
        if i + 1 < len(points):
            terms.append(gated(lambda a=point, b=points[i + 1]: builder.between(a, b), pieces[i + 1]))
    terms.append(gated(lambda: builder.above(points[-1]), pieces[-1]))

    total = terms[0]
    for term in terms[1:]:
        total = builder.node("add", total, term)
    return builder.finish(total)
