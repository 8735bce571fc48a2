"""Shared helpers for the test suite."""

from __future__ import annotations

import numpy as np
import pytest

from evoact.graph import BINARY_NAMES, UNARY_NAMES, ActivationGraph

KINK_MARGIN = 0.05


def random_graph(rng: np.random.Generator, max_nodes: int = 8, max_params: int = 3) -> ActivationGraph:
    """Arbitrary tree with up to `max_nodes` operators and up to `max_params` sites."""
    table: dict[int, tuple[str, tuple[int | None, ...]]] = {}

    def grow(budget: int) -> int | None:
        if budget == 0:
            return None
        node_id = len(table)
        table[node_id] = ("identity", (None,))
        if rng.random() < 0.4:
            left_budget = int(rng.integers(0, budget))
            left = grow(left_budget)
            right = grow(budget - 1 - left_budget)
            table[node_id] = (str(rng.choice(BINARY_NAMES)), (left, right))
        else:
            child = grow(budget - 1)
            table[node_id] = (str(rng.choice(UNARY_NAMES)), (child,))
        return node_id

    grow(int(rng.integers(1, max_nodes + 1)))
    bare = ActivationGraph.build(table, 0)
    edges = bare.edges()
    k = int(rng.integers(0, min(max_params, len(edges)) + 1))
    chosen = rng.choice(len(edges), size=k, replace=False)
    return bare.with_params([(edges[int(i)], index) for index, i in enumerate(chosen)])


def near_kink(graph: ActivationGraph, params, x: float, margin: float = KINK_MARGIN) -> bool:
    """True when any node input sits close to a kink, a singularity, or blows up."""
    for node_id, inputs in graph.trace(params, x).items():
        values = [float(v) for v in inputs]
        if not all(np.isfinite(v) and abs(v) < 1e3 for v in values):
            return True
        op = graph.nodes[node_id].op
        if op in ("abs", "relu", "selu", "safe_reciprocal", "bessel_i0e", "bessel_i1e") and abs(values[0]) < margin:
            return True
        if op == "hard_sigmoid" and abs(abs(values[0]) - 2.5) < margin:
            return True
        if op == "safe_div" and abs(values[1]) < margin:
            return True
        if op == "pow" and values[0] < margin:
            return True
        if op in ("max", "min") and abs(values[0] - values[1]) < margin:
            return True
    return False


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)
