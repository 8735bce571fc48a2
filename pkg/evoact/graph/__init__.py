"""Activation graphs: operators, evaluation, and the text grammar."""

from evoact.graph.grammar import parse, skeleton_text, to_text
from evoact.graph.graph import (
    MAX_NODES,
    MAX_PARAMS,
    OUTPUT_EDGE,
    ActivationGraph,
    Edge,
    GradResult,
    Node,
    ParamSite,
    eval_grad,
    eval_graph,
    fresh_params,
    node_count,
    shape_signature,
    strip_params,
)
from evoact.graph.operators import (
    ALL_NAMES,
    BINARY_NAMES,
    OPERATORS,
    UNARY_NAMES,
    Operator,
    op_derivative,
    op_forward,
)

__all__ = [
    "ALL_NAMES",
    "ActivationGraph",
    "BINARY_NAMES",
    "Edge",
    "GradResult",
    "MAX_NODES",
    "MAX_PARAMS",
    "Node",
    "OPERATORS",
    "OUTPUT_EDGE",
    "Operator",
    "ParamSite",
    "UNARY_NAMES",
    "eval_grad",
    "eval_graph",
    "fresh_params",
    "node_count",
    "op_derivative",
    "op_forward",
    "parse",
    "shape_signature",
    "skeleton_text",
    "strip_params",
    "to_text",
]
