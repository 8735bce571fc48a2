"""Activation functions as rooted operator trees with parameter sites on edges."""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from typing import Any, NamedTuple

import numpy as np

from evoact.errors import GraphStructureError
from evoact.graph.operators import OPERATORS

MAX_NODES = 8
MAX_PARAMS = 3


class Edge(NamedTuple):
    """An edge, named by the node consuming it and the input slot it feeds."""

    consumer: int
    slot: int

    @property
    def is_output(self) -> bool:
        return self.slot == -1


OUTPUT_EDGE = Edge(-1, -1)


class Node(NamedTuple):
    """One operator node; a child of None reads the input x."""

    id: int
    op: str
    children: tuple[int | None, ...]


class ParamSite(NamedTuple):
    """Multiplicative parameter `index` sitting on `edge`."""

    edge: Edge
    index: int


class GradResult(NamedTuple):
    """Value plus derivatives with respect to x and each parameter."""

    value: Any
    d_dx: Any
    d_dparams: tuple


@dataclass(frozen=True)
class ActivationGraph:
    """Immutable activation graph in canonical form.

    Node ids are assigned in preorder, so the root is always node 0 and
    `nodes[i].id == i`. Parameter sites are edge decorations: a site on an edge
    multiplies the value flowing along it.
    """

    nodes: tuple[Node, ...]
    root: int = 0
    param_sites: tuple[ParamSite, ...] = ()
    _sites_by_edge: dict[Edge, int] = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_sites_by_edge", {site.edge: site.index for site in self.param_sites})

    # -- construction ---------------------------------------------------

    @classmethod
    def build(
        cls,
        nodes: Mapping[int, tuple[str, Sequence[int | None]]],
        root: int,
        param_sites: Sequence[tuple[Edge | tuple[int, int], int]] = (),
    ) -> ActivationGraph:
        """Validate an arbitrary node table and renumber it canonically.

        Args:
            nodes: node id -> (operator name, child ids); unreachable nodes are dropped
            root: id of the node producing the output
            param_sites: (edge, index) pairs using the ids of `nodes`

        Raises:
            GraphStructureError: unknown operator, arity mismatch, shared or
                missing children, cycles, or malformed parameter sites
        """
        if root not in nodes:
            raise GraphStructureError(f"root {root} is not a node")

        order: list[int] = []
        seen: set[int] = set()
        stack = [root]
        while stack:
            node_id = stack.pop()
            if node_id in seen:
                raise GraphStructureError(f"node {node_id} has more than one consumer")
            if node_id not in nodes:
                raise GraphStructureError(f"missing node {node_id}")
            seen.add(node_id)
            order.append(node_id)
            op_name, children = nodes[node_id]
            if op_name not in OPERATORS:
                raise GraphStructureError(f"unknown operator {op_name!r}")
            if len(children) != OPERATORS[op_name].arity:
                raise GraphStructureError(f"arity mismatch at node {node_id} ({op_name})")
            stack.extend(child for child in reversed(children) if child is not None)

        renumber = {old: new for new, old in enumerate(order)}
        canonical = tuple(
            Node(
                renumber[old],
                nodes[old][0],
                tuple(None if c is None else renumber[c] for c in nodes[old][1]),
            )
            for old in order
        )

        sites: list[ParamSite] = []
        for raw_edge, index in param_sites:
            edge = Edge(*raw_edge)
            if edge.is_output or edge.consumer == -1:
                new_edge = OUTPUT_EDGE
            else:
                if edge.consumer not in renumber:
                    raise GraphStructureError(f"parameter site on unknown node {edge.consumer}")
                arity = len(nodes[edge.consumer][1])
                if not 0 <= edge.slot < arity:
                    raise GraphStructureError(f"node {edge.consumer} has no input slot {edge.slot}")
                new_edge = Edge(renumber[edge.consumer], edge.slot)
            sites.append(ParamSite(new_edge, int(index)))

        edges_used = [site.edge for site in sites]
        if len(set(edges_used)) != len(edges_used):
            raise GraphStructureError("duplicate parameter site on one edge")
        if sorted(site.index for site in sites) != list(range(len(sites))):
            raise GraphStructureError("parameter indices must be exactly 0..k-1")

        graph = cls(nodes=canonical, root=0, param_sites=())
        edge_rank = {edge: rank for rank, edge in enumerate(graph.edges())}
        sites.sort(key=lambda site: edge_rank[site.edge])
        return cls(nodes=canonical, root=0, param_sites=tuple(sites))

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> ActivationGraph:
        """Inverse of `to_dict`."""
        try:
            nodes = {int(n["id"]): (str(n["op"]), tuple(n["children"])) for n in data["nodes"]}
            sites = []
            for p in data.get("params", []):
                consumer, slot = p["edge"]
                edge = OUTPUT_EDGE if slot == -1 else Edge(int(consumer), int(slot))
                sites.append((edge, int(p["index"])))
            return cls.build(nodes, int(data["root"]), sites)
        except (KeyError, TypeError, ValueError) as e:
            raise GraphStructureError(f"malformed graph document: {e}") from e

    # -- views ------------------------------------------------------------

    def to_dict(self) -> dict[str, Any]:
        return {
            "nodes": [{"id": n.id, "op": n.op, "children": list(n.children)} for n in self.nodes],
            "root": self.root,
            "params": [{"edge": [s.edge.consumer, s.edge.slot], "index": s.index} for s in self.param_sites],
        }

    @property
    def param_count(self) -> int:
        return len(self.param_sites)

    def node_count(self) -> int:
        return len(self.nodes)

    def shape_signature(self) -> tuple[int, int, int]:
        """(binary nodes, unary nodes, edges) where edges = u + 2b + 1."""
        binary = sum(1 for n in self.nodes if len(n.children) == 2)
        unary = len(self.nodes) - binary
        return binary, unary, unary + 2 * binary + 1

    def edges(self) -> list[Edge]:
        """All edges: input slots in preorder, then the output edge."""
        result = [Edge(n.id, slot) for n in self.nodes for slot in range(len(n.children))]
        result.append(OUTPUT_EDGE)
        return result

    def param_on(self, edge: Edge) -> int | None:
        return self._sites_by_edge.get(edge)

    def is_within_limits(self) -> bool:
        return self.node_count() <= MAX_NODES and self.param_count <= MAX_PARAMS

    def strip_params(self) -> ActivationGraph:
        if not self.param_sites:
            return self
        return ActivationGraph(nodes=self.nodes, root=self.root, param_sites=())

    def with_params(self, sites: Sequence[tuple[Edge, int]]) -> ActivationGraph:
        table = {n.id: (n.op, n.children) for n in self.nodes}
        return ActivationGraph.build(table, self.root, sites)

    def subtree(self, node_id: int) -> list[int]:
        """Ids of `node_id` and everything below it (preorder)."""
        ids = []
        stack = [node_id]
        while stack:
            current = stack.pop()
            ids.append(current)
            stack.extend(c for c in reversed(self.nodes[current].children) if c is not None)
        return ids

    def consumer_of(self, node_id: int) -> Edge:
        """Edge through which `node_id` feeds its consumer."""
        for n in self.nodes:
            for slot, child in enumerate(n.children):
                if child == node_id:
                    return Edge(n.id, slot)
        return OUTPUT_EDGE

    def table(self) -> dict[int, tuple[str, tuple[int | None, ...]]]:
        """Mutable-friendly node table accepted by `build`."""
        return {n.id: (n.op, n.children) for n in self.nodes}

    def __str__(self) -> str:
        from evoact.graph.grammar import to_text

        return to_text(self)

    # -- evaluation -------------------------------------------------------

    def _check_params(self, params: Sequence[Any] | None) -> Sequence[Any]:
        params = () if params is None else params
        if len(params) != self.param_count:
            raise ValueError(f"graph has {self.param_count} parameter(s), got {len(params)}")
        return params

    def eval(self, params: Sequence[Any] | None, x: Any) -> Any:
        """Evaluate at x (scalar or array); parameters multiply their edges."""
        params = self._check_params(params)
        xs = np.asarray(x, dtype=np.float64)
        scalar = xs.ndim == 0 and all(np.ndim(p) == 0 for p in params)

        def value(node_id: int) -> np.ndarray:
            node = self.nodes[node_id]
            inputs = []
            for slot, child in enumerate(node.children):
                v = xs if child is None else value(child)
                index = self._sites_by_edge.get(Edge(node_id, slot))
                if index is not None:
                    v = v * params[index]
                inputs.append(v)
            return OPERATORS[node.op].forward(*inputs)

        with np.errstate(all="ignore"):
            out = value(self.root)
            index = self._sites_by_edge.get(OUTPUT_EDGE)
            if index is not None:
                out = out * params[index]
        return float(out) if scalar else np.asarray(out, dtype=np.float64)

    def trace(self, params: Sequence[Any] | None, x: Any) -> dict[int, tuple[Any, ...]]:
        """Scaled inputs seen by every node, for locating kinks and singularities."""
        params = self._check_params(params)
        xs = np.asarray(x, dtype=np.float64)
        inputs: dict[int, tuple[Any, ...]] = {}
        outputs: dict[int, np.ndarray] = {}
        with np.errstate(all="ignore"):
            for node in reversed(self.nodes):
                values = []
                for slot, child in enumerate(node.children):
                    v = xs if child is None else outputs[child]
                    index = self._sites_by_edge.get(Edge(node.id, slot))
                    values.append(v if index is None else v * params[index])
                inputs[node.id] = tuple(values)
                outputs[node.id] = OPERATORS[node.op].forward(*values)
        return inputs

    def eval_grad(self, params: Sequence[Any] | None, x: Any) -> GradResult:
        """Value and elementwise derivatives by one reverse sweep over the tree."""
        params = self._check_params(params)
        xs = np.asarray(x, dtype=np.float64)
        scalar = xs.ndim == 0 and all(np.ndim(p) == 0 for p in params)

        raw: dict[int, list[np.ndarray]] = {}
        scaled: dict[int, list[np.ndarray]] = {}
        outputs: dict[int, np.ndarray] = {}

        with np.errstate(all="ignore"):
            # children before parents: reverse preorder
            for node in reversed(self.nodes):
                node_raw = [xs if c is None else outputs[c] for c in node.children]
                node_scaled = []
                for slot, v in enumerate(node_raw):
                    index = self._sites_by_edge.get(Edge(node.id, slot))
                    node_scaled.append(v if index is None else v * params[index])
                raw[node.id] = node_raw
                scaled[node.id] = node_scaled
                outputs[node.id] = OPERATORS[node.op].forward(*node_scaled)

            root_out = outputs[self.root]
            d_params: list[Any] = [0.0] * self.param_count
            adjoint: dict[int, Any] = {}
            index = self._sites_by_edge.get(OUTPUT_EDGE)
            if index is None:
                value = root_out
                adjoint[self.root] = np.ones_like(root_out)
            else:
                value = root_out * params[index]
                d_params[index] = root_out
                adjoint[self.root] = np.ones_like(root_out) * params[index]

            d_dx: Any = np.zeros_like(xs)
            for node in self.nodes:
                upstream = adjoint[node.id]
                partials = OPERATORS[node.op].derivative(*scaled[node.id])
                for slot, child in enumerate(node.children):
                    g = upstream * partials[slot]
                    index = self._sites_by_edge.get(Edge(node.id, slot))
                    if index is not None:
                        d_params[index] = g * raw[node.id][slot]
                        g = g * params[index]
                    if child is None:
                        d_dx = d_dx + g
                    else:
                        adjoint[child] = g

        if scalar:
            return GradResult(float(value), float(d_dx), tuple(float(d) for d in d_params))
        shape = np.broadcast_shapes(np.shape(value), xs.shape)
        return GradResult(
            np.broadcast_to(np.asarray(value, dtype=np.float64), shape),
            np.broadcast_to(np.asarray(d_dx, dtype=np.float64), shape),
            tuple(np.broadcast_to(np.asarray(d, dtype=np.float64), shape) for d in d_params),
        )


def node_count(graph: ActivationGraph) -> int:
    return graph.node_count()


def shape_signature(graph: ActivationGraph) -> tuple[int, int, int]:
    return graph.shape_signature()


def strip_params(graph: ActivationGraph) -> ActivationGraph:
    return graph.strip_params()


def eval_graph(graph: ActivationGraph, params: Sequence[Any] | None, x: Any) -> Any:
    return graph.eval(params, x)


def eval_grad(graph: ActivationGraph, params: Sequence[Any] | None, x: Any) -> GradResult:
    return graph.eval_grad(params, x)


def fresh_params(graph: ActivationGraph) -> list[float]:
    """Initial parameter values: all exactly one."""
    return [1.0] * graph.param_count
