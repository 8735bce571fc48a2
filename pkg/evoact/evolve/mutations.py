"""Random initialization, the four mutations, and parameterization."""

from __future__ import annotations

import logging

import numpy as np

from evoact.errors import GraphStructureError
from evoact.graph.graph import MAX_NODES, MAX_PARAMS, ActivationGraph, Edge
from evoact.graph.operators import ALL_NAMES, BINARY_NAMES, BINARY_NEUTRAL, OPERATORS, UNARY_NAMES

logger = logging.getLogger(__name__)

INSERT = "insert"
REMOVE = "remove"
CHANGE = "change"
REGENERATE = "regenerate"
MUTATIONS = (INSERT, REMOVE, CHANGE, REGENERATE)
RANDOM = "random"

Table = dict[int, tuple[str, tuple[int | None, ...]]]


def _pick(rng: np.random.Generator, names: tuple[str, ...]) -> str:
    return names[int(rng.integers(len(names)))]


def _same_arity(op: str) -> tuple[str, ...]:
    return UNARY_NAMES if OPERATORS[op].arity == 1 else BINARY_NAMES


def init_random(rng: np.random.Generator) -> ActivationGraph:
    """unary1(unary2(x)) or binary(unary1(x), unary2(x)), each with probability 1/2."""
    if rng.integers(2) == 0:
        outer, inner = _pick(rng, UNARY_NAMES), _pick(rng, UNARY_NAMES)
        return ActivationGraph.build({0: (outer, (1,)), 1: (inner, (None,))}, 0)
    binary = _pick(rng, BINARY_NAMES)
    left, right = _pick(rng, UNARY_NAMES), _pick(rng, UNARY_NAMES)
    return ActivationGraph.build(
        {0: (binary, (1, 2)), 1: (left, (None,)), 2: (right, (None,))},
        0,
    )


def _incoming(graph: ActivationGraph, edge: Edge) -> int | None:
    if edge.is_output:
        return graph.root
    return graph.nodes[edge.consumer].children[edge.slot]


def _rewire(table: Table, root: int, edge: Edge, new_child: int | None) -> int:
    """Point `edge` at `new_child`; returns the (possibly new) root."""
    if edge.is_output:
        if new_child is None:
            raise GraphStructureError("a graph needs at least one operator node")
        return new_child
    op, children = table[edge.consumer]
    children = list(children)
    children[edge.slot] = new_child
    table[edge.consumer] = (op, tuple(children))
    return root


def _insert_growth(graph: ActivationGraph, op: str, edge: Edge) -> int:
    """Number of nodes an insertion adds."""
    if OPERATORS[op].arity == 1:
        return 1
    if BINARY_NEUTRAL[op] is not None:
        return 2
    incoming = _incoming(graph, edge)
    return 1 + (0 if incoming is None else len(graph.subtree(incoming)))


def _fits(graph: ActivationGraph, op: str, edge: Edge) -> bool:
    return graph.node_count() + _insert_growth(graph, op, edge) <= MAX_NODES


def mutate_insert(
    graph: ActivationGraph,
    rng: np.random.Generator,
    *,
    op: str | None = None,
    edge: Edge | None = None,
) -> ActivationGraph:
    """Insert one operator on a random edge without changing the function.

    Unary operators splice in-line. A binary operator takes the incoming value as
    its first input; the second is const0(x) for add/sub, const1(x) for
    mul/safe_div/pow, and a copy of the first input's subtree for max/min.
    Draws whose result would exceed the node limit are redrawn.
    """
    graph = graph.strip_params()
    if graph.node_count() >= MAX_NODES:
        raise GraphStructureError(f"insert needs a parent with fewer than {MAX_NODES} nodes")
    edges = graph.edges()
    if op is not None:
        feasible = [e for e in ([edge] if edge is not None else edges) if _fits(graph, op, e)]
        if not feasible:
            raise GraphStructureError(f"inserting {op} exceeds {MAX_NODES} nodes")
    while True:
        candidate_op = op if op is not None else _pick(rng, ALL_NAMES)
        candidate_edge = edge if edge is not None else edges[int(rng.integers(len(edges)))]
        if _fits(graph, candidate_op, candidate_edge):
            break
        logger.debug("Redrawing insertion of %s: node limit", candidate_op)

    table = graph.table()
    next_id = len(table)
    incoming = _incoming(graph, candidate_edge)
    new_id = next_id
    next_id += 1

    if OPERATORS[candidate_op].arity == 1:
        table[new_id] = (candidate_op, (incoming,))
    else:
        neutral = BINARY_NEUTRAL[candidate_op]
        if neutral is not None:
            second: int | None = next_id
            table[next_id] = (neutral, (None,))
        elif incoming is None:
            second = None
        else:
            copies = {old: next_id + i for i, old in enumerate(graph.subtree(incoming))}
            for old, new in copies.items():
                old_op, old_children = table[old]
                table[new] = (old_op, tuple(None if c is None else copies[c] for c in old_children))
            second = copies[incoming]
        table[new_id] = (candidate_op, (incoming, second))

    root = _rewire(table, graph.root, candidate_edge, new_id)
    return ActivationGraph.build(table, root)


def mutate_remove(
    graph: ActivationGraph,
    rng: np.random.Generator,
    *,
    node: int | None = None,
    keep: int | None = None,
) -> ActivationGraph:
    """Delete one node; a binary node keeps one input and drops the other subtree.

    When keeping an input would leave no operator nodes (the root reading x
    directly), the other input is kept.
    """
    graph = graph.strip_params()
    if graph.node_count() < 2:
        raise GraphStructureError("remove needs at least two nodes")
    target = node if node is not None else int(rng.integers(graph.node_count()))
    children = graph.nodes[target].children
    if len(children) == 1:
        survivor = children[0]
    else:
        slot = keep if keep is not None else int(rng.integers(2))
        if target == graph.root and children[slot] is None:
            slot = 1 - slot
        survivor = children[slot]

    table = graph.table()
    del table[target]
    root = _rewire(table, graph.root, graph.consumer_of(target), survivor)
    return ActivationGraph.build(table, root)


def mutate_change(
    graph: ActivationGraph,
    rng: np.random.Generator,
    *,
    node: int | None = None,
    op: str | None = None,
) -> ActivationGraph:
    """Replace one operator by a different one of the same arity."""
    graph = graph.strip_params()
    target = node if node is not None else int(rng.integers(graph.node_count()))
    current, children = graph.nodes[target].op, graph.nodes[target].children
    if op is None:
        choices = tuple(name for name in _same_arity(current) if name != current)
        op = _pick(rng, choices)
    elif OPERATORS[op].arity != OPERATORS[current].arity or op == current:
        raise GraphStructureError(f"cannot change {current} into {op}")
    table = graph.table()
    table[target] = (op, children)
    return ActivationGraph.build(table, graph.root)


def mutate_regenerate(graph: ActivationGraph, rng: np.random.Generator) -> ActivationGraph:
    """Resample every operator within its arity class."""
    graph = graph.strip_params()
    table = {n.id: (_pick(rng, _same_arity(n.op)), n.children) for n in graph.nodes}
    return ActivationGraph.build(table, graph.root)


def choose_mutation(graph: ActivationGraph, rng: np.random.Generator) -> str:
    """Uniform over the four mutations, with the remove/change overrides."""
    if graph.node_count() > MAX_NODES - 1:
        return REMOVE
    kind = MUTATIONS[int(rng.integers(len(MUTATIONS)))]
    if kind == REMOVE and graph.node_count() == 1:
        return CHANGE
    return kind


def apply_mutation(graph: ActivationGraph, kind: str, rng: np.random.Generator) -> ActivationGraph:
    if kind == INSERT:
        return mutate_insert(graph, rng)
    if kind == REMOVE:
        return mutate_remove(graph, rng)
    if kind == CHANGE:
        return mutate_change(graph, rng)
    if kind == REGENERATE:
        return mutate_regenerate(graph, rng)
    raise ValueError(f"Unknown mutation: {kind}")


def mutate_tagged(graph: ActivationGraph, rng: np.random.Generator) -> tuple[ActivationGraph, str]:
    """Mutate a bare copy of `graph`; returns the child and the mutation applied."""
    kind = choose_mutation(graph, rng)
    return apply_mutation(graph.strip_params(), kind, rng), kind


def mutate(graph: ActivationGraph, rng: np.random.Generator) -> ActivationGraph:
    return mutate_tagged(graph, rng)[0]


def parameterize(graph: ActivationGraph, rng: np.random.Generator) -> ActivationGraph:
    """Put k ~ U{0..3} multiplicative sites on distinct random edges.

    Graphs with fewer than k edges get one site per edge.
    """
    bare = graph.strip_params()
    edges = bare.edges()
    k = min(int(rng.integers(MAX_PARAMS + 1)), len(edges))
    if k == 0:
        return bare
    chosen = rng.choice(len(edges), size=k, replace=False)
    return bare.with_params([(edges[int(i)], index) for index, i in enumerate(chosen)])


def sample_random_functions(
    n: int,
    rng: np.random.Generator,
    with_params: bool = True,
) -> list[ActivationGraph]:
    """Random initialization followed by three mutations, then parameterization."""
    if n < 1:
        raise ValueError("n must be at least 1")
    graphs = []
    for _ in range(n):
        graph = init_random(rng)
        for _ in range(3):
            graph = mutate(graph, rng)
        graphs.append(parameterize(graph, rng) if with_params else graph)
    return graphs


def fresh_candidate(rng: np.random.Generator, with_params: bool = True) -> ActivationGraph:
    graph = init_random(rng)
    return parameterize(graph, rng) if with_params else graph
