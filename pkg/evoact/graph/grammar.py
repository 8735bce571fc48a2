"""Canonical text form of activation graphs.

    expr    := op_name "(" expr {"," expr} ")" | "x" | "p" digits "(" expr ")"

A `pN(...)` wrapper puts parameter N on the edge its argument flows along.
Printing emits no whitespace except a single space after each comma.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from evoact.errors import GraphSyntaxError, GraphStructureError
from evoact.graph.graph import MAX_NODES, MAX_PARAMS, OUTPUT_EDGE, ActivationGraph, Edge
from evoact.graph.operators import OPERATORS

_TOKEN = re.compile(r"\s*(?:(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<punct>[(),])|(?P<bad>\S))")
_PARAM = re.compile(r"p(\d+)\Z")


@dataclass
class _Token:
    kind: str
    text: str
    offset: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    position = 0
    while position < len(text):
        match = _TOKEN.match(text, position)
        if match is None:
            # only trailing whitespace is left
            break
        if match.group("bad") is not None:
            raise GraphSyntaxError(f"unexpected character {match.group('bad')!r}", match.start("bad"), text)
        kind = "name" if match.group("name") is not None else match.group("punct")
        start = match.start("name") if kind == "name" else match.start("punct")
        tokens.append(_Token(kind, match.group(kind if kind == "name" else "punct"), start))
        position = match.end()
    tokens.append(_Token("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, bounded: bool):
        self.text = text
        self.bounded = bounded
        self.tokens = _tokenize(text)
        self.position = 0
        self.nodes: dict[int, tuple[str, tuple[int | None, ...]]] = {}
        self.sites: list[tuple[Edge, int, int]] = []

    def peek(self) -> _Token:
        return self.tokens[self.position]

    def advance(self) -> _Token:
        token = self.tokens[self.position]
        self.position += 1
        return token

    def expect(self, kind: str) -> _Token:
        token = self.peek()
        if token.kind != kind:
            found = "end of input" if token.kind == "end" else repr(token.text)
            raise GraphSyntaxError(f"expected {kind!r}, found {found}", token.offset, self.text)
        return self.advance()

    def parse(self) -> ActivationGraph:
        root, root_param = self.expr()
        end = self.peek()
        if end.kind != "end":
            raise GraphSyntaxError("trailing input", end.offset, self.text)
        if root is None:
            raise GraphSyntaxError("expression has no operator nodes", 0, self.text)
        if root_param is not None:
            index, offset = root_param
            self.sites.append((OUTPUT_EDGE, index, offset))
        self.check_params()
        if self.bounded and len(self.nodes) > MAX_NODES:
            raise GraphSyntaxError(f"more than {MAX_NODES} operator nodes", 0, self.text)
        try:
            return ActivationGraph.build(self.nodes, root, [(edge, index) for edge, index, _ in self.sites])
        except GraphStructureError as e:
            raise GraphSyntaxError(str(e), 0, self.text) from e

    def check_params(self) -> None:
        by_index: dict[int, int] = {}
        for _, index, offset in self.sites:
            if self.bounded and index >= MAX_PARAMS:
                raise GraphSyntaxError(f"more than {MAX_PARAMS} parameters", offset, self.text)
            if index in by_index:
                raise GraphSyntaxError(f"parameter p{index} used twice", offset, self.text)
            by_index[index] = offset
        expected = set(range(len(by_index)))
        if set(by_index) != expected:
            missing = min(expected - set(by_index))
            offset = max(by_index.values())
            raise GraphSyntaxError(f"parameter indices have a gap (p{missing} missing)", offset, self.text)

    def expr(self) -> tuple[int | None, tuple[int, int] | None]:
        """Parse one expression; returns (node id or None for x, pending param)."""
        token = self.peek()
        if token.kind != "name":
            found = "end of input" if token.kind == "end" else repr(token.text)
            raise GraphSyntaxError(f"expected an expression, found {found}", token.offset, self.text)
        self.advance()

        if token.text == "x":
            return None, None

        param = _PARAM.match(token.text)
        if param is not None:
            self.expect("(")
            inner, inner_param = self.expr()
            self.expect(")")
            if inner_param is not None:
                raise GraphSyntaxError("duplicate parameter site on one edge", token.offset, self.text)
            return inner, (int(param.group(1)), token.offset)

        op = OPERATORS.get(token.text)
        if op is None:
            raise GraphSyntaxError("unknown operator", token.offset, self.text)

        node_id = len(self.nodes)
        self.nodes[node_id] = (op.name, ())
        self.expect("(")
        children: list[int | None] = []
        while True:
            child, child_param = self.expr()
            if child_param is not None:
                index, offset = child_param
                self.sites.append((Edge(node_id, len(children)), index, offset))
            children.append(child)
            if self.peek().kind == ",":
                self.advance()
                continue
            break
        self.expect(")")
        if len(children) != op.arity:
            raise GraphSyntaxError("arity mismatch", token.offset, self.text)
        self.nodes[node_id] = (op.name, tuple(children))
        return node_id, None


def parse(text: str, bounded: bool = True) -> ActivationGraph:
    """Parse the canonical grammar.

    Args:
        text: expression such as "mul(log_sigmoid(p0(x)), p1(arcsinh(x)))"
        bounded: enforce the node and parameter limits of evolvable graphs

    Raises:
        GraphSyntaxError: with the character offset of the offending token
    """
    return _Parser(text, bounded).parse()


def to_text(graph: ActivationGraph) -> str:
    """Canonical printing; `parse(to_text(g)) == g` for canonical graphs."""

    def wrap(edge: Edge, inner: str) -> str:
        index = graph.param_on(edge)
        return inner if index is None else f"p{index}({inner})"

    def render(node_id: int) -> str:
        node = graph.nodes[node_id]
        args = []
        for slot, child in enumerate(node.children):
            inner = "x" if child is None else render(child)
            args.append(wrap(Edge(node_id, slot), inner))
        return f"{node.op}({', '.join(args)})"

    return wrap(OUTPUT_EDGE, render(graph.root))


def skeleton_text(graph: ActivationGraph) -> str:
    """Operator placeholders only: u(...) for unary, b(..., ...) for binary nodes."""

    def render(node_id: int) -> str:
        node = graph.nodes[node_id]
        args = ["x" if c is None else render(c) for c in node.children]
        return f"{'u' if len(args) == 1 else 'b'}({', '.join(args)})"

    return render(graph.root)
