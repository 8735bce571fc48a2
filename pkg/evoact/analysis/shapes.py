"""Enumeration of computation-graph skeletons by operator counts."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cache
from math import comb

from evoact.graph.grammar import parse, skeleton_text

# A full binary tree: None is a leaf (an input slot fed by x), a pair is a binary node.
Tree = tuple["Tree", "Tree"] | None

# Placeholders used to build skeleton graphs before rendering them as u(...)/b(..., ...).
_UNARY = "identity"
_BINARY = "add"


@cache
def _trees(binary: int) -> tuple[Tree, ...]:
    if binary == 0:
        return (None,)
    result: list[Tree] = []
    for left in range(binary):
        for left_tree in _trees(left):
            for right_tree in _trees(binary - 1 - left):
                result.append((left_tree, right_tree))
    return tuple(result)


def _wrap(chain: int, inner: str) -> str:
    return f"{_UNARY}(" * chain + inner + ")" * chain


def _place(tree: Tree, unary: int) -> list[str]:
    """Every way to spend exactly `unary` unary nodes on `tree` and the chain above it.

    Chains above a leaf need at least one unary node; chains above a binary node
    may be empty.
    """
    least = 1 if tree is None else 0
    texts: list[str] = []
    for chain in range(least, unary + 1):
        rest = unary - chain
        if tree is None:
            if rest == 0:
                texts.append(_wrap(chain, "x"))
            continue
        left, right = tree
        for left_unary in range(rest + 1):
            for left_text in _place(left, left_unary):
                for right_text in _place(right, rest - left_unary):
                    texts.append(_wrap(chain, f"{_BINARY}({left_text}, {right_text})"))
    return texts


def arrangement_formula(binary: int, unary: int) -> int:
    """Closed form of the enumeration: Catalan(b) * C(u - b - 1 + 2b, 2b)."""
    if binary < 0 or unary < binary + 1:
        return 0
    catalan = comb(2 * binary, binary) // (binary + 1)
    return catalan * comb(unary - binary - 1 + 2 * binary, 2 * binary)


@dataclass
class ShapeReport:
    """Skeletons for one (binary, unary) pair and how they compare with a reference count."""

    binary: int
    unary: int
    skeletons: list[str]
    reference: int | None = None

    @property
    def edges(self) -> int:
        return self.unary + 2 * self.binary + 1

    @property
    def count(self) -> int:
        return len(self.skeletons)

    @property
    def agrees(self) -> bool | None:
        return None if self.reference is None else self.reference == self.count

    def describe(self) -> str:
        if self.reference is None:
            return f"(b={self.binary}, u={self.unary}): {self.count} shapes"
        verdict = "matches" if self.agrees else "DIFFERS from"
        return f"(b={self.binary}, u={self.unary}): {self.count} shapes, {verdict} reference {self.reference}"


def enumerate_shapes(binary: int, unary: int, reference: int | None = None) -> ShapeReport:
    """All rooted skeletons with `binary` binary and `unary` unary nodes.

    Every binary input is headed by a chain of at least one unary node ending at x,
    or by another binary node with an optional unary chain between them; a chain
    may also sit above the root. Mirror images count as distinct.

    Args:
        binary: number of binary nodes (b >= 0)
        unary: number of unary nodes (u >= 1)
        reference: expected arrangement count to compare against, if any

    Returns:
        ShapeReport with sorted skeletons in u(...)/b(..., ...) form.
    """
    if binary < 0 or unary < 1:
        raise ValueError("require b >= 0 and u >= 1")
    texts = [text for tree in _trees(binary) for text in _place(tree, unary)]
    skeletons = sorted(skeleton_text(parse(text, bounded=False)) for text in texts)
    return ShapeReport(binary, unary, skeletons, reference)
