"""Exact size of the evolvable activation-function space."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from math import comb
from pathlib import Path

import yaml

from evoact.analysis.shapes import arrangement_formula
from evoact.errors import ConfigError
from evoact.graph.graph import MAX_PARAMS
from evoact.graph.operators import BINARY_NAMES, UNARY_NAMES

logger = logging.getLogger(__name__)

# Reference arrangement counts per (binary, unary) pair for graphs of 1 to 7 nodes.
REFERENCE_ARRANGEMENTS: dict[tuple[int, int], int] = {
    (0, 1): 1,
    (0, 2): 1,
    (0, 3): 1,
    (1, 2): 1,
    (0, 4): 1,
    (1, 3): 3,
    (0, 5): 1,
    (1, 4): 6,
    (2, 3): 2,
    (0, 6): 1,
    (1, 5): 10,
    (2, 4): 10,
    (0, 7): 1,
    (1, 6): 15,
    (2, 5): 30,
    (3, 4): 1,
}


@dataclass
class CensusRow:
    """Function count for one (binary, unary) arrangement class."""

    nodes: int
    binary: int
    unary: int
    edges: int
    arrangements: int
    functions: int
    source: str = "table"


@dataclass
class SpaceCensus:
    """Rows, per-node-count subtotals and the grand total, all exact integers."""

    rows: list[CensusRow] = field(default_factory=list)

    @property
    def subtotals(self) -> dict[int, int]:
        totals: dict[int, int] = {}
        for row in self.rows:
            totals[row.nodes] = totals.get(row.nodes, 0) + row.functions
        return totals

    @property
    def total(self) -> int:
        return sum(row.functions for row in self.rows)

    def to_dict(self) -> dict:
        return {
            "rows": [vars(row).copy() for row in self.rows],
            "subtotals": {str(nodes): count for nodes, count in self.subtotals.items()},
            "total": self.total,
        }


def placement_count(edges: int, max_params: int, capped: bool = True) -> int:
    """Ways to put parameters on a subset of edges: sum of C(e, i) for i up to the cap.

    With `capped=False` the sum runs to e (every subset), which overcounts once
    graphs have more than `max_params` edges.
    """
    upper = min(edges, max_params) if capped else edges
    return sum(comb(edges, i) for i in range(upper + 1))


def count_space(
    max_nodes: int = 7,
    unary_ops: int = len(UNARY_NAMES),
    binary_ops: int = len(BINARY_NAMES),
    max_params: int = MAX_PARAMS,
    arrangements: dict[tuple[int, int], int] | None = None,
    capped: bool = True,
) -> SpaceCensus:
    """Count functions representable with 1..max_nodes operator nodes.

    Each row contributes arrangements * U^u * B^b * placement_count(e). Pairs
    missing from the arrangement table fall back to the skeleton enumeration.
    """
    table = REFERENCE_ARRANGEMENTS if arrangements is None else arrangements
    census = SpaceCensus()
    for nodes in range(1, max_nodes + 1):
        for binary in range(nodes):
            unary = nodes - binary
            if unary < binary + 1:
                break
            if (binary, unary) in table:
                count, source = table[(binary, unary)], "table"
            else:
                count, source = arrangement_formula(binary, unary), "enumerated"
                logger.debug("No arrangement entry for (b=%d, u=%d); using %d", binary, unary, count)
            edges = unary + 2 * binary + 1
            functions = count * unary_ops**unary * binary_ops**binary * placement_count(edges, max_params, capped)
            census.rows.append(CensusRow(nodes, binary, unary, edges, count, functions, source))
    return census


def load_arrangements(path: Path) -> dict[tuple[int, int], int]:
    """Read arrangement overrides from YAML or JSON keyed "b,u" and merge them over the reference table."""
    try:
        data = yaml.safe_load(Path(path).read_text())
    except FileNotFoundError as e:
        raise ConfigError("arrangements file not found", path=path) from e
    except yaml.YAMLError as e:
        raise ConfigError(f"invalid arrangements file: {e}", path=path) from e
    if not isinstance(data, dict):
        raise ConfigError("arrangements file must map \"b,u\" keys to counts", path=path)

    table = dict(REFERENCE_ARRANGEMENTS)
    for key, value in data.items():
        try:
            binary, unary = (int(part) for part in str(key).split(","))
        except ValueError as e:
            raise ConfigError(f"bad arrangement key {key!r}; expected \"b,u\"", path=path) from e
        if not isinstance(value, int) or isinstance(value, bool) or value < 0:
            raise ConfigError(f"arrangement count for {key!r} must be a non-negative integer", path=path)
        table[(binary, unary)] = value
    return table
