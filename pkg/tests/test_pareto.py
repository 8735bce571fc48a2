"""Tests for Pareto filtering."""

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from evoact.evolve.history import Candidate
from evoact.evolve.pareto import non_dominated, pareto_general
from evoact.graph import parse
from evoact.trainer.records import FitnessRecord


def candidates(n: int) -> list[Candidate]:
    return [Candidate(seq=i, graph=parse("tanh(x)"), fitness=FitnessRecord(0.5)) for i in range(n)]


def brute_force(vectors):
    survivors = []
    for i, a in enumerate(vectors):
        dominated = any(
            all(b[d] >= a[d] for d in range(len(a))) and any(b[d] > a[d] for d in range(len(a)))
            for j, b in enumerate(vectors)
            if j != i
        )
        if not dominated:
            survivors.append(i)
    return survivors


class TestParetoGeneral:
    """Tests for pareto_general."""

    def test_strict_domination(self) -> None:
        result = pareto_general(candidates(2), [(0.7, 0.7), (0.6, 0.6)])
        assert [c.seq for c in result] == [0]

    def test_incomparable_both_survive(self) -> None:
        result = pareto_general(candidates(2), [(0.7, 0.5), (0.5, 0.7)])
        assert [c.seq for c in result] == [0, 1]

    def test_equal_vectors_both_survive(self) -> None:
        result = pareto_general(candidates(2), [(0.6, 0.6), (0.6, 0.6)])
        assert len(result) == 2

    def test_order_by_sequence(self) -> None:
        pool = candidates(3)
        result = pareto_general([pool[2], pool[0], pool[1]], [(0.9, 0.1), (0.1, 0.9), (0.5, 0.5)])
        assert [c.seq for c in result] == [0, 1, 2]

    def test_exclude_equivalent_functions(self) -> None:
        pool = [
            Candidate(seq=0, graph=parse("relu(x)"), fitness=FitnessRecord(0.9)),
            Candidate(seq=1, graph=parse("max(x, const0(x))"), fitness=FitnessRecord(0.9)),
            Candidate(seq=2, graph=parse("swish(x)"), fitness=FitnessRecord(0.5)),
        ]
        result = pareto_general(pool, [(0.9,), (0.95,), (0.5,)], exclude=[lambda x: np.maximum(x, 0.0)])
        assert [c.seq for c in result] == [2]

    @given(
        st.lists(
            st.tuples(st.integers(0, 5), st.integers(0, 5), st.integers(0, 5)),
            min_size=1,
            max_size=30,
        )
    )
    @settings(max_examples=100, deadline=None)
    def test_matches_brute_force(self, vectors) -> None:
        result = pareto_general(candidates(len(vectors)), vectors)
        assert [c.seq for c in result] == brute_force(vectors)

    def test_mask_shape(self) -> None:
        assert non_dominated(np.array([[1.0, 2.0], [2.0, 1.0], [0.0, 0.0]])).tolist() == [True, True, False]
