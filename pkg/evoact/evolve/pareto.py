"""Pareto filtering of candidates evaluated in several contexts."""

from __future__ import annotations

from collections.abc import Callable, Sequence

import numpy as np

from evoact.evolve.history import Candidate
from evoact.graph.graph import fresh_params

SAMPLE_GRID = np.linspace(-5.0, 5.0, 201)


def non_dominated(fitness: np.ndarray) -> np.ndarray:
    """Boolean mask of rows not dominated by any other row (maximization)."""
    fitness = np.asarray(fitness, dtype=np.float64)
    keep = np.ones(len(fitness), dtype=bool)
    for i, row in enumerate(fitness):
        at_least = np.all(fitness >= row, axis=1)
        better = np.any(fitness > row, axis=1)
        keep[i] = not np.any(at_least & better)
    return keep


def equivalent_on_grid(
    candidate: Candidate,
    reference: Callable[[np.ndarray], np.ndarray],
    grid: np.ndarray = SAMPLE_GRID,
) -> bool:
    """True when the candidate (parameters at 1) matches `reference` on the sample grid."""
    ours = candidate.graph.eval(fresh_params(candidate.graph), grid)
    theirs = np.asarray(reference(grid), dtype=np.float64)
    return bool(np.allclose(ours, theirs, rtol=1e-9, atol=1e-12, equal_nan=True))


def pareto_general(
    candidates: Sequence[Candidate],
    fitness_vectors: Sequence[Sequence[float]],
    exclude: Sequence[Callable[[np.ndarray], np.ndarray]] = (),
) -> list[Candidate]:
    """Candidates whose per-context fitness is not Pareto-dominated.

    Args:
        candidates: evaluated candidates
        fitness_vectors: one fitness per evaluation context, aligned with `candidates`
        exclude: reference functions; candidates equivalent to any of them are
            dropped before the dominance test

    Returns:
        Survivors ordered by sequence number
    """
    if len(candidates) != len(fitness_vectors):
        raise ValueError("need one fitness vector per candidate")
    pairs = [
        (candidate, vector)
        for candidate, vector in zip(candidates, fitness_vectors)
        if not any(equivalent_on_grid(candidate, ref) for ref in exclude)
    ]
    if not pairs:
        return []
    mask = non_dominated(np.array([vector for _, vector in pairs], dtype=np.float64))
    survivors = [candidate for (candidate, _), keep in zip(pairs, mask) if keep]
    return sorted(survivors, key=lambda c: c.seq)
