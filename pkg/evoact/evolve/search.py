"""Regularized evolution with a quality gate, plus reranking."""

from __future__ import annotations

import logging
import time
from collections import deque
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np

from evoact.config import EvolutionConfig, SearchMode
from evoact.evolve.history import Candidate, SearchHistory
from evoact.evolve.mutations import RANDOM, fresh_candidate, mutate_tagged, parameterize
from evoact.graph.graph import ActivationGraph
from evoact.trainer.records import FitnessRecord

logger = logging.getLogger(__name__)

FitnessFn = Callable[[ActivationGraph], "FitnessRecord | float"]
FullFitnessFn = Callable[[ActivationGraph, int], "FitnessRecord | float"]


@dataclass
class Proposal:
    """A candidate issued for evaluation but not yet scored."""

    graph: ActivationGraph
    parent_seq: int | None = None
    mutation: str = RANDOM
    window_end: int = 0
    sampled: tuple[int, ...] = ()


class RegularizedEvolution:
    """Selection and bookkeeping state, shared by the sequential loop and the coordinator.

    Sequential mode keeps the P most recently accepted candidates as the
    population. Asynchronous mode samples parents from the P most recently
    completed evaluations, skipping those below the threshold.
    """

    def __init__(self, config: EvolutionConfig):
        self.config = config
        self.rng = np.random.default_rng(config.seed)
        self.history = SearchHistory(population_size=config.population_size)
        self.population: deque[Candidate] = deque(maxlen=config.population_size)

    @property
    def finished(self) -> bool:
        return len(self.history) >= self.config.budget

    def _pool(self) -> list[Candidate] | None:
        """Parents eligible for the tournament, or None while warming up."""
        size = self.config.population_size
        if self.config.mode == SearchMode.SEQUENTIAL:
            return list(self.population) if len(self.population) >= size else None
        if len(self.history) < size:
            return None
        return [c for c in self.history.candidates[-size:] if c.accepted] or None

    def propose(self) -> Proposal:
        """Issue the next candidate: random during warmup, else a mutated tournament winner."""
        window_end = len(self.history)
        pool = self._pool()
        if pool is None:
            graph = fresh_candidate(self.rng, self.config.parameterize)
            return Proposal(graph=graph, window_end=window_end)

        picks = self.rng.integers(len(pool), size=self.config.sample_size)
        sampled = [pool[int(i)] for i in picks]
        parent = max(sampled, key=lambda c: (c.score, c.seq))
        child, kind = mutate_tagged(parent.graph, self.rng)
        if self.config.parameterize:
            child = parameterize(child, self.rng)
        return Proposal(
            graph=child,
            parent_seq=parent.seq,
            mutation=kind,
            window_end=window_end,
            sampled=tuple(c.seq for c in sampled),
        )

    def record(self, proposal: Proposal, fitness: FitnessRecord) -> Candidate:
        """Append an evaluated proposal; accepted ones join the population."""
        candidate = Candidate(
            seq=len(self.history),
            graph=proposal.graph,
            fitness=fitness,
            parent_seq=proposal.parent_seq,
            mutation=proposal.mutation,
            accepted=fitness.ok and fitness.fitness >= self.config.threshold,
            window_end=proposal.window_end,
            sampled=proposal.sampled,
        )
        self.history.append(candidate)
        if candidate.accepted:
            self.population.append(candidate)
        logger.debug(
            "seq=%d fitness=%.4f status=%s accepted=%s expr=%s",
            candidate.seq,
            candidate.score,
            fitness.status.value,
            candidate.accepted,
            candidate.expr,
        )
        return candidate


def safe_fitness(fitness_fn: Callable[..., FitnessRecord | float], *args) -> FitnessRecord:
    """Call a fitness function; failures become unstable records."""
    start = time.perf_counter()
    try:
        return FitnessRecord.coerce(fitness_fn(*args))
    except Exception as e:
        logger.warning("Fitness evaluation failed (%s: %s); recording as unstable", type(e).__name__, e)
        return FitnessRecord.unstable(runtime_seconds=time.perf_counter() - start)


def evolve(
    config: EvolutionConfig,
    fitness_fn: FitnessFn,
    on_candidate: Callable[[Candidate], None] | None = None,
) -> SearchHistory:
    """Run the search in-process until the budget is spent.

    Args:
        config: evolution settings (P, S, C, V, seed, ...)
        fitness_fn: maps a parameterized graph to a FitnessRecord or a bare fitness
        on_candidate: called after each evaluation (progress display)
    """
    strategy = RegularizedEvolution(config)
    logger.info(
        "Evolving: P=%d S=%d C=%d V=%.2f mode=%s",
        config.population_size,
        config.sample_size,
        config.budget,
        config.threshold,
        config.mode.value,
    )
    while not strategy.finished:
        proposal = strategy.propose()
        candidate = strategy.record(proposal, safe_fitness(fitness_fn, proposal.graph))
        if on_candidate is not None:
            on_candidate(candidate)
    return strategy.history


@dataclass
class RankedCandidate:
    """A candidate rescored by full training runs."""

    candidate: Candidate
    adjusted_fitness: float
    run_fitness: list[float] = field(default_factory=list)

    @property
    def expr(self) -> str:
        return self.candidate.expr


def derive_seed(seed: int, seq: int, run: int) -> int:
    return int(np.random.SeedSequence([seed, seq, run]).generate_state(1)[0])


def top_candidates(history: SearchHistory, top_n: int) -> list[Candidate]:
    """Best distinct expressions by search fitness; earlier discovery wins ties."""
    ranked = sorted(history, key=lambda c: (-c.score, c.seq))
    seen: set[str] = set()
    result = []
    for candidate in ranked:
        if candidate.expr in seen:
            continue
        seen.add(candidate.expr)
        result.append(candidate)
        if len(result) == top_n:
            break
    return result


def rerank(
    history: SearchHistory,
    full_fitness_fn: FullFitnessFn,
    top_n: int = 10,
    runs: int = 2,
    keep: int = 3,
    seed: int = 0,
) -> list[RankedCandidate]:
    """Rescore the top functions with independent full-length runs and keep the best.

    Adjusted fitness is the mean over `runs` evaluations with distinct derived
    seeds; unstable runs count as 0.
    """
    if not len(history):
        raise ValueError("cannot rerank an empty history")
    ranked = []
    for candidate in top_candidates(history, top_n):
        scores = []
        for run in range(runs):
            record = safe_fitness(full_fitness_fn, candidate.graph, derive_seed(seed, candidate.seq, run))
            scores.append(record.fitness)
        adjusted = float(np.mean(scores))
        logger.info("Reranked seq=%d %s: %.4f", candidate.seq, candidate.expr, adjusted)
        ranked.append(RankedCandidate(candidate=candidate, adjusted_fitness=adjusted, run_fitness=scores))
    ranked.sort(key=lambda r: (-r.adjusted_fitness, r.candidate.seq))
    return ranked[:keep]
