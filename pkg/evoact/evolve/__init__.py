"""Evolutionary search over activation graphs."""

from evoact.evolve.history import (
    Candidate,
    RunSummary,
    SearchHistory,
    combined_progress,
    load_history,
    meta_path,
    summarize_runs,
)
from evoact.evolve.mutations import (
    MUTATIONS,
    apply_mutation,
    choose_mutation,
    init_random,
    mutate,
    mutate_change,
    mutate_insert,
    mutate_regenerate,
    mutate_remove,
    parameterize,
    sample_random_functions,
)
from evoact.evolve.pareto import non_dominated, pareto_general
from evoact.evolve.search import (
    Proposal,
    RankedCandidate,
    RegularizedEvolution,
    evolve,
    rerank,
    safe_fitness,
)

__all__ = [
    "Candidate",
    "MUTATIONS",
    "Proposal",
    "RankedCandidate",
    "RegularizedEvolution",
    "RunSummary",
    "SearchHistory",
    "apply_mutation",
    "choose_mutation",
    "combined_progress",
    "evolve",
    "init_random",
    "load_history",
    "meta_path",
    "mutate",
    "mutate_change",
    "mutate_insert",
    "mutate_regenerate",
    "mutate_remove",
    "non_dominated",
    "parameterize",
    "pareto_general",
    "rerank",
    "safe_fitness",
    "sample_random_functions",
    "summarize_runs",
]
