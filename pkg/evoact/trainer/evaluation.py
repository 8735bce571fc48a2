"""Fitness functions and multi-run comparisons built on `train`."""

from __future__ import annotations

import logging
from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass

import numpy as np
import pandas as pd
from scipy import stats

from evoact.config import LrSchedule, TrainSpec
from evoact.graph.graph import ActivationGraph
from evoact.trainer.activations import ActivationFunction, as_activation
from evoact.trainer.datasets import load_dataset
from evoact.trainer.network import build_network
from evoact.trainer.records import FitnessRecord
from evoact.trainer.schedule import compress
from evoact.trainer.training import train

logger = logging.getLogger(__name__)

Trainable = ActivationFunction | ActivationGraph


def evaluate_activation(
    activation: Trainable,
    spec: TrainSpec,
    seed: int | None = None,
    schedule: LrSchedule | None = None,
) -> FitnessRecord:
    """Build, train and score one network; `seed` drives initialization and shuffling."""
    rng = np.random.default_rng(spec.seed if seed is None else seed)
    dataset = load_dataset(spec.dataset)
    network = build_network(spec, activation, rng)
    return train(network, dataset, spec, rng, schedule)


def fitness_compressed(graph: Trainable, spec: TrainSpec) -> FitnessRecord:
    """Search fitness: one run on the compressed schedule."""
    return evaluate_activation(graph, spec, schedule=compress(spec.schedule, spec.compress_factor))


def fitness_full(graph: Trainable, spec: TrainSpec, run_seed: int) -> FitnessRecord:
    """Reranking fitness: one run on the full schedule."""
    return evaluate_activation(graph, spec, seed=run_seed)


def wider_spec(spec: TrainSpec, factor: int = 2) -> TrainSpec:
    """Same spec with every hidden layer `factor` times wider."""
    widths = spec.layer_widths
    return spec.model_copy(update={"layer_widths": [widths[0], *(w * factor for w in widths[1:-1]), widths[-1]]})


@dataclass
class CrossEvalResult:
    """Mean full-schedule fitness of each graph under each spec."""

    graph_names: list[str]
    spec_names: list[str]
    matrix: np.ndarray
    unstable_runs: np.ndarray

    @property
    def unstable(self) -> np.ndarray:
        return self.unstable_runs > 0

    def to_frame(self) -> pd.DataFrame:
        rows = []
        for i, graph in enumerate(self.graph_names):
            for j, spec in enumerate(self.spec_names):
                rows.append(
                    {
                        "graph": graph,
                        "spec": spec,
                        "mean_fitness": float(self.matrix[i, j]),
                        "unstable_runs": int(self.unstable_runs[i, j]),
                        "status": "unstable" if self.unstable_runs[i, j] else "ok",
                    }
                )
        return pd.DataFrame(rows, columns=["graph", "spec", "mean_fitness", "unstable_runs", "status"])


def cross_evaluate(
    graphs: Sequence[Trainable],
    specs: Sequence[TrainSpec],
    seeds: int = 2,
    spec_names: Sequence[str] | None = None,
    fitness_fn: Callable[[Trainable, TrainSpec, int], FitnessRecord] = fitness_full,
) -> CrossEvalResult:
    """Train every graph under every spec `seeds` times; unstable runs count as zero.

    Run seeds are `spec.seed + s` for s in range(seeds).
    """
    if not graphs or not specs:
        raise ValueError("cross_evaluate needs at least one graph and one spec")
    names = [as_activation(g).name for g in graphs]
    spec_names = list(spec_names) if spec_names is not None else [f"spec{j}" for j in range(len(specs))]
    matrix = np.zeros((len(graphs), len(specs)))
    unstable_runs = np.zeros((len(graphs), len(specs)), dtype=int)
    for i, graph in enumerate(graphs):
        for j, spec in enumerate(specs):
            records = [fitness_fn(graph, spec, spec.seed + s) for s in range(seeds)]
            matrix[i, j] = np.mean([r.fitness for r in records])
            unstable_runs[i, j] = sum(not r.ok for r in records)
            logger.info("%s under %s: %.4f", names[i], spec_names[j], matrix[i, j])
    return CrossEvalResult(names, spec_names, matrix, unstable_runs)


@dataclass
class BenchmarkRow:
    """Accuracy over repeated full-schedule runs of one activation."""

    name: str
    val_accs: list[float]
    test_accs: list[float]
    unstable_runs: int
    p_value: float | None = None

    @property
    def val_mean(self) -> float:
        return float(np.mean(self.val_accs))

    @property
    def val_std(self) -> float:
        return float(np.std(self.val_accs, ddof=1)) if len(self.val_accs) > 1 else 0.0

    @property
    def test_mean(self) -> float:
        return float(np.mean(self.test_accs))

    @property
    def test_std(self) -> float:
        return float(np.std(self.test_accs, ddof=1)) if len(self.test_accs) > 1 else 0.0

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "val_mean": self.val_mean,
            "val_std": self.val_std,
            "test_mean": self.test_mean,
            "test_std": self.test_std,
            "runs": len(self.val_accs),
            "unstable_runs": self.unstable_runs,
            "p_value": self.p_value,
        }


def welch_p_value(sample: Sequence[float], reference: Sequence[float]) -> float | None:
    """One-tailed Welch's t-test that `sample` has the larger mean; None when undefined."""
    if len(sample) < 2 or len(reference) < 2:
        return None
    result = stats.ttest_ind(sample, reference, equal_var=False, alternative="greater")
    p = float(result.pvalue)
    return p if np.isfinite(p) else None


def benchmark(
    activations: Mapping[str, Trainable],
    spec: TrainSpec,
    seeds: int = 5,
    reference: str | None = "relu",
    fitness_fn: Callable[[Trainable, TrainSpec, int], FitnessRecord] = fitness_full,
) -> list[BenchmarkRow]:
    """Mean and sample standard deviation of final accuracies over `seeds` runs.

    Each non-reference row carries the p-value of a one-tailed Welch's t-test on
    test accuracy against the `reference` row. Unstable runs score zero.
    """
    if seeds < 1:
        raise ValueError("seeds must be at least 1")
    rows: dict[str, BenchmarkRow] = {}
    for name, activation in activations.items():
        records = [fitness_fn(activation, spec, spec.seed + s) for s in range(seeds)]
        rows[name] = BenchmarkRow(
            name=name,
            val_accs=[r.fitness for r in records],
            test_accs=[(r.test_acc or 0.0) if r.ok else 0.0 for r in records],
            unstable_runs=sum(not r.ok for r in records),
        )
        logger.info("%s: val %.4f test %.4f", name, rows[name].val_mean, rows[name].test_mean)

    if reference is not None and reference in rows:
        baseline = rows[reference].test_accs
        for name, row in rows.items():
            if name != reference:
                row.p_value = welch_p_value(row.test_accs, baseline)
    return list(rows.values())


def sample_study(graphs: Sequence[ActivationGraph], spec: TrainSpec) -> pd.DataFrame:
    """Train each graph once on the compressed schedule; one row per graph."""
    rows = []
    for index, graph in enumerate(graphs):
        record = fitness_compressed(graph, spec)
        rows.append(
            {
                "index": index,
                "expr": str(graph),
                "k": graph.param_count,
                "fitness": record.fitness,
                "status": record.status.value,
                "runtime_seconds": record.runtime_seconds,
            }
        )
    return pd.DataFrame(rows, columns=["index", "expr", "k", "fitness", "status", "runtime_seconds"])
