"""DataFrames behind the CSV result files."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import asdict

import pandas as pd

from evoact.evolve.history import RunSummary
from evoact.evolve.search import RankedCandidate
from evoact.trainer.evaluation import BenchmarkRow
from evoact.trainer.records import FitnessRecord

CURVE_COLUMNS = ["epoch", "lr", "train_loss", "train_acc", "val_acc"]
TRAJECTORY_COLUMNS = ["epoch", "param_index", "layer", "mean_value"]
RERANK_COLUMNS = ["rank", "seq", "expr", "k", "search_fitness", "adjusted_fitness", "run_fitness"]
OVERALL = "all"


def curves_frame(record: FitnessRecord) -> pd.DataFrame:
    """One row per completed epoch."""
    return pd.DataFrame([asdict(stats) for stats in record.curves], columns=CURVE_COLUMNS)


def trajectory_frame(record: FitnessRecord) -> pd.DataFrame:
    """Mean activation parameter value per epoch, network-wide (layer "all") and per hidden layer."""
    rows = []
    for epoch, (overall, layers) in enumerate(zip(record.param_trajectory, record.layer_trajectory)):
        for index, value in enumerate(overall):
            rows.append((epoch, index, OVERALL, value))
        for layer, means in enumerate(layers):
            for index, value in enumerate(means):
                rows.append((epoch, index, str(layer), value))
    return pd.DataFrame(rows, columns=TRAJECTORY_COLUMNS)


def rerank_frame(ranked: Sequence[RankedCandidate]) -> pd.DataFrame:
    rows = [
        (
            rank,
            r.candidate.seq,
            r.expr,
            r.candidate.graph.param_count,
            r.candidate.score,
            r.adjusted_fitness,
            " ".join(f"{f:.6g}" for f in r.run_fitness),
        )
        for rank, r in enumerate(ranked, start=1)
    ]
    return pd.DataFrame(rows, columns=RERANK_COLUMNS)


def summaries_frame(summaries: Sequence[RunSummary]) -> pd.DataFrame:
    columns = list(RunSummary.__dataclass_fields__)
    return pd.DataFrame([asdict(s) for s in summaries], columns=columns)


def benchmark_frame(rows: Sequence[BenchmarkRow]) -> pd.DataFrame:
    return pd.DataFrame([row.as_dict() for row in rows])
