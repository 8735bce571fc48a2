"""Search history: candidates in evaluation order, traces, and persistence."""

from __future__ import annotations

import json
from collections.abc import Iterator, Sequence
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd
import yaml

from evoact.evolve.mutations import RANDOM
from evoact.graph.grammar import parse, to_text
from evoact.graph.graph import ActivationGraph
from evoact.trainer.records import FitnessRecord, Status

PROGRESS_COLUMNS = ["seq", "cumulative_seconds", "best_so_far", "window_avg_last_P"]
META_SUFFIX = ".meta.yaml"
DEFAULT_POPULATION = 64


@dataclass
class Candidate:
    """One evaluated activation function and its lineage."""

    seq: int
    graph: ActivationGraph
    fitness: FitnessRecord | None = None
    parent_seq: int | None = None
    mutation: str = RANDOM
    accepted: bool = False
    # parents were sampled from completed seqs [window_end - P, window_end)
    window_end: int = 0
    sampled: tuple[int, ...] = ()

    @property
    def score(self) -> float:
        return 0.0 if self.fitness is None else self.fitness.fitness

    @property
    def runtime_seconds(self) -> float:
        return 0.0 if self.fitness is None else self.fitness.runtime_seconds

    @property
    def expr(self) -> str:
        return to_text(self.graph)

    def to_record(self) -> dict:
        return {
            "seq": self.seq,
            "expr": self.expr,
            "k": self.graph.param_count,
            "fitness": self.score,
            "status": (self.fitness.status if self.fitness else Status.UNSTABLE).value,
            "runtime_seconds": self.runtime_seconds,
            "parent_seq": self.parent_seq,
            "mutation": self.mutation,
            "accepted": self.accepted,
            "window_end": self.window_end,
            "sampled": list(self.sampled),
        }

    @classmethod
    def from_record(cls, data: dict) -> Candidate:
        record = FitnessRecord(
            fitness=float(data["fitness"]),
            status=Status(data["status"]),
            runtime_seconds=float(data.get("runtime_seconds", 0.0)),
        )
        return cls(
            seq=int(data["seq"]),
            graph=parse(data["expr"]),
            fitness=record,
            parent_seq=data.get("parent_seq"),
            mutation=data.get("mutation", RANDOM),
            accepted=bool(data.get("accepted", False)),
            window_end=int(data.get("window_end", 0)),
            sampled=tuple(data.get("sampled", ())),
        )


@dataclass
class SearchHistory:
    """All evaluated candidates in order."""

    population_size: int
    candidates: list[Candidate] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.candidates)

    def __iter__(self) -> Iterator[Candidate]:
        return iter(self.candidates)

    def __getitem__(self, seq: int) -> Candidate:
        return self.candidates[seq]

    def append(self, candidate: Candidate) -> None:
        if candidate.seq != len(self.candidates):
            raise ValueError(f"expected seq {len(self.candidates)}, got {candidate.seq}")
        self.candidates.append(candidate)

    @property
    def accepted_count(self) -> int:
        return sum(1 for c in self.candidates if c.accepted)

    @property
    def discarded_count(self) -> int:
        return len(self.candidates) - self.accepted_count

    def scores(self) -> np.ndarray:
        return np.array([c.score for c in self.candidates], dtype=np.float64)

    def best_so_far(self) -> list[float]:
        if not self.candidates:
            return []
        return np.maximum.accumulate(self.scores()).tolist()

    def window_average(self, window: int | None = None) -> list[float]:
        """Mean fitness of the last `window` evaluations after each step."""
        window = window or self.population_size
        return pd.Series(self.scores()).rolling(window, min_periods=1).mean().tolist()

    def cumulative_runtime(self) -> list[float]:
        return np.cumsum([c.runtime_seconds for c in self.candidates]).tolist()

    def best(self) -> Candidate:
        """Fittest candidate; earlier discovery wins ties."""
        if not self.candidates:
            raise ValueError("history is empty")
        return min(self.candidates, key=lambda c: (-c.score, c.seq))

    def progress_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "seq": [c.seq for c in self.candidates],
                "cumulative_seconds": self.cumulative_runtime(),
                "best_so_far": self.best_so_far(),
                "window_avg_last_P": self.window_average(),
            },
            columns=PROGRESS_COLUMNS,
        )

    def to_jsonl(self) -> str:
        return "".join(json.dumps(c.to_record()) + "\n" for c in self.candidates)

    @classmethod
    def from_jsonl(cls, text: str, population_size: int) -> SearchHistory:
        history = cls(population_size=population_size)
        for line in text.splitlines():
            if line.strip():
                history.append(Candidate.from_record(json.loads(line)))
        return history


@dataclass
class RunSummary:
    """Reliability and efficiency figures for one search run."""

    name: str
    evaluations: int
    accepted: int
    best_fitness: float
    final_window_avg: float
    total_seconds: float
    evals_to_reference: int | None = None
    seconds_to_reference: float | None = None


def summarize_runs(
    histories: Sequence[SearchHistory],
    names: Sequence[str] | None = None,
    window: int | None = None,
    reference: float | None = None,
) -> list[RunSummary]:
    """Summarize several runs of the same search.

    Args:
        histories: one history per run
        names: labels for the runs (defaults to run-0, run-1, ...)
        window: averaging window (defaults to each run's population size)
        reference: fitness to beat, e.g. the ReLU baseline; records how many
            evaluations and compute seconds the first strictly better candidate took
    """
    names = list(names) if names is not None else [f"run-{i}" for i in range(len(histories))]
    summaries = []
    for name, history in zip(names, histories, strict=True):
        averages = history.window_average(window)
        runtime = history.cumulative_runtime()
        summary = RunSummary(
            name=name,
            evaluations=len(history),
            accepted=history.accepted_count,
            best_fitness=history.best().score if len(history) else 0.0,
            final_window_avg=averages[-1] if averages else 0.0,
            total_seconds=runtime[-1] if runtime else 0.0,
        )
        if reference is not None:
            for candidate in history:
                if candidate.score > reference:
                    summary.evals_to_reference = candidate.seq + 1
                    summary.seconds_to_reference = runtime[candidate.seq]
                    break
        summaries.append(summary)
    return summaries


def combined_progress(histories: Sequence[SearchHistory], names: Sequence[str]) -> pd.DataFrame:
    """Progress tables of several runs stacked with a `run` column."""
    frames = []
    for name, history in zip(names, histories, strict=True):
        frame = history.progress_frame()
        frame.insert(0, "run", name)
        frames.append(frame)
    if not frames:
        return pd.DataFrame(columns=["run", *PROGRESS_COLUMNS])
    return pd.concat(frames, ignore_index=True)


def meta_path(history_path: Path) -> Path:
    """Sidecar holding the provenance of a history JSONL file."""
    return history_path.with_name(history_path.stem + META_SUFFIX)


def load_history(path: Path, population_size: int | None = None) -> SearchHistory:
    """Reload a history; the population size comes from the sidecar unless given."""
    if population_size is None:
        sidecar = meta_path(path)
        if sidecar.exists():
            population_size = (yaml.safe_load(sidecar.read_text(encoding="utf-8")) or {}).get("population_size")
    return SearchHistory.from_jsonl(path.read_text(encoding="utf-8"), int(population_size or DEFAULT_POPULATION))
