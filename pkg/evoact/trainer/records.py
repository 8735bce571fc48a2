"""Result records produced by one fitness evaluation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum


class Status(str, Enum):
    """Outcome of a training run."""

    OK = "ok"
    UNSTABLE = "unstable"


@dataclass
class EpochStats:
    """One row of the training curves."""

    epoch: int
    lr: float
    train_loss: float
    train_acc: float
    val_acc: float


@dataclass
class FitnessRecord:
    """Fitness plus everything recorded while training.

    `param_trajectory[e][i]` is the mean of parameter i over the whole network
    after epoch e; `layer_trajectory[e][l][i]` is the same mean restricted to
    hidden layer l.
    """

    fitness: float
    status: Status = Status.OK
    runtime_seconds: float = 0.0
    test_acc: float | None = None
    curves: list[EpochStats] = field(default_factory=list)
    param_trajectory: list[list[float]] = field(default_factory=list)
    layer_trajectory: list[list[list[float]]] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.status = Status(self.status)
        if self.status is Status.OK and not math.isfinite(self.fitness):
            self.status = Status.UNSTABLE
        if self.status is Status.UNSTABLE:
            self.fitness = 0.0

    @property
    def ok(self) -> bool:
        return self.status is Status.OK

    @property
    def epochs_completed(self) -> int:
        return len(self.curves)

    @classmethod
    def unstable(cls, runtime_seconds: float = 0.0, **kwargs) -> FitnessRecord:
        return cls(fitness=0.0, status=Status.UNSTABLE, runtime_seconds=runtime_seconds, **kwargs)

    @classmethod
    def coerce(cls, value: FitnessRecord | float | int) -> FitnessRecord:
        """Accept bare numbers from simple fitness functions."""
        if isinstance(value, FitnessRecord):
            return value
        return cls(fitness=float(value))
