"""Step learning-rate schedules."""

from __future__ import annotations

from bisect import bisect_right

from evoact.config import LrSchedule


def lr_at(schedule: LrSchedule, epoch: int) -> float:
    """Learning rate for a 0-based epoch.

    Warmup epochs use the warmup rate; afterwards the base rate is multiplied by
    `decay` once for every milestone m with m <= epoch.
    """
    if not 0 <= epoch < schedule.total_epochs:
        raise ValueError(f"epoch {epoch} outside [0, {schedule.total_epochs})")
    if schedule.warmup is not None and epoch < schedule.warmup.epochs:
        return schedule.warmup.lr
    return schedule.base_lr * schedule.decay ** bisect_right(schedule.milestones, epoch)


def compress(schedule: LrSchedule, factor: int = 2) -> LrSchedule:
    """Shrink total epochs and milestones by `factor`; warmup length is kept.

    Positions are divided and rounded half to even, which maps 60/120/160 of 200
    epochs to 30/60/80 of 100 and 91/137 to 46/68.
    """
    if factor < 1:
        raise ValueError("factor must be at least 1")
    total = max(1, round(schedule.total_epochs / factor))
    milestones: list[int] = []
    for milestone in schedule.milestones:
        position = round(milestone / factor)
        if position < total and (not milestones or position > milestones[-1]):
            milestones.append(position)
    return schedule.model_copy(update={"total_epochs": total, "milestones": milestones})


def boundaries(schedule: LrSchedule) -> list[int]:
    """Epochs at which the learning rate changes."""
    changes = []
    previous = lr_at(schedule, 0)
    for epoch in range(1, schedule.total_epochs):
        current = lr_at(schedule, epoch)
        if current != previous:
            changes.append(epoch)
        previous = current
    return changes
