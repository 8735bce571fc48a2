"""Minibatch training with Nesterov momentum."""

from __future__ import annotations

import logging
import time

import numpy as np

from evoact.config import LrSchedule, TrainSpec
from evoact.trainer.datasets import Dataset
from evoact.trainer.network import Network
from evoact.trainer.records import EpochStats, FitnessRecord
from evoact.trainer.schedule import lr_at

logger = logging.getLogger(__name__)


class NesterovSGD:
    """SGD with Nesterov momentum over a fixed list of arrays.

    v <- mu * v + g;  theta <- theta - lr * (mu * v + g)
    """

    def __init__(self, params: list[np.ndarray], momentum: float = 0.9):
        self.params = params
        self.momentum = momentum
        self.velocities = [np.zeros_like(p) for p in params]

    def step(self, grads: list[np.ndarray], lr: float) -> None:
        mu = self.momentum
        with np.errstate(all="ignore"):
            for param, velocity, grad in zip(self.params, self.velocities, grads):
                velocity *= mu
                velocity += grad
                param -= lr * (mu * velocity + grad)


def _all_finite(arrays: list[np.ndarray]) -> bool:
    return all(np.isfinite(a).all() for a in arrays)


def train(
    network: Network,
    dataset: Dataset,
    spec: TrainSpec,
    rng: np.random.Generator,
    schedule: LrSchedule | None = None,
) -> FitnessRecord:
    """Train `network` in place and report final-epoch validation accuracy.

    Any non-finite loss, parameter, or validation output stops training at once
    and yields an unstable record holding the epochs completed so far.

    Args:
        network: Freshly built network; modified in place.
        dataset: Train/val/test splits.
        spec: Momentum, L2 and batch size.
        rng: Shuffling source.
        schedule: Overrides `spec.schedule` (e.g. a compressed one).

    Returns:
        FitnessRecord with curves and parameter trajectories.
    """
    schedule = schedule or spec.schedule
    start = time.perf_counter()
    optimizer = NesterovSGD(network.parameters(), spec.momentum)
    curves: list[EpochStats] = []
    param_trajectory: list[list[float]] = []
    layer_trajectory: list[list[list[float]]] = []
    n = len(dataset.y_train)

    def halt(reason: str) -> FitnessRecord:
        runtime = time.perf_counter() - start
        logger.info("Training unstable after %d epoch(s): %s", len(curves), reason)
        return FitnessRecord.unstable(
            runtime,
            curves=curves,
            param_trajectory=param_trajectory,
            layer_trajectory=layer_trajectory,
        )

    for epoch in range(schedule.total_epochs):
        lr = lr_at(schedule, epoch)
        order = rng.permutation(n)
        loss_sum = 0.0
        correct = 0
        for begin in range(0, n, spec.batch_size):
            batch = order[begin : begin + spec.batch_size]
            x, y = dataset.x_train[batch], dataset.y_train[batch]
            result = network.loss_and_grads(x, y, spec.l2)
            if not np.isfinite(result.loss):
                return halt(f"loss {result.loss} at epoch {epoch}")
            loss_sum += result.loss * len(batch)
            correct += int(np.sum(np.argmax(result.logits, axis=1) == y))
            optimizer.step(result.grads, lr)
            if not _all_finite(optimizer.params):
                return halt(f"non-finite parameter at epoch {epoch}")

        val_logits = network.forward(dataset.x_val)
        if not np.isfinite(val_logits).all():
            return halt(f"non-finite validation output at epoch {epoch}")
        val_acc = float(np.mean(np.argmax(val_logits, axis=1) == dataset.y_val))
        curves.append(EpochStats(epoch, lr, loss_sum / n, correct / n, val_acc))
        overall, per_layer = network.param_means()
        param_trajectory.append(overall)
        layer_trajectory.append(per_layer)
        logger.debug("epoch %d lr=%.4g loss=%.4f train=%.3f val=%.3f", epoch, lr, loss_sum / n, correct / n, val_acc)

    test_logits = network.forward(dataset.x_test)
    if not np.isfinite(test_logits).all():
        return halt("non-finite test output")
    test_acc = float(np.mean(np.argmax(test_logits, axis=1) == dataset.y_test))
    return FitnessRecord(
        fitness=curves[-1].val_acc,
        runtime_seconds=time.perf_counter() - start,
        test_acc=test_acc,
        curves=curves,
        param_trajectory=param_trajectory,
        layer_trajectory=layer_trajectory,
    )
