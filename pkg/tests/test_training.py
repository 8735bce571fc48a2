"""Tests for the training loop."""

import numpy as np
import pytest

from evoact.config import DatasetRef, DatasetSizes, LrSchedule, TrainSpec
from evoact.graph import parse
from evoact.trainer.datasets import load_dataset
from evoact.trainer.network import build_network
from evoact.trainer.records import Status
from evoact.trainer.training import NesterovSGD, train

QUICK = TrainSpec(
    layer_widths=[2, 8, 2],
    dataset=DatasetRef(kind="blobs", sizes=DatasetSizes(train=80, val=40, test=40), seed=2),
    schedule=LrSchedule(milestones=[3], total_epochs=4, base_lr=0.05),
    batch_size=16,
)


def run(text: str, spec: TrainSpec = QUICK, seed: int = 0):
    rng = np.random.default_rng(seed)
    network = build_network(spec, parse(text), rng)
    return network, train(network, load_dataset(spec.dataset), spec, rng)


class TestNesterovSGD:
    """Tests for the optimizer update rule."""

    def test_two_steps(self) -> None:
        param = np.array([1.0])
        optimizer = NesterovSGD([param], momentum=0.9)
        optimizer.step([np.array([1.0])], lr=0.1)
        # v = 1; theta = 1 - 0.1 * (0.9 + 1)
        assert param[0] == pytest.approx(0.81)
        optimizer.step([np.array([1.0])], lr=0.1)
        # v = 1.9; theta -= 0.1 * (1.71 + 1)
        assert param[0] == pytest.approx(0.81 - 0.271)

    def test_zero_momentum_is_plain_sgd(self) -> None:
        param = np.array([2.0, -1.0])
        NesterovSGD([param], momentum=0.0).step([np.array([1.0, 1.0])], lr=0.5)
        assert param.tolist() == [1.5, -1.5]


class TestTrain:
    """Tests for train."""

    def test_learns_separable_blobs(self) -> None:
        _, record = run("p0(tanh(p1(x)))")
        assert record.status is Status.OK
        assert record.fitness >= 0.95
        assert record.test_acc >= 0.9

    def test_bookkeeping_lengths(self) -> None:
        _, record = run("p0(swish(x))")
        assert record.epochs_completed == 4
        assert len(record.param_trajectory) == 4
        assert len(record.layer_trajectory) == 4
        assert record.runtime_seconds > 0
        assert [c.epoch for c in record.curves] == [0, 1, 2, 3]
        assert record.curves[3].lr == pytest.approx(0.01)
        assert record.fitness == record.curves[-1].val_acc

    def test_activation_params_move(self) -> None:
        network, record = run("p0(tanh(p1(x)))")
        assert not np.allclose(network.act_params[0], 1.0)
        assert record.param_trajectory[-1] != [1.0, 1.0]

    def test_deterministic(self) -> None:
        _, first = run("mul(log_sigmoid(p0(x)), p1(arcsinh(x)))", seed=7)
        _, second = run("mul(log_sigmoid(p0(x)), p1(arcsinh(x)))", seed=7)
        assert first.fitness == second.fitness
        assert [c.train_loss for c in first.curves] == [c.train_loss for c in second.curves]
        assert first.param_trajectory == second.param_trajectory

    def test_non_finite_loss_at_first_step(self) -> None:
        _, record = run("exp(exp(exp(exp(x))))")
        assert record.status is Status.UNSTABLE
        assert record.fitness == 0.0
        assert record.epochs_completed == 0
        assert record.runtime_seconds < 5.0

    def test_constant_activation_is_stable(self) -> None:
        _, record = run("const1(x)")
        assert record.status is Status.OK
        assert record.fitness == pytest.approx(0.5, abs=0.1)

    @pytest.mark.slow
    def test_relu_floor_on_spirals(self) -> None:
        scores = [run("relu(x)", spec=TrainSpec(), seed=s)[1].fitness for s in range(5)]
        assert np.mean(scores) >= 0.95
