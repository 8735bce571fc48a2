"""Tests for learning-rate schedules."""

import pytest

from evoact.config import LrSchedule, Warmup
from evoact.trainer.schedule import boundaries, compress, lr_at


class TestLrAt:
    """Tests for lr_at."""

    def test_step_decay(self) -> None:
        schedule = LrSchedule.wrn()
        assert lr_at(schedule, 0) == pytest.approx(0.1)
        assert lr_at(schedule, 59) == pytest.approx(0.1)
        assert lr_at(schedule, 60) == pytest.approx(0.02)
        assert lr_at(schedule, 120) == pytest.approx(0.004)
        assert lr_at(schedule, 199) == pytest.approx(0.0008)

    def test_warmup(self) -> None:
        schedule = LrSchedule.resnet_v1()
        assert lr_at(schedule, 0) == 0.01
        assert lr_at(schedule, 1) == pytest.approx(0.1)

    def test_out_of_range(self) -> None:
        with pytest.raises(ValueError):
            lr_at(LrSchedule.desk(), 60)
        with pytest.raises(ValueError):
            lr_at(LrSchedule.desk(), -1)

    def test_discontinuities(self) -> None:
        assert boundaries(LrSchedule.wrn()) == [60, 120, 160]
        assert boundaries(LrSchedule.resnet_v1()) == [1, 91, 137]
        assert boundaries(LrSchedule(milestones=[], total_epochs=5)) == []


class TestCompress:
    """Tests for compress."""

    def test_wide_residual(self) -> None:
        compressed = compress(LrSchedule.wrn())
        assert compressed.total_epochs == 100
        assert compressed.milestones == [30, 60, 80]
        assert compressed.decay == 0.2

    def test_residual_keeps_warmup(self) -> None:
        compressed = compress(LrSchedule.resnet_v1())
        assert compressed.milestones == [46, 68]
        assert compressed.warmup == Warmup(lr=0.01, epochs=1)
        assert lr_at(compressed, 0) == 0.01

    def test_desk_default(self) -> None:
        compressed = compress(LrSchedule.desk())
        assert compressed.total_epochs == 30
        assert compressed.milestones == [9, 18, 24]

    def test_colliding_milestones_merge(self) -> None:
        compressed = compress(LrSchedule(milestones=[1, 2, 3], total_epochs=8), factor=4)
        assert compressed.total_epochs == 2
        assert compressed.milestones == [0, 1]

    def test_factor_one_is_identity(self) -> None:
        schedule = LrSchedule.wrn()
        assert compress(schedule, 1) == schedule

    def test_invalid_factor(self) -> None:
        with pytest.raises(ValueError):
            compress(LrSchedule.desk(), 0)


class TestScheduleValidation:
    """Tests for LrSchedule invariants."""

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"milestones": [10, 10], "total_epochs": 20},
            {"milestones": [5, 20], "total_epochs": 20},
            {"decay": 1.0},
            {"decay": 0.0},
        ],
    )
    def test_rejected(self, kwargs) -> None:
        with pytest.raises(ValueError):
            LrSchedule(**kwargs)
