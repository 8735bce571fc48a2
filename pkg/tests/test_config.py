"""Tests for configuration management."""

import tempfile
from pathlib import Path

import numpy as np
import pytest
import yaml
from pydantic import ValidationError

from evoact.config import (
    DatasetRef,
    EvolutionConfig,
    Granularity,
    LrSchedule,
    RunConfig,
    SearchMode,
    TrainSpec,
)
from evoact.errors import ConfigError
from evoact.graph import parse
from evoact.trainer.network import build_network


class TestRunConfig:
    """Tests for RunConfig."""

    def test_default_config(self) -> None:
        config = RunConfig()

        assert config.evolution.population_size == 64
        assert config.evolution.sample_size == 16
        assert config.evolution.budget == 1000
        assert config.evolution.threshold == 0.2
        assert config.evolution.mode is SearchMode.SEQUENTIAL
        assert config.train.granularity is Granularity.PER_CHANNEL
        assert config.train.schedule.milestones == [18, 36, 48]
        assert config.rerank.top_n == 10
        assert config.output.directory == Path("results")

    def test_load_from_yaml(self) -> None:
        yaml_content = """
evolution:
  P: 32
  S: 8
  C: 500
  V: 0.1
  mode: asynchronous

train:
  layer_widths: [2, 8, 2]
  granularity: per-layer
  dataset:
    kind: circles
    noise: 0.1
  schedule:
    base_lr: 0.05
    milestones: [5, 10]
    total_epochs: 12

rerank:
  top_n: 5
"""
        with tempfile.NamedTemporaryFile(mode="w", suffix=".yaml", delete=False) as f:
            f.write(yaml_content)
            f.flush()
            config_path = Path(f.name)

        try:
            config = RunConfig.from_yaml(config_path)

            assert config.evolution.population_size == 32
            assert config.evolution.budget == 500
            assert config.evolution.mode is SearchMode.ASYNCHRONOUS
            assert config.train.hidden_widths == [8]
            assert config.train.granularity is Granularity.PER_LAYER
            assert config.train.dataset.kind == "circles"
            assert config.train.schedule.total_epochs == 12
            assert config.rerank.top_n == 5
            assert config.rerank.keep == 3
        finally:
            config_path.unlink()

    def test_unknown_key_is_config_error(self) -> None:
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "bad.yaml"
            path.write_text("evolution:\n  populaton_size: 8\n")
            with pytest.raises(ConfigError, match="bad.yaml"):
                RunConfig.from_yaml(path)

    def test_invalid_yaml(self) -> None:
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "broken.yaml"
            path.write_text("evolution: [1, 2\n")
            with pytest.raises(ConfigError, match="invalid YAML"):
                RunConfig.from_yaml(path)

    def test_save_and_load(self) -> None:
        config = RunConfig()
        config.evolution.seed = 42
        config.train.layer_widths = [2, 4, 4, 2]

        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "nested" / "config.yaml"
            config.to_yaml(path)
            assert path.exists()

            data = yaml.safe_load(path.read_text())
            assert data["evolution"]["seed"] == 42

            loaded = RunConfig.from_yaml(path)
            assert loaded == config


class TestLoadLookup:
    """Tests for RunConfig.load search order."""

    def test_missing_explicit_path(self, tmp_path: Path) -> None:
        with pytest.raises(ConfigError, match="not found"):
            RunConfig.load(tmp_path / "nope.yaml")

    def test_working_directory_file(self, tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> None:
        monkeypatch.chdir(tmp_path)
        monkeypatch.setenv("HOME", str(tmp_path / "home"))
        monkeypatch.delenv("EVOACT_OUTPUT_DIR", raising=False)
        (tmp_path / "evoact.yaml").write_text("evolution:\n  seed: 7\n")

        assert RunConfig.load().evolution.seed == 7

    def test_defaults_without_files(self, tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> None:
        monkeypatch.chdir(tmp_path)
        monkeypatch.setenv("HOME", str(tmp_path / "home"))
        monkeypatch.delenv("EVOACT_OUTPUT_DIR", raising=False)

        assert RunConfig.load() == RunConfig()

    def test_output_dir_env_override(self, tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> None:
        monkeypatch.chdir(tmp_path)
        monkeypatch.setenv("HOME", str(tmp_path / "home"))
        monkeypatch.setenv("EVOACT_OUTPUT_DIR", str(tmp_path / "elsewhere"))

        assert RunConfig.load().output.directory == tmp_path / "elsewhere"


class TestEvolutionConfig:
    """Tests for EvolutionConfig validation."""

    def test_aliases_and_names(self) -> None:
        by_alias = EvolutionConfig.model_validate({"P": 8, "S": 4, "C": 20, "V": 0.3})
        by_name = EvolutionConfig(population_size=8, sample_size=4, budget=20, threshold=0.3)
        assert by_alias == by_name

    @pytest.mark.parametrize(
        "values",
        [
            {"P": 4, "S": 8, "C": 20},
            {"P": 30, "S": 4, "C": 20},
            {"V": 1.0},
            {"V": -0.1},
            {"seed": -1},
        ],
    )
    def test_rejects(self, values: dict) -> None:
        with pytest.raises(ValidationError):
            EvolutionConfig.model_validate(values)

    def test_random_search(self) -> None:
        config = EvolutionConfig.random_search(budget=50, seed=3)
        assert (config.population_size, config.sample_size, config.threshold) == (1, 1, 0.0)
        assert config.budget == 50


class TestLrSchedule:
    """Tests for LrSchedule validation and presets."""

    @pytest.mark.parametrize(
        "values",
        [
            {"milestones": [10, 5]},
            {"milestones": [10, 10]},
            {"milestones": [60], "total_epochs": 60},
            {"milestones": [-1]},
            {"decay": 1.0},
            {"decay": 0.0},
            {"base_lr": 0.0},
        ],
    )
    def test_rejects(self, values: dict) -> None:
        with pytest.raises(ValidationError):
            LrSchedule.model_validate(values)

    def test_presets(self) -> None:
        assert LrSchedule.wrn().milestones == [60, 120, 160]
        assert LrSchedule.resnet_v1().warmup is not None
        assert LrSchedule.resnet_v2().warmup is None
        assert LrSchedule.desk() == LrSchedule()


class TestTrainSpec:
    """Tests for TrainSpec and DatasetRef validation."""

    def test_needs_a_hidden_layer(self) -> None:
        with pytest.raises(ValidationError):
            TrainSpec(layer_widths=[2, 2])

    def test_positive_widths(self) -> None:
        with pytest.raises(ValidationError):
            TrainSpec(layer_widths=[2, 0, 2])

    def test_csv_requires_path(self) -> None:
        with pytest.raises(ValidationError):
            DatasetRef(kind="csv")

    def test_two_class_datasets(self) -> None:
        with pytest.raises(ValidationError):
            DatasetRef(kind="two_spirals", classes=3)
        assert DatasetRef(kind="blobs", classes=4).classes == 4

    def test_json_round_trip(self) -> None:
        spec = TrainSpec(layer_widths=[2, 8, 3], dataset=DatasetRef(kind="blobs", classes=3), seed=9)
        assert TrainSpec.model_validate_json(spec.model_dump_json()) == spec


class TestSearchSpec:
    """Tests for the search-time training spec."""

    def test_evolution_granularity_reaches_search_network(self, tmp_path: Path) -> None:
        path = tmp_path / "run.yaml"
        path.write_text("evolution:\n  granularity: per-layer\ntrain:\n  layer_widths: [2, 5, 3, 2]\n")
        config = RunConfig.from_yaml(path)

        assert config.train.granularity is Granularity.PER_CHANNEL
        spec = config.search_spec()
        assert spec.granularity is Granularity.PER_LAYER
        network = build_network(spec, parse("p0(tanh(p1(x)))"), np.random.default_rng(0))
        assert [p.shape for p in network.act_params] == [(2, 1), (2, 1)]

    def test_search_spec_defaults_to_train(self) -> None:
        config = RunConfig(train=TrainSpec(granularity=Granularity.PER_NEURON))
        assert config.search_spec() is config.train
