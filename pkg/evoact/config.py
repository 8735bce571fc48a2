"""Configuration management for evoact."""

from __future__ import annotations

import os
from enum import Enum
from pathlib import Path
from typing import Literal

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from evoact.errors import ConfigError

OUTPUT_DIR_ENV = "EVOACT_OUTPUT_DIR"


class Granularity(str, Enum):
    """How learnable activation parameters are shared."""

    PER_LAYER = "per-layer"
    PER_CHANNEL = "per-channel"
    PER_NEURON = "per-neuron"


class SearchMode(str, Enum):
    """How fitness evaluations are scheduled."""

    SEQUENTIAL = "sequential"
    ASYNCHRONOUS = "asynchronous"


class StrictModel(BaseModel):
    """Base model that rejects unknown keys."""

    model_config = ConfigDict(extra="forbid", populate_by_name=True)


class EvolutionConfig(StrictModel):
    """Regularized evolution settings."""

    population_size: int = Field(64, alias="P", ge=1)
    sample_size: int = Field(16, alias="S", ge=1)
    budget: int = Field(1000, alias="C", ge=1)
    threshold: float = Field(0.2, alias="V")
    # overrides train.granularity during search and rerank
    granularity: Granularity | None = None
    parameterize: bool = True
    seed: int = Field(0, ge=0, lt=2**64)
    mode: SearchMode = SearchMode.SEQUENTIAL

    @model_validator(mode="after")
    def _check_sizes(self) -> EvolutionConfig:
        if not self.sample_size <= self.population_size <= self.budget:
            raise ValueError("require 1 <= S <= P <= C")
        if not 0.0 <= self.threshold < 1.0:
            raise ValueError("require 0 <= V < 1")
        return self

    @classmethod
    def random_search(cls, **overrides) -> EvolutionConfig:
        """Random-search baseline: P = 1, S = 1, V = 0."""
        overrides.update(population_size=1, sample_size=1, threshold=0.0)
        return cls(**overrides)


class Warmup(StrictModel):
    """Constant learning rate held for the first epochs."""

    lr: float = Field(gt=0)
    epochs: int = Field(ge=1)


class LrSchedule(StrictModel):
    """Step learning-rate schedule with optional warmup."""

    base_lr: float = Field(0.1, gt=0)
    milestones: list[int] = Field(default_factory=lambda: [18, 36, 48])
    decay: float = 0.2
    total_epochs: int = Field(60, ge=1)
    warmup: Warmup | None = None

    @model_validator(mode="after")
    def _check_milestones(self) -> LrSchedule:
        if not 0.0 < self.decay < 1.0:
            raise ValueError("decay must lie in (0, 1)")
        previous = -1
        for milestone in self.milestones:
            if milestone <= previous:
                raise ValueError("milestones must be strictly increasing")
            previous = milestone
        if self.milestones and (self.milestones[0] < 0 or self.milestones[-1] >= self.total_epochs):
            raise ValueError("milestones must lie in [0, total_epochs)")
        return self

    @classmethod
    def desk(cls) -> LrSchedule:
        """Default desk-scale schedule (60 epochs, milestones at 0.3/0.6/0.8)."""
        return cls()

    @classmethod
    def wrn(cls) -> LrSchedule:
        """Wide residual network schedule."""
        return cls(base_lr=0.1, milestones=[60, 120, 160], decay=0.2, total_epochs=200)

    @classmethod
    def resnet_v1(cls) -> LrSchedule:
        """Residual network schedule with a one-epoch warmup."""
        return cls(
            base_lr=0.1,
            milestones=[91, 137],
            decay=0.1,
            total_epochs=200,
            warmup=Warmup(lr=0.01, epochs=1),
        )

    @classmethod
    def resnet_v2(cls) -> LrSchedule:
        """Preactivation residual network schedule (no warmup)."""
        return cls(base_lr=0.1, milestones=[91, 137], decay=0.1, total_epochs=200)


class DatasetSizes(StrictModel):
    """Split sizes."""

    train: int = Field(400, ge=1)
    val: int = Field(200, ge=1)
    test: int = Field(200, ge=1)


class DatasetRef(StrictModel):
    """Reference to a desk-scale classification dataset."""

    kind: Literal["two_spirals", "blobs", "circles", "checkerboard", "csv"] = "two_spirals"
    sizes: DatasetSizes = Field(default_factory=DatasetSizes)
    classes: int = Field(2, ge=2)
    noise: float = Field(0.0, ge=0)
    seed: int = Field(0, ge=0)
    path: Path | None = None

    @model_validator(mode="after")
    def _check_path(self) -> DatasetRef:
        if self.kind == "csv" and self.path is None:
            raise ValueError("csv datasets require a path")
        if self.kind in ("two_spirals", "circles", "checkerboard") and self.classes != 2:
            raise ValueError(f"{self.kind} datasets have exactly 2 classes")
        return self


class TrainSpec(StrictModel):
    """Defines one fitness evaluation."""

    layer_widths: list[int] = Field(default_factory=lambda: [2, 16, 16, 2])
    dataset: DatasetRef = Field(default_factory=DatasetRef)
    schedule: LrSchedule = Field(default_factory=LrSchedule.desk)
    momentum: float = Field(0.9, ge=0, lt=1)
    l2: float = Field(5e-4, ge=0)
    batch_size: int = Field(32, ge=1)
    granularity: Granularity = Granularity.PER_CHANNEL
    seed: int = Field(0, ge=0)
    compress_factor: int = Field(2, ge=1)

    @model_validator(mode="after")
    def _check_widths(self) -> TrainSpec:
        if len(self.layer_widths) < 3:
            raise ValueError("layer_widths needs input, at least one hidden layer, and classes")
        if any(width < 1 for width in self.layer_widths):
            raise ValueError("layer widths must be positive")
        return self

    @property
    def hidden_widths(self) -> list[int]:
        return self.layer_widths[1:-1]


class RerankConfig(StrictModel):
    """Reranking of the top functions with full training runs."""

    top_n: int = Field(10, ge=1)
    runs: int = Field(2, ge=1)
    keep: int = Field(3, ge=1)


class DistribConfig(StrictModel):
    """Coordinator/worker settings."""

    bind: str = "127.0.0.1:5555"
    heartbeat_interval: float = Field(2.0, gt=0)
    task_deadline: float = Field(30.0, gt=0)
    connect_retries: int = Field(5, ge=0)
    backoff_seconds: float = Field(0.5, gt=0)


class CrossEvalConfig(StrictModel):
    """Cross-evaluation settings."""

    seeds: int = Field(2, ge=1)
    wider_factor: int = Field(2, ge=1)


class OutputConfig(StrictModel):
    """Where results are written."""

    directory: Path = Path("results")
    overwrite: bool = False


class RunConfig(StrictModel):
    """Main configuration for evoact."""

    evolution: EvolutionConfig = Field(default_factory=EvolutionConfig)
    train: TrainSpec = Field(default_factory=TrainSpec)
    rerank: RerankConfig = Field(default_factory=RerankConfig)
    distrib: DistribConfig = Field(default_factory=DistribConfig)
    cross_eval: CrossEvalConfig = Field(default_factory=CrossEvalConfig)
    output: OutputConfig = Field(default_factory=OutputConfig)

    @classmethod
    def load(cls, config_path: Path | None = None) -> RunConfig:
        """Load configuration from file or defaults.

        Looks for config in:
        1. Specified path
        2. ./evoact.yaml
        3. ./.evoact.yaml
        4. ~/.config/evoact/config.yaml
        5. Falls back to defaults

        The EVOACT_OUTPUT_DIR environment variable overrides output.directory.
        """
        paths_to_try: list[Path] = []

        if config_path:
            if not config_path.exists():
                raise ConfigError("configuration file not found", path=config_path)
            paths_to_try.append(config_path)

        paths_to_try.extend(
            [
                Path.cwd() / "evoact.yaml",
                Path.cwd() / ".evoact.yaml",
                Path.home() / ".config" / "evoact" / "config.yaml",
            ]
        )

        config = cls()
        for path in paths_to_try:
            if path.exists():
                config = cls.from_yaml(path)
                break

        env_dir = os.environ.get(OUTPUT_DIR_ENV)
        if env_dir:
            config.output.directory = Path(env_dir)
        return config

    @classmethod
    def from_yaml(cls, path: Path) -> RunConfig:
        """Load configuration from a YAML file."""
        try:
            with open(path) as f:
                data = yaml.safe_load(f) or {}
        except yaml.YAMLError as e:
            raise ConfigError(f"invalid YAML: {e}", path=path) from e
        try:
            return cls.model_validate(data)
        except ValidationError as e:
            raise ConfigError(str(e), path=path) from e

    def search_spec(self) -> TrainSpec:
        """Training spec used for search fitness, with `evolution.granularity` applied."""
        if self.evolution.granularity is None:
            return self.train
        return self.train.model_copy(update={"granularity": self.evolution.granularity})

    def to_yaml(self, path: Path) -> None:
        """Save configuration to a YAML file."""
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w") as f:
            yaml.safe_dump(self.model_dump(mode="json"), f, default_flow_style=False, sort_keys=False)

    def resolved(self) -> dict:
        """JSON-compatible dump used in provenance headers."""
        return self.model_dump(mode="json")
