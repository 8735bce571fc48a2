"""Small dense-network trainer that learns activation parameters alongside weights."""

from evoact.trainer.activations import (
    ActivationFunction,
    GraphActivation,
    NativeActivation,
    ScaledActivation,
    as_activation,
)
from evoact.trainer.datasets import Dataset, generate_dataset, load_dataset, read_csv_dataset
from evoact.trainer.evaluation import (
    BenchmarkRow,
    CrossEvalResult,
    benchmark,
    cross_evaluate,
    evaluate_activation,
    fitness_compressed,
    fitness_full,
    sample_study,
    welch_p_value,
    wider_spec,
)
from evoact.trainer.network import Network, build_network
from evoact.trainer.records import EpochStats, FitnessRecord, Status
from evoact.trainer.schedule import boundaries, compress, lr_at
from evoact.trainer.training import NesterovSGD, train

__all__ = [
    "ActivationFunction",
    "BenchmarkRow",
    "CrossEvalResult",
    "Dataset",
    "EpochStats",
    "FitnessRecord",
    "GraphActivation",
    "NativeActivation",
    "NesterovSGD",
    "Network",
    "ScaledActivation",
    "Status",
    "as_activation",
    "benchmark",
    "boundaries",
    "build_network",
    "compress",
    "cross_evaluate",
    "evaluate_activation",
    "fitness_compressed",
    "fitness_full",
    "generate_dataset",
    "load_dataset",
    "lr_at",
    "read_csv_dataset",
    "sample_study",
    "train",
    "welch_p_value",
    "wider_spec",
]
