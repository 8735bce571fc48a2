"""Desk-scale classification datasets with stratified train/val/test splits."""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import pandas as pd
from sklearn.datasets import make_blobs, make_circles
from sklearn.model_selection import train_test_split
from sklearn.preprocessing import StandardScaler

from evoact.config import DatasetRef
from evoact.errors import DatasetError

logger = logging.getLogger(__name__)

SPIRAL_TURNS = 2
SPIRAL_START = np.pi / 2
BLOB_RADIUS = 5.0


@dataclass(frozen=True)
class Dataset:
    """Standardized feature matrices and integer labels for each split."""

    x_train: np.ndarray
    y_train: np.ndarray
    x_val: np.ndarray
    y_val: np.ndarray
    x_test: np.ndarray
    y_test: np.ndarray
    classes: int

    @property
    def n_features(self) -> int:
        return self.x_train.shape[1]


def _class_counts(total: int, classes: int) -> list[int]:
    base, extra = divmod(total, classes)
    return [base + (1 if c < extra else 0) for c in range(classes)]


def _two_spirals(counts: list[int], noise: float, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    features, labels = [], []
    for label, count in enumerate(counts):
        # whole turns with uniform angle: every half-plane through the origin holds half of each arm
        theta = rng.uniform(SPIRAL_START, SPIRAL_START + SPIRAL_TURNS * 2 * np.pi, size=count)
        arm = np.column_stack([theta * np.cos(theta), theta * np.sin(theta)])
        if label == 1:
            arm = -arm
        features.append(arm + rng.normal(0.0, noise, size=arm.shape))
        labels.append(np.full(count, label))
    return np.vstack(features), np.concatenate(labels)


def _checkerboard(counts: list[int], noise: float, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    features, labels = [], []
    for label, count in enumerate(counts):
        kept = np.empty((0, 2))
        while len(kept) < count:
            points = rng.uniform(-2.0, 2.0, size=(4 * count, 2))
            cell = (np.floor(points[:, 0]) + np.floor(points[:, 1])).astype(int) % 2
            kept = np.vstack([kept, points[cell == label]])
        kept = kept[:count]
        features.append(kept + rng.normal(0.0, noise, size=kept.shape))
        labels.append(np.full(count, label))
    return np.vstack(features), np.concatenate(labels)


def _blobs(counts: list[int], noise: float, seed: int) -> tuple[np.ndarray, np.ndarray]:
    angles = 2 * np.pi * np.arange(len(counts)) / len(counts)
    centers = BLOB_RADIUS * np.column_stack([np.cos(angles), np.sin(angles)])
    return make_blobs(n_samples=counts, centers=centers, cluster_std=1.0 + noise, random_state=seed)


def _circles(counts: list[int], noise: float, seed: int) -> tuple[np.ndarray, np.ndarray]:
    return make_circles(n_samples=(counts[0], counts[1]), noise=noise, factor=0.5, random_state=seed)


def read_csv_dataset(path) -> tuple[np.ndarray, np.ndarray]:
    """Header row, numeric feature columns, integer class label in the last column."""
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    except FileNotFoundError as e:
        raise DatasetError("file not found", path=path) from e
    except pd.errors.EmptyDataError as e:
        raise DatasetError("empty file", path=path) from e
    except pd.errors.ParserError as e:
        match = re.search(r"line (\d+)", str(e))
        raise DatasetError(f"malformed row: {e}", line=int(match.group(1)) if match else None, path=path) from e

    if frame.shape[1] < 2:
        raise DatasetError("need at least one feature column and a label column", line=1, path=path)
    if frame.empty:
        raise DatasetError("no data rows", line=2, path=path)

    numeric = frame.apply(pd.to_numeric, errors="coerce")
    bad_rows, bad_cols = np.nonzero(numeric.isna().to_numpy())
    if len(bad_rows):
        row, col = int(bad_rows[0]), int(bad_cols[0])
        raise DatasetError(
            f"non-numeric value {frame.iat[row, col]!r} in column {frame.columns[col]!r}",
            line=row + 2,
            path=path,
        )

    labels = numeric.iloc[:, -1].to_numpy()
    not_integer = np.nonzero(labels != np.round(labels))[0]
    if len(not_integer):
        row = int(not_integer[0])
        raise DatasetError(f"class label {frame.iat[row, frame.shape[1] - 1]!r} is not an integer", line=row + 2, path=path)

    _, encoded = np.unique(labels.astype(np.int64), return_inverse=True)
    return numeric.iloc[:, :-1].to_numpy(dtype=np.float64), encoded


def generate_dataset(ref: DatasetRef) -> Dataset:
    """Build the dataset a reference describes; deterministic in `ref.seed`."""
    sizes = ref.sizes
    total = sizes.train + sizes.val + sizes.test
    rng = np.random.default_rng(ref.seed)

    if ref.kind == "csv":
        features, labels = read_csv_dataset(ref.path)
    else:
        counts = _class_counts(total, ref.classes)
        if ref.kind == "two_spirals":
            features, labels = _two_spirals(counts, ref.noise, rng)
        elif ref.kind == "checkerboard":
            features, labels = _checkerboard(counts, ref.noise, rng)
        elif ref.kind == "blobs":
            features, labels = _blobs(counts, ref.noise, ref.seed)
        else:
            features, labels = _circles(counts, ref.noise, ref.seed)

    classes = int(labels.max()) + 1
    if np.min(np.bincount(labels)) < 3:
        raise DatasetError("every class needs at least three examples", path=ref.path)
    test_fraction = sizes.test / total
    val_fraction = sizes.val / (sizes.train + sizes.val)
    try:
        x_rest, x_test, y_rest, y_test = train_test_split(
            features, labels, test_size=test_fraction, stratify=labels, random_state=ref.seed
        )
        x_train, x_val, y_train, y_val = train_test_split(
            x_rest, y_rest, test_size=val_fraction, stratify=y_rest, random_state=ref.seed
        )
    except ValueError as e:
        raise DatasetError(f"cannot split dataset: {e}", path=ref.path) from e

    scaler = StandardScaler().fit(x_train)
    logger.debug("Dataset %s: %d/%d/%d examples, %d classes", ref.kind, len(y_train), len(y_val), len(y_test), classes)
    return Dataset(
        x_train=scaler.transform(x_train),
        y_train=np.asarray(y_train, dtype=np.int64),
        x_val=scaler.transform(x_val),
        y_val=np.asarray(y_val, dtype=np.int64),
        x_test=scaler.transform(x_test),
        y_test=np.asarray(y_test, dtype=np.int64),
        classes=classes,
    )


@lru_cache(maxsize=16)
def _cached(ref_json: str) -> Dataset:
    return generate_dataset(DatasetRef.model_validate_json(ref_json))


def load_dataset(ref: DatasetRef) -> Dataset:
    """`generate_dataset` with a small cache; datasets are never mutated."""
    return _cached(ref.model_dump_json())
