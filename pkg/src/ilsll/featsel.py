"""Wrapper feature selection: CSV ingestion, 70/30 split, 3-NN scoring,
the accuracy-plus-sparsity fitness, and the synthetic interaction dataset
generator."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .core import Problem, make_rng

KNN_K = 3


class IngestionError(ValueError):
    """CSV could not be turned into a numeric dataset."""


@dataclass
class Dataset:
    features: np.ndarray  # n_ex x n_features, float64
    targets: np.ndarray  # int labels (classification) or floats in [0,1]
    task: str  # "classification" | "regression"
    feature_names: list

    @property
    def n_features(self):
        return self.features.shape[1]

    @property
    def n_examples(self):
        return self.features.shape[0]

    @property
    def n_classes(self):
        if self.task != "classification":
            raise ValueError("n_classes only defined for classification")
        return int(self.targets.max()) + 1 if len(self.targets) else 0


def load_dataset(path, task, target_column=None):
    """Read a headered numeric CSV into a Dataset.

    target_column is a 0-based column index or a header name; default is the
    last column.  Class labels map to dense 0-based indices in order of first
    appearance; regression targets are min-max scaled to [0,1].
    """
    if task not in ("classification", "regression"):
        raise IngestionError(f"unknown task: {task!r}")
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        rows = list(reader)
    if not rows or len(rows) < 2:
        raise IngestionError(f"{path}: empty or header-only file")
    header = rows[0]
    if target_column is None:
        tcol = len(header) - 1
    elif isinstance(target_column, str):
        if target_column not in header:
            raise IngestionError(f"{path}: no column named {target_column!r}")
        tcol = header.index(target_column)
    else:
        tcol = int(target_column)
        if not 0 <= tcol < len(header):
            raise IngestionError(f"{path}: target column {tcol} out of range")

    feature_names = [h for i, h in enumerate(header) if i != tcol]
    features = []
    raw_targets = []
    for rownum, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise IngestionError(f"{path}: row {rownum} has {len(row)} cells")
        vals = []
        for colnum, cell in enumerate(row):
            try:
                v = float(cell)
            except ValueError:
                raise IngestionError(
                    f"{path}: non-numeric cell at row {rownum}, column {colnum + 1}"
                ) from None
            if colnum == tcol:
                raw_targets.append(v)
            else:
                vals.append(v)
        features.append(vals)
    features = np.asarray(features, dtype=np.float64)

    if task == "classification":
        seen = {}
        labels = []
        for v in raw_targets:
            if v not in seen:
                seen[v] = len(seen)
            labels.append(seen[v])
        targets = np.asarray(labels, dtype=np.int64)
    else:
        t = np.asarray(raw_targets, dtype=np.float64)
        span = t.max() - t.min()
        targets = (t - t.min()) / span if span > 0 else np.zeros_like(t)
    return Dataset(features=features, targets=targets, task=task, feature_names=feature_names)


class FsInstance:
    """A seed-determined 70/30 split plus the 3-NN scorer.

    Features are z-scored with training-set statistics (zero-variance
    features contribute no distance).  Predictions are fully deterministic:
    neighbor ties break by training-row index, vote ties by class index.
    """

    def __init__(self, dataset, seed):
        if dataset.n_examples < 10:
            raise ValueError("need at least 10 examples to split")
        self.task = dataset.task
        self.k_neighbors = KNN_K
        self.split_seed = seed
        seed_path = seed if isinstance(seed, (tuple, list)) else (seed,)
        order = make_rng(*seed_path).permutation(dataset.n_examples)
        n_train = int(0.7 * dataset.n_examples)
        self.train_idx = order[:n_train]
        self.test_idx = order[n_train:]
        self.train_x = dataset.features[self.train_idx]
        self.train_y = dataset.targets[self.train_idx]
        self.test_x = dataset.features[self.test_idx]
        self.test_y = dataset.targets[self.test_idx]
        self.n_features = dataset.n_features

        self.mean = self.train_x.mean(axis=0)
        std = self.train_x.std(axis=0)
        std[std == 0] = np.inf  # constant feature -> zero distance everywhere
        self.scale = 1.0 / std
        self._train_std = (self.train_x - self.mean) * self.scale
        self._test_std = (self.test_x - self.mean) * self.scale
        if self.task == "classification":
            counts = np.bincount(self.train_y)
            self._fallback = int(np.argmax(counts))
        else:
            self._fallback = float(self.train_y.mean())
        self._cache = {}

    def _predict_std(self, mask, rows_std):
        """3-NN predictions for standardized query rows under a feature mask."""
        sel = np.nonzero(mask)[0]
        if len(sel) == 0:
            return np.full(len(rows_std), self._fallback)
        d2 = ((rows_std[:, None, sel] - self._train_std[None, :, sel]) ** 2).sum(axis=2)
        # stable sort: equal distances resolve to the smaller training row
        nn = np.argsort(d2, axis=1, kind="stable")[:, : self.k_neighbors]
        if self.task == "classification":
            votes = self.train_y[nn]
            preds = np.empty(len(rows_std), dtype=np.int64)
            for i, row in enumerate(votes):
                preds[i] = np.argmax(np.bincount(row))  # argmax: smallest class wins
            return preds
        return self.train_y[nn].mean(axis=1)

    def knn_predict(self, mask, query_row):
        """Prediction for one raw (unstandardized) feature vector."""
        mask = np.asarray(mask)
        if len(mask) != self.n_features:
            raise ValueError("mask length must equal the feature count")
        row = (np.asarray(query_row, dtype=np.float64) - self.mean) * self.scale
        pred = self._predict_std(mask, row[None, :])[0]
        return int(pred) if self.task == "classification" else float(pred)

    def evaluate(self, bits):
        """Two-term fitness: 0.98 * test performance + 0.02 * sparsity bonus.

        Memoized on the bit pattern; 3-NN dominates the cost and revisited
        masks must replay exactly.
        """
        key = bytes(bits)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        preds = self._predict_std(bits, self._test_std)
        if self.task == "classification":
            f1 = float(np.mean(preds == self.test_y))
        else:
            mse = float(np.mean((preds - self.test_y) ** 2))
            f1 = max(0.0, 1.0 - mse)
        n = self.n_features
        value = 0.98 * f1 + 0.02 * (n - int(np.sum(bits))) / n
        self._cache[key] = value
        return value


class FsProblem(Problem):
    """Problem adapter over a split: bits select features."""

    kind = "feature-selection"

    def __init__(self, instance):
        self.instance = instance
        self.n = instance.n_features

    def evaluate(self, bits):
        if len(bits) != self.n:
            raise ValueError(f"expected {self.n} bits, got {len(bits)}")
        return self.instance.evaluate(np.asarray(bits, dtype=np.uint8))


def fs_evaluate(instance, bits):
    return instance.evaluate(np.asarray(bits, dtype=np.uint8))


def make_split(dataset, seed):
    return FsInstance(dataset, seed)


FRIEDMAN_N_FEATURES = 100
FRIEDMAN_LEVELS = 11  # grid {0.0, 0.1, ..., 1.0}


def friedman_target(u):
    """Noise-free synthetic target; depends only on inputs 0..7."""
    u = np.asarray(u, dtype=np.float64)
    single = u.ndim == 1
    if single:
        u = u[None, :]
    f = (
        9.0 * np.exp(-3.0 * (1.0 - u[:, 0]) ** 2)
        * np.exp(-3.0 * (1.0 - u[:, 1]) ** 2)
        * np.exp(-3.0 * (1.0 - u[:, 2]) ** 2)
        - 0.8 * np.exp(-2.0 * (u[:, 3] - u[:, 4]))
        + 2.0 * np.sin(np.pi * u[:, 5]) ** 2
        - 2.5 * (u[:, 6] - u[:, 7])
    )
    return float(f[0]) if single else f


def friedman_samples(n_ex, rng):
    """Draw inputs, noise-free targets, and noisy targets.

    Inputs are uniform over the 11-level grid on [0,1]; noise is Gaussian
    with variance set to half the sample variance of the noise-free target
    (two-to-one signal-to-noise).
    """
    if n_ex < 2:
        raise ValueError("need at least 2 examples")
    u = rng.integers(0, FRIEDMAN_LEVELS, size=(n_ex, FRIEDMAN_N_FEATURES)) / (
        FRIEDMAN_LEVELS - 1
    )
    clean = friedman_target(u)
    sigma = float(np.sqrt(np.var(clean, ddof=1) / 2.0))
    noisy = clean + rng.normal(0.0, sigma, size=n_ex)
    return u, clean, noisy, sigma


def friedman_generate(n_ex, rng):
    """Synthetic regression Dataset (targets min-max scaled to [0,1])."""
    u, _, noisy, _ = friedman_samples(n_ex, rng)
    span = noisy.max() - noisy.min()
    targets = (noisy - noisy.min()) / span if span > 0 else np.zeros_like(noisy)
    names = [f"u{i}" for i in range(FRIEDMAN_N_FEATURES)]
    return Dataset(features=u, targets=targets, task="regression", feature_names=names)


def write_dataset_csv(path, features, targets, feature_names, target_name="target"):
    """CSV with the target column last, LF endings, '.' decimals."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(list(feature_names) + [target_name])
        for row, t in zip(features, targets):
            writer.writerow([repr(float(v)) for v in row] + [repr(float(t))])
