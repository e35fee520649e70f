"""Objective functions and the evaluation cache.

All objectives are minimised. ML-style objectives report ``1 - accuracy``.
"""

from __future__ import annotations

import math
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping

import numpy as np
from sklearn.model_selection import StratifiedKFold

from .space import Configuration, SearchSpace, bundled_space, decode

#: Mean separation (in units of the per-class standard deviation) of the bundled dataset.
DEFAULT_SEPARATION = 1.5
DEFAULT_DATASET_SEED = 0
CV_FOLDS = 3
CV_SEED = 0


class ObjectiveError(RuntimeError):
    """An objective failed to produce a value for ``config``."""

    def __init__(self, message: str, config: Mapping[str, Any] | None = None):
        super().__init__(message)
        self.config = dict(config) if config is not None else None

    def __str__(self):
        base = super().__str__()
        return f"{base} (config={self.config})" if self.config is not None else base


@dataclass(frozen=True)
class ObjectiveHandle:
    evaluate: Callable[[dict], float]
    description: str = ""
    deterministic: bool = True

    def __call__(self, assignment: dict) -> float:
        return self.evaluate(assignment)


@dataclass
class EvalCache:
    """Memo of objective values keyed by the exact repaired configuration."""

    values: dict = field(default_factory=dict)
    hits: int = 0
    misses: int = 0
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    @staticmethod
    def key(config: Configuration) -> tuple:
        if type(config) is tuple:
            return config
        return tuple(float(x) for x in config)

    def __contains__(self, config) -> bool:
        return self.key(config) in self.values

    def __len__(self) -> int:
        return len(self.values)

    def get(self, config):
        return self.values.get(self.key(config))

    def store(self, config, value: float) -> None:
        with self._lock:
            self.values[self.key(config)] = value


def _call_objective(handle: ObjectiveHandle, assignment: dict) -> float:
    try:
        value = float(handle.evaluate(assignment))
    except ObjectiveError as exc:
        if exc.config is None:
            exc.config = dict(assignment)
        raise
    except Exception as exc:
        raise ObjectiveError(f"objective raised {type(exc).__name__}: {exc}", assignment) from exc
    if math.isnan(value):
        raise ObjectiveError("objective returned NaN", assignment)
    return value


def cached_evaluate(
    cache: EvalCache, handle: ObjectiveHandle, config: Configuration, space: SearchSpace
) -> tuple[float, bool]:
    """Return ``(value, was_hit)``; the objective runs only on a cache miss."""
    key = cache.key(config)
    if key in cache.values:
        cache.hits += 1
        return cache.values[key], True
    value = _call_objective(handle, decode(space, config))
    cache.store(config, value)
    cache.misses += 1
    return value, False


# --------------------------------------------------------------------------
# Benchmark: mixed sphere
# --------------------------------------------------------------------------

def default_sphere_targets(space: SearchSpace) -> tuple[dict, dict]:
    """Targets at the range midpoints; categorical penalty equals the choice index."""
    targets, penalties = {}, {}
    for p in space:
        mid = p.low + 0.5 * (p.high - p.low)
        if p.kind == "continuous":
            targets[p.name] = mid
        elif p.kind == "integer":
            targets[p.name] = float(math.floor(mid + 0.5))
        else:
            penalties[p.name] = [float(i) for i in range(len(p.choices))]
    return targets, penalties


def mixed_sphere_value(space: SearchSpace, assignment: Mapping, targets: Mapping, penalties: Mapping) -> float:
    total = 0.0
    for p in space:
        x = assignment[p.name]
        if p.kind == "continuous":
            total += (float(x) - targets[p.name]) ** 2
        elif p.kind == "integer":
            total += abs(int(x) - targets[p.name])
        else:
            total += penalties[p.name][p.choices.index(x)]
    return total


def builtin_mixed_sphere(
    space: SearchSpace, targets: Mapping | None = None, penalties: Mapping | None = None
) -> ObjectiveHandle:
    """Separable mixed-type bowl.

    ``sum (x_j - c_j)^2`` over continuous dims, ``sum |n_j - n*_j|`` over
    integer dims and a per-choice penalty over categorical dims. Missing
    targets fall back to :func:`default_sphere_targets`.
    """
    dt, dp = default_sphere_targets(space)
    targets = {**dt, **(targets or {})}
    penalties = {**dp, **(penalties or {})}
    for p in space:
        if p.kind == "categorical" and len(penalties[p.name]) != len(p.choices):
            raise ValueError(f"penalty table for {p.name!r} needs {len(p.choices)} entries")

    def evaluate(assignment):
        return mixed_sphere_value(space, assignment, targets, penalties)

    return ObjectiveHandle(evaluate, description="mixed_sphere", deterministic=True)


# --------------------------------------------------------------------------
# Synthetic dataset and cross-validation
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Dataset:
    features: np.ndarray
    labels: np.ndarray
    seed: int

    def __len__(self):
        return len(self.labels)


def generate_dataset(
    seed: int = DEFAULT_DATASET_SEED,
    n_samples: int = 300,
    n_features: int = 5,
    class_separation: float = DEFAULT_SEPARATION,
) -> Dataset:
    """Two unit-variance Gaussian blobs whose means are ``class_separation`` apart.

    Labels are exactly balanced and every feature is standardised to zero
    mean and unit variance.
    """
    if n_samples % 2:
        raise ValueError("n_samples must be even")
    rng = np.random.default_rng(seed)
    half = n_samples // 2
    direction = np.ones(n_features) / math.sqrt(n_features)
    shift = 0.5 * class_separation * direction
    x = rng.standard_normal((n_samples, n_features))
    y = np.repeat([0, 1], half)
    x[:half] -= shift
    x[half:] += shift
    order = rng.permutation(n_samples)
    x, y = x[order], y[order]
    x = (x - x.mean(axis=0)) / x.std(axis=0)
    return Dataset(features=x, labels=y, seed=seed)


def fold_indices(labels: np.ndarray, k: int, seed: int = CV_SEED) -> list[tuple[np.ndarray, np.ndarray]]:
    """Stratified, shuffled train/validation index pairs; depends only on (seed, labels, k)."""
    n = len(labels)
    if k < 2:
        raise ValueError("k must be at least 2")
    if k > n:
        raise ValueError(f"k={k} folds exceeds n_samples={n}")
    splitter = StratifiedKFold(n_splits=k, shuffle=True, random_state=seed)
    return list(splitter.split(np.zeros(n), labels))


def kfold_cv(
    model_factory: Callable[[Mapping], Any],
    dataset: Dataset,
    k: int,
    config: Mapping,
    seed: int = CV_SEED,
    n_jobs: int = 1,
    folds: list | None = None,
) -> float:
    """Mean validation accuracy of ``model_factory(config)`` over ``k`` stratified folds.

    ``folds`` may carry a precomputed :func:`fold_indices` split.
    """
    if folds is None:
        folds = fold_indices(dataset.labels, k, seed)
    x, y = dataset.features, dataset.labels

    def score(fold):
        train, valid = fold
        model = model_factory(config)
        model.fit(x[train], y[train])
        return float(np.mean(model.predict(x[valid]) == y[valid]))

    if n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            scores = list(pool.map(score, folds))
    else:
        scores = [score(f) for f in folds]
    return float(np.mean(scores))


class KNNClassifier:
    """Brute-force k-nearest-neighbour classifier with a Minkowski metric.

    Mirrors scikit-learn's ``KNeighborsClassifier`` voting: with
    ``weights="distance"`` exact matches take all the weight, and vote ties
    go to the smaller label.
    """

    def __init__(self, n_neighbors: int = 5, weights: str = "uniform", p: float = 2.0):
        if weights not in ("uniform", "distance"):
            raise ValueError(f"unknown weighting {weights!r}")
        self.n_neighbors = n_neighbors
        self.weights = weights
        self.p = p

    def fit(self, x, y):
        if self.n_neighbors > len(y):
            raise ValueError(f"n_neighbors={self.n_neighbors} exceeds {len(y)} training samples")
        self.x_ = np.asarray(x, dtype=float)
        self.classes_, self.y_ = np.unique(y, return_inverse=True)
        return self

    def predict(self, x):
        diff = np.abs(np.asarray(x, dtype=float)[:, None, :] - self.x_[None, :, :])
        dist = (diff**self.p).sum(axis=2) ** (1.0 / self.p)
        k = self.n_neighbors
        nearest = np.argpartition(dist, k - 1, axis=1)[:, :k] if k < dist.shape[1] else np.argsort(dist, axis=1)
        d = np.take_along_axis(dist, nearest, axis=1)
        if self.weights == "uniform":
            w = np.ones_like(d)
        else:
            with np.errstate(divide="ignore"):
                w = 1.0 / d
            exact = d == 0
            rows = exact.any(axis=1)
            w[rows] = exact[rows].astype(float)
        votes = np.zeros((len(d), len(self.classes_)))
        np.add.at(votes, (np.arange(len(d))[:, None], self.y_[nearest]), w)
        return self.classes_[np.argmax(votes, axis=1)]


def knn_model(config: Mapping) -> KNNClassifier:
    return KNNClassifier(int(config["k"]), str(config["weighting"]), float(config["p"]))


def builtin_knn_cv(
    space: SearchSpace | None = None,
    dataset: Dataset | None = None,
    k_folds: int = CV_FOLDS,
    cv_seed: int = CV_SEED,
) -> ObjectiveHandle:
    """``1 - mean 3-fold CV accuracy`` of a k-NN classifier on the synthetic dataset."""
    space = space or bundled_space("knn")
    missing = {"k", "weighting", "p"} - set(space.names)
    if missing:
        raise ValueError(f"knn objective needs parameters k, weighting, p; missing {sorted(missing)}")
    data = dataset if dataset is not None else generate_dataset()
    folds = fold_indices(data.labels, k_folds, cv_seed)

    def evaluate(assignment):
        return 1.0 - kfold_cv(knn_model, data, k_folds, assignment, folds=folds)

    return ObjectiveHandle(evaluate, description="knn_cv", deterministic=True)
