"""Categorical Naive Bayes with additive smoothing.

Every probability table is smoothed with one shared ``alpha``::

    prior(c)     = (count(c) + alpha) / (n + alpha * |C|)
    cond(v | c)  = (count(v, c) + alpha) / (count(c) + alpha * |F_i|)

so all stored probabilities are strictly positive. Scores are handled in log
space; ``log_joint`` is the workhorse used by the metric modules.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .data import DiscreteDataset, FeatureDomain

DEFAULT_SMOOTHING_GRID = (0.001, 0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0)


@dataclass(frozen=True)
class NaiveBayesModel:
    class_prior: np.ndarray
    conditionals: tuple[np.ndarray, ...]  # one (|C|, |F_i|) table per feature
    smoothing: float
    domain: FeatureDomain

    @property
    def n_classes(self) -> int:
        return self.class_prior.shape[0]

    @property
    def n_features(self) -> int:
        return len(self.conditionals)

    @property
    def log_prior(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.log(self.class_prior)

    @property
    def log_conditionals(self) -> tuple[np.ndarray, ...]:
        with np.errstate(divide="ignore"):
            return tuple(np.log(t) for t in self.conditionals)


@dataclass(frozen=True)
class PosteriorDistribution:
    probabilities: np.ndarray
    predicted_class: int


@dataclass(frozen=True)
class ModelEnsemble:
    members: tuple[NaiveBayesModel, ...]
    bootstrap_seed: int

    @property
    def size(self) -> int:
        return len(self.members)


def train(data: DiscreteDataset, alpha: float) -> NaiveBayesModel:
    if len(data) == 0:
        raise ValueError("cannot train on an empty dataset")
    if not alpha > 0:
        raise ValueError(f"smoothing must be positive, got {alpha}")
    return _train_counts(data.X, data.y, data.domain, float(alpha))


def _train_counts(X, y, domain: FeatureDomain, alpha: float) -> NaiveBayesModel:
    n_classes = domain.n_classes
    class_counts = np.bincount(y, minlength=n_classes).astype(float)
    prior = (class_counts + alpha) / (len(y) + alpha * n_classes)
    tables = []
    for i, k in enumerate(domain.cardinalities):
        counts = np.zeros((n_classes, k))
        np.add.at(counts, (y, X[:, i]), 1.0)
        tables.append((counts + alpha) / (class_counts[:, None] + alpha * k))
    for t in (prior, *tables):
        t.setflags(write=False)
    return NaiveBayesModel(prior, tuple(tables), alpha, domain)


def _check_features(model: NaiveBayesModel, X: np.ndarray) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=np.int64))
    if X.shape[1] != model.n_features:
        raise ValueError(f"expected {model.n_features} features, got {X.shape[1]}")
    card = np.asarray(model.domain.cardinalities)
    if X.size and ((X < 0).any() or (X >= card).any()):
        raise IndexError("feature index outside its domain")
    return X


def log_joint(model: NaiveBayesModel, X) -> np.ndarray:
    """``log p(c, f)`` for every row of ``X`` and every class, shape (n, |C|)."""
    X = _check_features(model, X)
    out = np.tile(model.log_prior, (X.shape[0], 1))
    for i, table in enumerate(model.log_conditionals):
        out += table[:, X[:, i]].T
    return out


def joint_score(model: NaiveBayesModel, c: int, f) -> float:
    """The generative mass ``prior(c) * prod_i cond(f_i | c)``."""
    if not 0 <= c < model.n_classes:
        raise IndexError(f"class index {c} out of range")
    return float(np.exp(log_joint(model, f)[0, c]))


def normalize_log(scores: np.ndarray) -> np.ndarray:
    """Row-wise softmax after max subtraction."""
    shifted = scores - scores.max(axis=-1, keepdims=True)
    p = np.exp(shifted)
    return p / p.sum(axis=-1, keepdims=True)


def predict_proba(model: NaiveBayesModel, X) -> np.ndarray:
    return normalize_log(log_joint(model, X))


def predict(model: NaiveBayesModel, X) -> np.ndarray:
    # argmax returns the first maximum: ties go to the lowest class index
    return np.argmax(log_joint(model, X), axis=1)


def posterior(model: NaiveBayesModel, f) -> PosteriorDistribution:
    scores = log_joint(model, f)
    return PosteriorDistribution(normalize_log(scores)[0], int(np.argmax(scores[0])))


def accuracy(model: NaiveBayesModel, data: DiscreteDataset) -> float:
    return float(np.mean(predict(model, data.X) == data.y))


def fold_indices(n: int, folds: int, seed: int) -> list[np.ndarray]:
    """Seeded shuffle cut into ``folds`` near-equal parts."""
    perm = np.random.default_rng(seed).permutation(n)
    return np.array_split(perm, folds)


def select_smoothing(
    train_data: DiscreteDataset,
    grid: Sequence[float] = DEFAULT_SMOOTHING_GRID,
    folds: int = 5,
    cv_seed: int = 0,
) -> float:
    """Pick the smoothing with the best mean k-fold accuracy.

    Ties resolve to the smallest value in ``grid``.
    """
    if folds < 2:
        raise ValueError("at least two folds are required")
    if len(grid) == 0:
        raise ValueError("smoothing grid is empty")
    n = len(train_data)
    parts = fold_indices(n, folds, cv_seed)
    if any(len(p) == 0 or len(p) == n for p in parts):
        raise ValueError(f"{n} instances cannot fill {folds} non-empty folds")

    X, y, domain = train_data.X, train_data.y, train_data.domain
    scores = {}
    for alpha in sorted(set(float(a) for a in grid)):
        if not alpha > 0:
            raise ValueError(f"smoothing must be positive, got {alpha}")
        correct = []
        for held in parts:
            mask = np.ones(n, dtype=bool)
            mask[held] = False
            model = _train_counts(X[mask], y[mask], domain, alpha)
            correct.append(np.mean(predict(model, X[held]) == y[held]))
        scores[alpha] = float(np.mean(correct))
    best = max(scores.values())
    return min(a for a, s in scores.items() if s == best)


def bootstrap_ensemble(
    train_data: DiscreteDataset, alpha: float, size: int = 25, seed: int = 0
) -> ModelEnsemble:
    """Bagging: member ``m`` is fit on a resample drawn from stream ``seed ^ m``."""
    if size < 2:
        raise ValueError("an ensemble needs at least two members")
    if len(train_data) == 0:
        raise ValueError("cannot train on an empty dataset")
    if not alpha > 0:
        raise ValueError(f"smoothing must be positive, got {alpha}")
    n = len(train_data)
    members = []
    for m in range(size):
        idx = np.random.default_rng(seed ^ m).integers(0, n, size=n)
        members.append(
            _train_counts(train_data.X[idx], train_data.y[idx], train_data.domain, float(alpha))
        )
    return ModelEnsemble(tuple(members), seed)


def ensemble_proba(ensemble: ModelEnsemble, X) -> np.ndarray:
    """Member posteriors stacked as (M, n, |C|)."""
    return np.stack([predict_proba(m, X) for m in ensemble.members])


def dump_model(model: NaiveBayesModel) -> str:
    """Plain-text table of all probabilities with 17 significant digits."""
    d = model.domain
    lines = [f"smoothing {model.smoothing:.16e}"]
    for c, p in zip(d.classes, model.class_prior):
        lines.append(f"prior\t{c}\t{p:.16e}")
    for name, values, table in zip(d.feature_names, d.feature_values, model.conditionals):
        for ci, c in enumerate(d.classes):
            for v, p in zip(values, table[ci]):
                lines.append(f"cond\t{name}\t{v}\t{c}\t{p:.16e}")
    return "\n".join(lines) + "\n"
