"""Epsilon-contamination robustness of Naive Bayes predictions.

Global robustness contaminates the joint mass function ``p(c, f)`` as
``(1 - eps) p + eps q`` with an arbitrary ``q``. For a fixed ``f`` the worst
``q`` is a point mass on ``(c', f)`` for the runner-up ``c'``, so the
prediction survives exactly while ``(1 - eps) * delta >= eps`` where ``delta``
is the gap between the two largest joint scores::

    eps_glob = delta / (1 + delta)

Local robustness contaminates the class prior and every per-class
conditional separately, each with the same ``eps``; the result is again a
Naive Bayes model. The predicted class ``c_hat`` is robust at ``eps`` iff its
smallest attainable score beats the largest attainable score of every
competitor::

    (1-eps)^(N+1) prior(c_hat) prod_i cond(f_i|c_hat)
        >= ((1-eps) prior(c') + eps) prod_i ((1-eps) cond(f_i|c') + eps)

The left side decreases and the right side increases in ``eps``, so the flip
point is found by bisection.

Both metrics lie in ``[0, 1)`` and are exactly 0 when the two best classes
tie. The ``oracle_*`` functions recompute both by brute force over an
``eps`` grid and exist for testing.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .nbc import NaiveBayesModel, log_joint

ROBUSTNESS_METRICS = ("eps_glob", "eps_loc")

DEFAULT_TOL = 1e-10
MAX_BISECTIONS = 200
_LOG_EPS_FLOOR = -700.0


@dataclass(frozen=True)
class RobustnessScores:
    eps_glob: float
    eps_loc: float


def _top_two(scores: np.ndarray):
    """Predicted class (lowest index on ties), its score and the runner-up score."""
    if scores.shape[1] < 2:
        raise ValueError("robustness needs at least two classes")
    pred = np.argmax(scores, axis=1)
    rows = np.arange(scores.shape[0])
    best = scores[rows, pred]
    others = scores.copy()
    others[rows, pred] = -np.inf
    return pred, best, others.max(axis=1)


def global_robustness(model: NaiveBayesModel, X) -> np.ndarray:
    """``eps_glob`` for every row of ``X``."""
    _, best, second = _top_two(log_joint(model, X))
    # delta = p1 - p2 without cancellation: p1 * (1 - p2/p1)
    delta = np.exp(best) * -np.expm1(second - best)
    eps = delta / (1.0 + delta)
    return np.where(best == second, 0.0, eps)


def eps_global(model: NaiveBayesModel, f) -> float:
    return float(global_robustness(model, f)[0])


def _local_terms(model: NaiveBayesModel, X):
    X = np.atleast_2d(np.asarray(X, dtype=np.int64))
    scores = log_joint(model, X)
    pred, best, second = _top_two(scores)
    # cond(f_i | c) for all rows, classes and features: (n, |C|, N)
    cond = np.stack([t[:, X[:, i]].T for i, t in enumerate(model.conditionals)], axis=2) \
        if model.n_features else np.ones((X.shape[0], model.n_classes, 0))
    prior = np.broadcast_to(model.class_prior, (X.shape[0], model.n_classes))
    return pred, best, second, prior, cond


def _local_margin(eps, pred, best, prior, cond):
    """log(lower score of c_hat) - max over c' of log(upper score of c')."""
    eps = np.asarray(eps, dtype=float)[:, None]
    n_feat = cond.shape[2]
    with np.errstate(divide="ignore"):
        log_keep = np.log1p(-eps)
    lower = (n_feat + 1) * log_keep[:, 0] + best
    upper = np.log((1 - eps) * prior + eps) + np.log(
        (1 - eps[:, :, None]) * cond + eps[:, :, None]).sum(axis=2)
    upper[np.arange(len(pred)), pred] = -np.inf
    return lower - upper.max(axis=1)


def local_predicate(model: NaiveBayesModel, f, eps: float) -> bool:
    """True when the prediction for ``f`` survives local contamination ``eps``."""
    pred, best, _, prior, cond = _local_terms(model, f)
    return bool(_local_margin(np.array([eps]), pred, best, prior, cond)[0] >= 0)


def local_robustness(model: NaiveBayesModel, X, tol: float = DEFAULT_TOL) -> np.ndarray:
    """``eps_loc`` for every row of ``X``, bisected to within ``tol``.

    The returned value always satisfies the robustness predicate; the
    predicate fails at ``value + tol``.
    """
    if not tol > 0:
        raise ValueError(f"tolerance must be positive, got {tol}")
    pred, best, second, prior, cond = _local_terms(model, X)
    n = len(pred)
    lo, hi = np.zeros(n), np.ones(n)
    for _ in range(MAX_BISECTIONS):
        active = hi - lo > tol
        if not active.any():
            break
        mid = 0.5 * (lo + hi)
        ok = _local_margin(mid, pred, best, prior, cond) >= 0
        lo = np.where(active & ok, mid, lo)
        hi = np.where(active & ~ok, mid, hi)

    tied = best == second
    # flip points below tol: refine on a log scale so that only ties give 0
    small = (lo == 0) & ~tied
    if small.any():
        idx = np.flatnonzero(small)
        a = np.full(len(idx), _LOG_EPS_FLOOR)
        b = np.log(hi[idx])
        args = (pred[idx], best[idx], prior[idx], cond[idx])
        holds = _local_margin(np.exp(a), *args) >= 0
        for _ in range(MAX_BISECTIONS):
            if not (b - a > 1e-10).any():
                break
            mid = 0.5 * (a + b)
            ok = _local_margin(np.exp(mid), *args) >= 0
            a, b = np.where(ok, mid, a), np.where(ok, b, mid)
        lo[idx] = np.where(holds, np.exp(a), 0.0)
    return np.where(tied, 0.0, lo)


def eps_local(model: NaiveBayesModel, f, tol: float = DEFAULT_TOL) -> float:
    return float(local_robustness(model, f, tol)[0])


def _grid(resolution: float) -> np.ndarray:
    return np.arange(0.0, 1.0, resolution)


def _last_safe(grid: np.ndarray, flipped: np.ndarray) -> float:
    if flipped[0]:
        return 0.0
    if not flipped.any():
        return float(grid[-1])
    return float(grid[np.argmax(flipped) - 1])


def oracle_eps_global(model: NaiveBayesModel, f, grid_resolution: float = 1e-4) -> float:
    """Largest grid ``eps`` at which no point-mass contamination flips the prediction.

    Every point mass on ``(c, f)`` is tried, plus mass placed away from ``f``
    (which only rescales all scores).
    """
    p = np.exp(log_joint(model, f)[0])
    pred = int(np.argmax(p))
    grid = _grid(grid_resolution)[:, None]
    flipped = np.zeros(len(grid), dtype=bool)
    targets = [None] + list(range(len(p)))
    for target in targets:
        q = np.zeros(len(p))
        if target is not None:
            q[target] = 1.0
        s = (1 - grid) * p + grid * q
        rivals = np.delete(s, pred, axis=1)
        flipped |= (rivals >= s[:, [pred]]).any(axis=1)
    return _last_safe(grid[:, 0], flipped)


def _vertex_scores(table_rows, f, grid):
    """All products over features of contaminated conditionals at ``f``.

    Each local model ``cond(. | c)`` is mixed with a point mass on one of its
    categories; returns the scores of every vertex combination, shape
    (n_combinations, len(grid)).
    """
    options = []
    for row, v in zip(table_rows, f):
        k = len(row)
        opts = [(1 - grid) * row[v] + grid * (1.0 if u == v else 0.0) for u in range(k)]
        options.append(opts)
    if not options:
        return np.ones((1, len(grid)))
    return np.array([np.prod(combo, axis=0) for combo in itertools.product(*options)])


def oracle_eps_local(model: NaiveBayesModel, f, grid_resolution: float = 1e-4) -> float:
    """Brute-force local robustness by vertex enumeration; tiny models only.

    Scores are multilinear in the contaminating distributions, so extreme
    points of every local neighbourhood suffice.
    """
    if model.n_classes < 2:
        raise ValueError("robustness needs at least two classes")
    f = np.asarray(f, dtype=np.int64).ravel()
    prior = model.class_prior
    pred = int(np.argmax(log_joint(model, f)[0]))
    grid = _grid(grid_resolution)
    flipped = np.zeros(len(grid), dtype=bool)
    pred_rows = [t[pred] for t in model.conditionals]
    pred_min = _vertex_scores(pred_rows, f, grid).min(axis=0)
    for rival in range(model.n_classes):
        if rival == pred:
            continue
        rival_max = _vertex_scores([t[rival] for t in model.conditionals], f, grid).max(axis=0)
        for k in range(model.n_classes):
            pi_pred = (1 - grid) * prior[pred] + grid * (k == pred)
            pi_rival = (1 - grid) * prior[rival] + grid * (k == rival)
            flipped |= pi_rival * rival_max >= pi_pred * pred_min
    return _last_safe(grid, flipped)
