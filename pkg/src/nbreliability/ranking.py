"""Reliability orders and their rank-weighted combination.

An order lists instance indices from least to most reliable. Two orders are
combined through each instance's positions ``n_u`` and ``n_e`` in them::

    h = gamma * n_u + (1 - gamma) * n_e

and instances are re-sorted by increasing ``h``; equal ``h`` goes to the
instance with the higher uncertainty score, remaining ties to the lower index.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

GAMMA_GRID_STEP = 0.01
_MAX_GAMMA_DENOMINATOR = 10**6


@dataclass(frozen=True)
class RankOrder:
    order: np.ndarray
    position: np.ndarray

    @classmethod
    def from_order(cls, order) -> "RankOrder":
        order = np.asarray(order, dtype=np.int64)
        position = np.empty_like(order)
        position[order] = np.arange(len(order))
        if not np.array_equal(np.sort(order), np.arange(len(order))):
            raise ValueError("order is not a permutation")
        return cls(order, position)

    def __len__(self) -> int:
        return len(self.order)


@dataclass(frozen=True)
class HybridWeight:
    gamma: float
    grid_step: float
    train_auarc: float


def _finite(scores) -> np.ndarray:
    scores = np.asarray(scores, dtype=float)
    if np.isnan(scores).any():
        raise ValueError("scores contain NaN")
    return scores


def order_by_uncertainty(scores) -> RankOrder:
    """Highest uncertainty first; equal scores keep index order."""
    scores = _finite(scores)
    return RankOrder.from_order(np.lexsort((np.arange(len(scores)), -scores)))


def order_by_robustness(scores) -> RankOrder:
    """Lowest robustness first; equal scores keep index order."""
    scores = _finite(scores)
    return RankOrder.from_order(np.argsort(scores, kind="stable"))


def _as_fraction(gamma) -> Fraction:
    if not 0 <= gamma <= 1:
        raise ValueError(f"gamma must lie in [0, 1], got {gamma}")
    return Fraction(gamma).limit_denominator(_MAX_GAMMA_DENOMINATOR)


def hybrid_order(rank_u: RankOrder, rank_e: RankOrder, u_scores, gamma) -> RankOrder:
    """Order by the weighted mean of two rank positions.

    ``gamma`` is handled as an exact rational so that positions with equal
    weighted means compare equal and fall through to the tie-breaks.
    """
    u_scores = _finite(u_scores)
    n = len(rank_u)
    if len(rank_e) != n or len(u_scores) != n:
        raise ValueError("orders and scores must have equal lengths")
    g = _as_fraction(gamma)
    key = g.numerator * rank_u.position + (g.denominator - g.numerator) * rank_e.position
    return RankOrder.from_order(np.lexsort((np.arange(n), -u_scores, key)))


def gamma_grid(step: float = GAMMA_GRID_STEP) -> np.ndarray:
    """``0, step, 2 step, ..., 1``; both endpoints always included."""
    if not step > 0:
        raise ValueError("grid step must be positive")
    k = int(np.floor(1.0 / step + 1e-9))
    grid = np.round(np.arange(k + 1) * step, 12)
    if grid[-1] < 1.0:
        grid = np.append(grid, 1.0)
    return grid


def train_gamma(records, u_metric: str, e_metric: str, grid_step: float = GAMMA_GRID_STEP) -> HybridWeight:
    """The gamma whose hybrid order has the best AU-ARC on ``records``.

    Ties resolve to the smallest gamma.
    """
    from .arc import auarc_of

    if len(records) == 0:
        raise ValueError("no records to train on")
    u, e = records.scores[u_metric], records.scores[e_metric]
    rank_u, rank_e = order_by_uncertainty(u), order_by_robustness(e)
    correct = records.correct
    grid = gamma_grid(grid_step)
    values = np.array([auarc_of(hybrid_order(rank_u, rank_e, u, g), correct) for g in grid])
    best = int(np.argmax(values))
    return HybridWeight(float(grid[best]), float(grid_step), float(values[best]))
