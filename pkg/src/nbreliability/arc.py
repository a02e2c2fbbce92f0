"""Accuracy-rejection curves.

Instances are rejected one at a time following an order (least reliable
first); after ``k`` rejections the curve records the accuracy of the
``n - k`` instances still retained, for ``k = 0 .. n-1``. The area under the
curve (AU-ARC) is the plain mean of those accuracies.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ranking import RankOrder


@dataclass(frozen=True)
class AccuracyRejectionCurve:
    accuracies: np.ndarray

    @property
    def auarc(self) -> float:
        return au_arc(self)

    @property
    def rejection_rates(self) -> np.ndarray:
        n = len(self.accuracies)
        return np.arange(n) / n


@dataclass(frozen=True)
class ReliabilityRecords:
    """Column-wise reliability records for a batch of instances.

    ``scores`` maps metric names (``u_m`` ... ``eps_loc``) to arrays aligned
    with ``predicted`` and ``true``.
    """

    predicted: np.ndarray
    true: np.ndarray
    scores: dict

    @property
    def correct(self) -> np.ndarray:
        return self.predicted == self.true

    def __len__(self) -> int:
        return len(self.predicted)

    def record(self, i: int) -> dict:
        """One instance as a flat mapping."""
        out = {
            "index": i,
            "predicted": int(self.predicted[i]),
            "true": int(self.true[i]),
            "correct": bool(self.predicted[i] == self.true[i]),
        }
        out.update({k: float(v[i]) for k, v in self.scores.items()})
        return out


def _order_array(order) -> np.ndarray:
    return order.order if isinstance(order, RankOrder) else np.asarray(order, dtype=np.int64)


def arc(order, correct) -> AccuracyRejectionCurve:
    order = _order_array(order)
    correct = np.asarray(correct, dtype=bool)
    n = len(correct)
    if n == 0:
        raise ValueError("an accuracy-rejection curve needs at least one instance")
    if len(order) != n:
        raise ValueError(f"order has {len(order)} entries for {n} instances")
    in_order = correct[order]
    # correct instances among order[k:], for every k
    retained_correct = np.cumsum(in_order[::-1])[::-1]
    return AccuracyRejectionCurve(retained_correct / np.arange(n, 0, -1))


def au_arc(curve: AccuracyRejectionCurve) -> float:
    if len(curve.accuracies) == 0:
        raise ValueError("empty curve")
    return float(np.mean(curve.accuracies))


def auarc_of(order, correct) -> float:
    return au_arc(arc(order, correct))


def ideal_order(correct) -> RankOrder:
    """Every misclassified instance before every correct one, stable within groups."""
    correct = np.asarray(correct, dtype=bool)
    return RankOrder.from_order(np.argsort(correct, kind="stable"))
