"""Per-instance uncertainty scores (natural-log entropies).

``u_m``  one minus the largest posterior probability
``u_H``  Shannon entropy of the posterior
``u_t``  entropy of the ensemble-mean posterior (total)
``u_a``  mean entropy of the member posteriors (aleatoric)
``u_e``  ``u_t - u_a``, the mutual information between label and member (epistemic)

All functions accept a single distribution or a batch along the leading axes;
the class axis is always last.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .nbc import PosteriorDistribution

UNCERTAINTY_METRICS = ("u_m", "u_H", "u_t", "u_a", "u_e")

# negative residue of u_t - u_a larger than this is a bug, not rounding
_CLAMP_TOL = 1e-12


@dataclass(frozen=True)
class UncertaintyScores:
    u_m: float
    u_H: float
    u_t: float
    u_a: float
    u_e: float


def _probs(post) -> np.ndarray:
    if isinstance(post, PosteriorDistribution):
        post = post.probabilities
    return np.asarray(post, dtype=float)


def entropy(p) -> np.ndarray:
    p = _probs(p)
    # 0 * log 0 is taken as 0
    terms = np.where(p > 0, -p * np.log(np.where(p > 0, p, 1.0)), 0.0)
    return terms.sum(axis=-1)


def max_prob_uncertainty(post):
    return 1.0 - _probs(post).max(axis=-1)


def entropy_uncertainty(post):
    return entropy(post)


def ensemble_uncertainties(posteriors):
    """Total, aleatoric and epistemic uncertainty of member posteriors.

    ``posteriors`` has the member axis first: shape (M, |C|) for one
    instance or (M, n, |C|) for a batch.
    """
    probs = np.stack([_probs(p) for p in posteriors]) if isinstance(
        posteriors, (list, tuple)) else np.asarray(posteriors, dtype=float)
    if probs.ndim < 2:
        raise ValueError("expected an (M, ..., |C|) array of member posteriors")
    if probs.shape[0] < 2:
        raise ValueError("an ensemble needs at least two members")
    total = entropy(probs.mean(axis=0))
    aleatoric = entropy(probs).mean(axis=0)
    epistemic = total - aleatoric
    if np.any(epistemic < -_CLAMP_TOL):
        raise ArithmeticError(f"negative mutual information {epistemic.min()}")
    return total, aleatoric, np.maximum(epistemic, 0.0)


def all_uncertainties(model_proba, member_proba) -> dict[str, np.ndarray]:
    """Every metric for a batch: ``model_proba`` (n, |C|), ``member_proba`` (M, n, |C|)."""
    u_t, u_a, u_e = ensemble_uncertainties(member_proba)
    return {
        "u_m": max_prob_uncertainty(model_proba),
        "u_H": entropy_uncertainty(model_proba),
        "u_t": u_t,
        "u_a": u_a,
        "u_e": u_e,
    }
