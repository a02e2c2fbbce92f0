"""Reliability of Naive Bayes predictions: uncertainty, robustness and their hybrid."""

from .arc import AccuracyRejectionCurve, ReliabilityRecords, arc, au_arc, auarc_of, ideal_order
from .data import (
    DatasetManifest,
    DatasetSplit,
    DiscreteDataset,
    FeatureDomain,
    load_dataset,
    read_manifest,
    split_dataset,
)
from .nbc import (
    ModelEnsemble,
    NaiveBayesModel,
    PosteriorDistribution,
    bootstrap_ensemble,
    joint_score,
    posterior,
    select_smoothing,
    train,
)
from .ranking import (
    HybridWeight,
    RankOrder,
    hybrid_order,
    order_by_robustness,
    order_by_uncertainty,
    train_gamma,
)
from .robustness import (
    eps_global,
    eps_local,
    global_robustness,
    local_robustness,
    oracle_eps_global,
    oracle_eps_local,
)
from .uncertainty import (
    ensemble_uncertainties,
    entropy_uncertainty,
    max_prob_uncertainty,
)

__version__ = "0.1.0"
