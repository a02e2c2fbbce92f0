import numpy as np
import pytest

from nbreliability.data import DiscreteDataset, FeatureDomain
from nbreliability.nbc import NaiveBayesModel


def make_domain(cards, n_classes):
    return FeatureDomain(
        tuple(f"f{i}" for i in range(len(cards))),
        tuple(tuple(str(v) for v in range(k)) for k in cards),
        tuple(f"c{c}" for c in range(n_classes)),
    )


def make_model(prior, conditionals, alpha=1.0):
    prior = np.asarray(prior, dtype=float)
    conditionals = tuple(np.asarray(t, dtype=float) for t in conditionals)
    domain = make_domain([t.shape[1] for t in conditionals], len(prior))
    return NaiveBayesModel(prior, conditionals, alpha, domain)


def random_model(rng, max_classes=3, max_features=3, max_categories=4):
    """A random tiny model and a random feature vector for it."""
    n_classes = int(rng.integers(2, max_classes + 1))
    n_features = int(rng.integers(1, max_features + 1))
    cards = rng.integers(2, max_categories + 1, size=n_features)
    prior = rng.dirichlet(np.ones(n_classes))
    conds = [rng.dirichlet(np.ones(k), size=n_classes) for k in cards]
    f = np.array([rng.integers(0, k) for k in cards])
    return make_model(prior, conds), f


def random_dataset(rng, n=60, cards=(3, 2, 4), n_classes=3):
    X = np.column_stack([rng.integers(0, k, size=n) for k in cards])
    y = rng.integers(0, n_classes, size=n)
    return DiscreteDataset(X, y, make_domain(cards, n_classes), "random")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import REPORT
    if REPORT:
        terminalreporter.section("acceptance criteria")
        for line in sorted(REPORT):
            terminalreporter.write_line(line)
