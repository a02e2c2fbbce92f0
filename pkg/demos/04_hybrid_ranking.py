# # Rejecting the least reliable predictions
#
# Each metric orders the test instances from least to most reliable. The
# accuracy-rejection curve tracks the accuracy of what is left as we reject
# along that order, and its mean (AU-ARC) summarizes it. The hybrid order
# averages the two rank positions with a weight trained on the training set.

from _paths import DATA
from nbreliability import nbc
from nbreliability.arc import arc, auarc_of, ideal_order
from nbreliability.data import load_dataset, read_manifest, split_dataset
from nbreliability.experiment import score_records
from nbreliability.ranking import hybrid_order, order_by_robustness, order_by_uncertainty, train_gamma

manifest = read_manifest(DATA / "solar_flare_big.yaml")
split = split_dataset(load_dataset(manifest), manifest, seed=5)
alpha = nbc.select_smoothing(split.train, cv_seed=5)
model = nbc.train(split.train, alpha)
ensemble = nbc.bootstrap_ensemble(split.train, alpha, seed=5)
train_rec = score_records(model, ensemble, split.train, 1e-10)
test_rec = score_records(model, ensemble, split.test, 1e-10)

weight = train_gamma(train_rec, "u_a", "eps_glob")
print(f"trained gamma = {weight.gamma:.2f} (train AU-ARC {weight.train_auarc:.4f})")

u, e = test_rec.scores["u_a"], test_rec.scores["eps_glob"]
ru, re_ = order_by_uncertainty(u), order_by_robustness(e)
orders = {
    "uncertainty": ru,
    "robustness": re_,
    "hybrid": hybrid_order(ru, re_, u, weight.gamma),
    "ideal": ideal_order(test_rec.correct),
}
for name, order in orders.items():
    print(f"{name:12s} AU-ARC {auarc_of(order, test_rec.correct):.4f}")

# The first few points of each curve; rejection rate k/n.

n = len(test_rec.correct)
curves = {name: arc(order, test_rec.correct).accuracies for name, order in orders.items()}
for k in range(0, n, n // 8):
    print(f"{k / n:.3f}  " + "  ".join(f"{curves[name][k]:.4f}" for name in orders))
