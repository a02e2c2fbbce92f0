# # Uncertainty of single predictions
#
# Two metrics come from the posterior of the model itself; three more come
# from a bagged ensemble of 25 models and split the total entropy into an
# aleatoric and an epistemic part.

import numpy as np

from _paths import DATA
from nbreliability import nbc
from nbreliability.data import load_dataset, read_manifest, split_dataset
from nbreliability.uncertainty import all_uncertainties

manifest = read_manifest(DATA / "german_credit.yaml")
split = split_dataset(load_dataset(manifest), manifest, seed=1)
model = nbc.train(split.train, 1.0)
ensemble = nbc.bootstrap_ensemble(split.train, 1.0, size=25, seed=1)

proba = nbc.predict_proba(model, split.test.X)
members = nbc.ensemble_proba(ensemble, split.test.X)  # (members, instances, classes)
scores = all_uncertainties(proba, members)

for k in range(5):
    print(k, "  ".join(f"{name}={scores[name][k]:.4f}" for name in scores))

# The decomposition is exact: total = aleatoric + epistemic.

print("max |u_t - u_a - u_e| =", np.max(np.abs(scores["u_t"] - scores["u_a"] - scores["u_e"])))

# Misclassified instances should carry more uncertainty on average.

wrong = nbc.predict(model, split.test.X) != split.test.y
for name, values in scores.items():
    print(f"{name}: mean on wrong {values[wrong].mean():.4f}, on right {values[~wrong].mean():.4f}")
