# # Naive Bayes on a discrete dataset
#
# We load the Breast Cancer Wisconsin data from its manifest, split it 60/40,
# pick the smoothing by 5-fold cross-validation and fit the final model.

import numpy as np

from _paths import DATA
from nbreliability import nbc
from nbreliability.data import load_dataset, read_manifest, split_dataset

manifest = read_manifest(DATA / "breast_cancer_wisconsin.yaml")
data = load_dataset(manifest)
print(f"{len(data)} complete instances, {data.n_features} features, classes {data.domain.classes}")

split = split_dataset(data, manifest, seed=7)
print(f"train {len(split.train)}, test {len(split.test)}")

# Every candidate smoothing is scored by mean fold accuracy; ties go to the
# smallest value.

alpha = nbc.select_smoothing(split.train, nbc.DEFAULT_SMOOTHING_GRID, folds=5, cv_seed=7)
model = nbc.train(split.train, alpha)
print(f"alpha = {alpha}, test accuracy = {nbc.accuracy(model, split.test):.4f}")

# The posterior of a single instance, together with the unnormalized joint
# score of each class.

f = split.test.X[0]
post = nbc.posterior(model, f)
joints = [nbc.joint_score(model, c, f) for c in range(model.n_classes)]
print("posterior", np.round(post.probabilities, 4), "predicted", data.domain.classes[post.predicted_class])
print("joint scores", joints)

# Retraining with the same data and smoothing gives the same tables, digit
# for digit.

assert nbc.dump_model(model) == nbc.dump_model(nbc.train(split.train, alpha))
print(nbc.dump_model(model).splitlines()[:4])
