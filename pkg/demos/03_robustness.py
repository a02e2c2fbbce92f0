# # Robustness against contamination
#
# The global metric contaminates the joint distribution as a whole and has a
# closed form. The local metric contaminates the prior and every conditional
# separately and is found by bisection. Both are checked against brute-force
# oracles on a tiny model.

import numpy as np

from _paths import DATA
from nbreliability import nbc
from nbreliability.data import FeatureDomain, load_dataset, read_manifest, split_dataset
from nbreliability.robustness import (
    eps_global,
    eps_local,
    global_robustness,
    local_robustness,
    oracle_eps_global,
    oracle_eps_local,
)

domain = FeatureDomain(("f",), (("a", "b"),), ("no", "yes"))
model = nbc.NaiveBayesModel(np.array([0.6, 0.4]),
                            (np.array([[0.8, 0.2], [0.2, 0.8]]),), 1.0, domain)
for f in ([0], [1]):
    print(f"f={f}: glob {eps_global(model, f):.6f} (oracle {oracle_eps_global(model, f):.4f}), "
          f"loc {eps_local(model, f):.6f} (oracle {oracle_eps_local(model, f):.4f})")

# On real data, wrong predictions tend to be the fragile ones.

manifest = read_manifest(DATA / "breast_cancer_wisconsin.yaml")
split = split_dataset(load_dataset(manifest), manifest, seed=3)
model = nbc.train(split.train, 0.1)
glob = global_robustness(model, split.test.X)
loc = local_robustness(model, split.test.X)
wrong = nbc.predict(model, split.test.X) != split.test.y
print(f"{wrong.sum()} wrong out of {len(wrong)}")
print(f"median eps_glob: wrong {np.median(glob[wrong]):.3g}, right {np.median(glob[~wrong]):.3g}")
print(f"median eps_loc:  wrong {np.median(loc[wrong]):.3g}, right {np.median(loc[~wrong]):.3g}")
