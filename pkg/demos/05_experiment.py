# # The full pipeline from a config file
#
# This is what `nbreliability run --config configs/breast_cancer.yaml` does:
# per dataset it selects the smoothing, fits model and ensemble, trains the
# hybrid weight on the training scores and writes the test-set tables,
# curves and point clouds.

import tempfile
from dataclasses import replace
from pathlib import Path

from _paths import CONFIGS
from nbreliability.experiment import read_config, run_experiment

config = read_config(CONFIGS / "breast_cancer.yaml")
out = Path(tempfile.mkdtemp())
status, results = run_experiment(replace(config, output_dir=out))
print("exit status", status)
for path in sorted(out.iterdir()):
    lines = path.read_text().splitlines()
    print(f"--- {path.name} ({len(lines) - 1} rows)")
    print("\n".join(lines[:3]))
