"""End-to-end benchmark: datasets in, AU-ARC tables and curve files out.

For each dataset manifest the pipeline loads and splits the data, selects
the smoothing by k-fold cross-validation on the training set, fits the final
model and a bootstrap ensemble on the full training set, scores every train
and test instance with all reliability metrics, trains the hybrid weight on
the training scores and evaluates everything on the test set.
"""

from __future__ import annotations

import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
import yaml

from . import nbc
from .arc import ReliabilityRecords, arc, auarc_of, ideal_order
from .data import DatasetManifest, DiscreteDataset, load_dataset, read_manifest, split_dataset
from .ranking import (
    GAMMA_GRID_STEP,
    HybridWeight,
    hybrid_order,
    order_by_robustness,
    order_by_uncertainty,
    train_gamma,
)
from .robustness import DEFAULT_TOL, ROBUSTNESS_METRICS, global_robustness, local_robustness
from .uncertainty import UNCERTAINTY_METRICS, all_uncertainties

log = logging.getLogger(__name__)

SUMMARY_HEADER = "dataset,unc,glob,hybridA,mixingA,local,hybridB,mixingB"
ARC_HEADER = "rej_rate ideal robustness uncertainty hybrid"
CLOUD_HEADER = "x y correct"
CLOUD_FLOOR = 1e-15

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_U64 = (1 << 64) - 1


def fnv1a_64(data: bytes) -> int:
    h = _FNV_OFFSET
    for byte in data:
        h = ((h ^ byte) * _FNV_PRIME) & _U64
    return h


def derive_seed(name: str, master_seed: int, stream: str = "") -> int:
    """Per-dataset (and per-stream) seed, independent of processing order."""
    key = name if not stream else f"{name}:{stream}"
    return fnv1a_64(key.encode("utf-8")) ^ (master_seed & _U64)


@dataclass(frozen=True)
class ExperimentConfig:
    manifests: tuple[Path, ...]
    smoothing_grid: tuple[float, ...] = nbc.DEFAULT_SMOOTHING_GRID
    cv_folds: int = 5
    ensemble_size: int = 25
    gamma_grid_step: float = GAMMA_GRID_STEP
    eps_tol: float = DEFAULT_TOL
    master_seed: int = 0
    output_dir: Path = Path("results")
    uncertainty_metrics: tuple[str, ...] = UNCERTAINTY_METRICS
    robustness_metrics: tuple[str, ...] = ROBUSTNESS_METRICS

    def __post_init__(self):
        bad_u = set(self.uncertainty_metrics) - set(UNCERTAINTY_METRICS)
        bad_e = set(self.robustness_metrics) - set(ROBUSTNESS_METRICS)
        if bad_u or bad_e:
            raise ValueError(f"unknown metrics: {sorted(bad_u | bad_e)}")
        if not self.smoothing_grid or min(self.smoothing_grid) <= 0:
            raise ValueError("smoothing grid must hold positive values")
        if self.cv_folds < 2 or self.ensemble_size < 2:
            raise ValueError("cv_folds and ensemble_size must be at least 2")
        if not 0 < self.gamma_grid_step <= 1 or not self.eps_tol > 0:
            raise ValueError("gamma_grid_step must lie in (0, 1] and eps_tol be positive")
        if not 0 <= self.master_seed <= _U64:
            raise ValueError("master_seed must be an unsigned 64-bit integer")


_CONFIG_KEYS = {
    "manifests", "smoothing_grid", "cv_folds", "ensemble_size", "gamma_grid_step",
    "eps_tol", "master_seed", "output_dir", "uncertainty_metrics", "robustness_metrics",
}


def read_config(path) -> ExperimentConfig:
    """Load a YAML config; paths inside it are relative to the file."""
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        raw = yaml.safe_load(fh) or {}
    if not isinstance(raw, dict):
        raise ValueError(f"{path}: config must be a mapping")
    unknown = set(raw) - _CONFIG_KEYS
    if unknown:
        raise ValueError(f"{path}: unknown config keys {sorted(unknown)}")
    if "manifests" not in raw:
        raise ValueError(f"{path}: 'manifests' is required")
    base = path.parent
    kwargs = {"manifests": tuple(base / str(m) for m in raw["manifests"] or ())}
    if "output_dir" in raw:
        kwargs["output_dir"] = base / str(raw["output_dir"])
    for key, cast in (("cv_folds", int), ("ensemble_size", int), ("master_seed", int),
                      ("gamma_grid_step", float), ("eps_tol", float)):
        if key in raw:
            kwargs[key] = cast(raw[key])
    if "smoothing_grid" in raw:
        kwargs["smoothing_grid"] = tuple(float(a) for a in raw["smoothing_grid"])
    for key in ("uncertainty_metrics", "robustness_metrics"):
        if key in raw:
            kwargs[key] = tuple(str(m) for m in raw[key])
    return ExperimentConfig(**kwargs)


@dataclass
class PairResult:
    u_metric: str
    e_metric: str
    weight: HybridWeight
    train_auarc: dict  # "uncertainty" / "robustness" / "hybrid" on D_train
    test_auarc: dict
    curves: dict  # "ideal" / "robustness" / "uncertainty" / "hybrid" accuracies


@dataclass
class DatasetResult:
    name: str
    alpha: float
    n_train: int
    n_test: int
    test_records: ReliabilityRecords
    pairs: list = field(default_factory=list)


def score_records(model, ensemble, data: DiscreteDataset, eps_tol: float,
                  robustness_metrics=ROBUSTNESS_METRICS) -> ReliabilityRecords:
    """Apply the trained model and ensemble to every instance of ``data``."""
    proba = nbc.predict_proba(model, data.X)
    scores = all_uncertainties(proba, nbc.ensemble_proba(ensemble, data.X))
    if "eps_glob" in robustness_metrics:
        scores["eps_glob"] = global_robustness(model, data.X)
    if "eps_loc" in robustness_metrics:
        scores["eps_loc"] = local_robustness(model, data.X, eps_tol)
    return ReliabilityRecords(nbc.predict(model, data.X), data.y.copy(), scores)


def evaluate_pair(train_rec: ReliabilityRecords, test_rec: ReliabilityRecords,
                  u_metric: str, e_metric: str, grid_step: float) -> PairResult:
    weight = train_gamma(train_rec, u_metric, e_metric, grid_step)

    def orders(rec, gamma):
        u, e = rec.scores[u_metric], rec.scores[e_metric]
        ru, re_ = order_by_uncertainty(u), order_by_robustness(e)
        return {"uncertainty": ru, "robustness": re_, "hybrid": hybrid_order(ru, re_, u, gamma)}

    train_orders = orders(train_rec, weight.gamma)
    test_orders = orders(test_rec, weight.gamma)
    test_orders["ideal"] = ideal_order(test_rec.correct)
    curves = {k: arc(o, test_rec.correct).accuracies for k, o in test_orders.items()}
    return PairResult(
        u_metric, e_metric, weight,
        train_auarc={k: auarc_of(o, train_rec.correct) for k, o in train_orders.items()},
        test_auarc={k: float(np.mean(v)) for k, v in curves.items()},
        curves=curves,
    )


def run_dataset(manifest: DatasetManifest, config: ExperimentConfig) -> DatasetResult:
    name, seed = manifest.name, config.master_seed
    data = load_dataset(manifest)
    split_seed = manifest.split_seed if manifest.split_seed is not None \
        else derive_seed(name, seed, "split")
    split = split_dataset(data, manifest, seed=split_seed)
    alpha = nbc.select_smoothing(split.train, config.smoothing_grid, config.cv_folds,
                                 derive_seed(name, seed, "cv"))
    model = nbc.train(split.train, alpha)
    ensemble = nbc.bootstrap_ensemble(split.train, alpha, config.ensemble_size,
                                      derive_seed(name, seed, "bootstrap"))
    train_rec = score_records(model, ensemble, split.train, config.eps_tol, config.robustness_metrics)
    test_rec = score_records(model, ensemble, split.test, config.eps_tol, config.robustness_metrics)
    log.info("%s: %d train / %d test, alpha=%g, test accuracy %.4f", name,
             len(split.train), len(split.test), alpha, test_rec.correct.mean())

    result = DatasetResult(name, alpha, len(split.train), len(split.test), test_rec)
    for u in config.uncertainty_metrics:
        for e in config.robustness_metrics:
            result.pairs.append(evaluate_pair(train_rec, test_rec, u, e, config.gamma_grid_step))
    return result


def _run_one(args):
    manifest_path, config = args
    try:
        manifest = read_manifest(manifest_path)
        return run_dataset(manifest, config), None
    except Exception as exc:  # reported per dataset, the run carries on
        return None, f"{manifest_path}: {type(exc).__name__}: {exc}"


def format_arc(curves: dict) -> str:
    lengths = {len(v) for v in curves.values()}
    if len(lengths) != 1:
        raise ValueError("curves differ in length")
    n = lengths.pop()
    cols = ["ideal", "robustness", "uncertainty", "hybrid"]
    lines = [ARC_HEADER]
    for k in range(n):
        vals = [k / n] + [curves[c][k] for c in cols]
        lines.append(" ".join(f"{v:.6f}" for v in vals))
    return "\n".join(lines) + "\n"


def emit_arc_file(path, curves: dict) -> None:
    Path(path).write_text(format_arc(curves), encoding="utf-8")


def point_cloud(records: ReliabilityRecords, u_metric: str, e_metric: str):
    x = np.log(np.maximum(records.scores[e_metric], CLOUD_FLOOR))
    y = -np.log(np.maximum(records.scores[u_metric], CLOUD_FLOOR))
    return x, y, records.correct.astype(int)


def format_point_cloud(records: ReliabilityRecords, u_metric: str, e_metric: str) -> str:
    x, y, ok = point_cloud(records, u_metric, e_metric)
    lines = [CLOUD_HEADER] + [f"{a:.6f} {b:.6f} {c}" for a, b, c in zip(x, y, ok)]
    return "\n".join(lines) + "\n"


def emit_point_cloud(path, records: ReliabilityRecords, u_metric: str, e_metric: str) -> None:
    Path(path).write_text(format_point_cloud(records, u_metric, e_metric), encoding="utf-8")


def summary_rows(results: Sequence[DatasetResult], u_metric: str) -> list[list[str]]:
    rows = []
    for res in results:
        pairs = {p.e_metric: p for p in res.pairs if p.u_metric == u_metric}
        if not pairs:
            continue
        unc = next(iter(pairs.values())).test_auarc["uncertainty"]
        row = [res.name, f"{unc:.4f}"]
        for e in ROBUSTNESS_METRICS:
            p = pairs.get(e)
            if p is None:
                row += ["", "", ""]
            else:
                row += [f"{p.test_auarc['robustness']:.4f}", f"{p.test_auarc['hybrid']:.4f}",
                        f"{p.weight.gamma:.2f}"]
        rows.append(row)
    return rows


def format_summary(rows: Sequence[Sequence[str]]) -> str:
    return "\n".join([SUMMARY_HEADER] + [",".join(r) for r in rows]) + "\n"


def emit_summary(path, rows) -> None:
    Path(path).write_text(format_summary(rows), encoding="utf-8")


def _training_table(results: Sequence[DatasetResult]) -> str:
    lines = ["dataset,n_train,n_test,alpha,umetric,emetric,gamma,"
             "train_unc,train_rob,train_hybrid"]
    for res in results:
        for p in res.pairs:
            t = p.train_auarc
            lines.append(
                f"{res.name},{res.n_train},{res.n_test},{res.alpha:g},{p.u_metric},{p.e_metric},"
                f"{p.weight.gamma:.2f},{t['uncertainty']:.10f},{t['robustness']:.10f},"
                f"{t['hybrid']:.10f}"
            )
    return "\n".join(lines) + "\n"


def file_stem(name: str) -> str:
    return "".join(ch if ch.isalnum() or ch in "-_." else "_" for ch in name)


def write_outputs(results: Sequence[DatasetResult], config: ExperimentConfig) -> None:
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    for u in config.uncertainty_metrics:
        emit_summary(out / f"summary_{u}.csv", summary_rows(results, u))
    for res in results:
        stem = file_stem(res.name)
        for p in res.pairs:
            emit_arc_file(out / f"{stem}_{p.e_metric}_{p.u_metric}.dat", p.curves)
            emit_point_cloud(out / f"{stem}_{p.e_metric}_{p.u_metric}_cloud.dat",
                             res.test_records, p.u_metric, p.e_metric)
    (out / "training.csv").write_text(_training_table(results), encoding="utf-8")


def run_experiment(config: ExperimentConfig, jobs: int = 1) -> tuple[int, list[DatasetResult]]:
    """Run every dataset and write all outputs.

    Returns the exit status (nonzero if any dataset failed) and the
    results of the datasets that succeeded, in manifest order.
    """
    tasks = [(m, config) for m in config.manifests]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_run_one, tasks))
    else:
        outcomes = [_run_one(t) for t in tasks]

    results, failures = [], []
    for res, err in outcomes:
        if err is not None:
            log.error("dataset failed: %s", err)
            failures.append(err)
        else:
            results.append(res)
    write_outputs(results, config)
    return (1 if failures else 0), results


def validate_config(config: ExperimentConfig) -> list[str]:
    """Parse every manifest and check that its files exist; returns problems found."""
    problems = []
    for path in config.manifests:
        try:
            m = read_manifest(path)
        except (OSError, ValueError) as exc:
            problems.append(f"{path}: {exc}")
            continue
        for p in (m.path, m.provided_test_path):
            if p is not None and not Path(p).is_file():
                problems.append(f"{path}: data file not found: {p}")
    return problems


def filter_config(config: ExperimentConfig, datasets: Optional[Sequence[str]] = None,
                  seed: Optional[int] = None, out: Optional[Path] = None) -> ExperimentConfig:
    """Apply command-line overrides."""
    changes = {}
    if datasets:
        wanted = set(datasets)
        keep = tuple(p for p in config.manifests if read_manifest(p).name in wanted)
        missing = wanted - {read_manifest(p).name for p in keep}
        if missing:
            raise ValueError(f"unknown datasets: {sorted(missing)}")
        changes["manifests"] = keep
    if seed is not None:
        changes["master_seed"] = seed
    if out is not None:
        changes["output_dir"] = Path(out)
    return replace(config, **changes)


def default_jobs() -> int:
    return os.cpu_count() or 1
