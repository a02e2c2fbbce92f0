"""Loading and splitting of discrete UCI-style datasets.

A dataset is described by a small YAML manifest (see ``data/*.yaml``). Loading
drops the declared continuous columns, removes instances with a missing value,
applies an optional task transform and integer-encodes every categorical
column. Splitting is a seeded shuffle, or the dataset's own test file when the
manifest names one.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace
from fractions import Fraction
from pathlib import Path
from typing import Optional

import numpy as np
import yaml

TRANSFORMS = ("none", "solar_flare_binary", "student_pass_fail")

SOLAR_FLARE_COUNTS = ("C-class", "M-class", "X-class")
STUDENT_GRADE = "G3"
STUDENT_PASS_MARK = 10


class DatasetError(ValueError):
    """Raised when a dataset file or manifest cannot be turned into a dataset."""


@dataclass(frozen=True)
class DatasetManifest:
    name: str
    path: Path
    target_column: str
    continuous_columns: tuple[str, ...] = ()
    missing_token: str = "?"
    transform: str = "none"
    provided_test_path: Optional[Path] = None
    split_seed: Optional[int] = None
    train_fraction: Fraction = Fraction(3, 5)
    delimiter: str = ","
    # identifier columns carry no feature information and are dropped as well
    drop_columns: tuple[str, ...] = ()
    # source columns consumed by the transform (flare counts or final grade)
    transform_columns: tuple[str, ...] = ()

    def __post_init__(self):
        if self.target_column in self.continuous_columns:
            raise DatasetError(
                f"{self.name}: target column {self.target_column!r} is listed as continuous"
            )
        if self.transform not in TRANSFORMS:
            raise DatasetError(f"{self.name}: unknown transform {self.transform!r}")
        if not 0 < self.train_fraction < 1:
            raise DatasetError(f"{self.name}: train_fraction must lie in (0, 1)")
        if self.split_seed is not None and not 0 <= self.split_seed < 2**64:
            raise DatasetError(f"{self.name}: split_seed must be an unsigned 64-bit integer")

    @property
    def consumed_columns(self) -> tuple[str, ...]:
        if self.transform_columns:
            return self.transform_columns
        if self.transform == "solar_flare_binary":
            return SOLAR_FLARE_COUNTS
        if self.transform == "student_pass_fail":
            return (STUDENT_GRADE,)
        return ()


def read_manifest(path) -> DatasetManifest:
    """Parse a YAML manifest; relative data paths resolve against its folder."""
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        raw = yaml.safe_load(fh) or {}
    if not isinstance(raw, dict):
        raise DatasetError(f"{path}: manifest must be a mapping")
    unknown = set(raw) - {
        "name", "path", "target_column", "continuous_columns", "missing_token",
        "transform", "provided_test_path", "split_seed", "train_fraction",
        "delimiter", "drop_columns", "transform_columns",
    }
    if unknown:
        raise DatasetError(f"{path}: unknown manifest keys {sorted(unknown)}")
    for key in ("name", "path", "target_column"):
        if key not in raw:
            raise DatasetError(f"{path}: missing required key {key!r}")

    base = path.parent
    test_path = raw.get("provided_test_path")
    fraction = raw.get("train_fraction", "3/5")
    return DatasetManifest(
        name=str(raw["name"]),
        path=base / str(raw["path"]),
        target_column=str(raw["target_column"]),
        continuous_columns=tuple(str(c) for c in raw.get("continuous_columns") or ()),
        missing_token=str(raw.get("missing_token", "?")),
        transform=str(raw.get("transform", "none")),
        provided_test_path=None if test_path is None else base / str(test_path),
        split_seed=None if raw.get("split_seed") is None else int(raw["split_seed"]),
        train_fraction=Fraction(str(fraction)),
        delimiter=str(raw.get("delimiter", ",")),
        drop_columns=tuple(str(c) for c in raw.get("drop_columns") or ()),
        transform_columns=tuple(str(c) for c in raw.get("transform_columns") or ()),
    )


@dataclass(frozen=True)
class FeatureDomain:
    """Ordered category values per feature plus the ordered class labels."""

    feature_names: tuple[str, ...]
    feature_values: tuple[tuple[str, ...], ...]
    classes: tuple[str, ...]

    def __post_init__(self):
        if len(self.feature_names) != len(self.feature_values):
            raise DatasetError("one value list is needed per feature")
        if any(len(v) == 0 for v in self.feature_values) or not self.classes:
            raise DatasetError("every domain must be non-empty")

    @property
    def cardinalities(self) -> tuple[int, ...]:
        return tuple(len(v) for v in self.feature_values)

    @property
    def n_classes(self) -> int:
        return len(self.classes)

    def merge(self, other: "FeatureDomain") -> "FeatureDomain":
        if self.feature_names != other.feature_names:
            raise DatasetError(
                f"feature columns differ: {self.feature_names} vs {other.feature_names}"
            )
        values = tuple(
            tuple(sorted(set(a) | set(b)))
            for a, b in zip(self.feature_values, other.feature_values)
        )
        classes = tuple(sorted(set(self.classes) | set(other.classes)))
        return FeatureDomain(self.feature_names, values, classes)


@dataclass(frozen=True)
class DiscreteDataset:
    """Integer-encoded instances; ``X[j, i]`` indexes ``domain.feature_values[i]``."""

    X: np.ndarray
    y: np.ndarray
    domain: FeatureDomain
    name: str = ""

    def __post_init__(self):
        X = np.asarray(self.X, dtype=np.int64)
        y = np.asarray(self.y, dtype=np.int64)
        if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0]:
            raise DatasetError("X must be (n, N) and y must be (n,)")
        if X.shape[1] != len(self.domain.feature_names):
            raise DatasetError("feature count does not match the domain")
        card = np.asarray(self.domain.cardinalities, dtype=np.int64)
        if X.size and ((X < 0).any() or (X >= card).any()):
            raise DatasetError("feature index outside its domain")
        if y.size and ((y < 0).any() or (y >= self.domain.n_classes).any()):
            raise DatasetError("class index outside the class domain")
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)

    @property
    def n_features(self) -> int:
        return self.X.shape[1]

    def __len__(self) -> int:
        return self.X.shape[0]

    def subset(self, indices) -> "DiscreteDataset":
        indices = np.asarray(indices, dtype=np.int64)
        return replace(self, X=self.X[indices], y=self.y[indices])

    def decode(self) -> tuple[list[list[str]], list[str]]:
        rows = [
            [self.domain.feature_values[i][v] for i, v in enumerate(row)]
            for row in self.X.tolist()
        ]
        return rows, [self.domain.classes[c] for c in self.y.tolist()]

    def reencode(self, domain: FeatureDomain) -> "DiscreteDataset":
        """Express the same instances under a (super)domain."""
        rows, labels = self.decode()
        return _encode(rows, labels, domain, self.name)


@dataclass(frozen=True)
class DatasetSplit:
    train: DiscreteDataset
    test: DiscreteDataset


def _read_table(path: Path, delimiter: str) -> tuple[list[str], list[list[str]]]:
    if not path.is_file():
        raise FileNotFoundError(f"dataset file not found: {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh, delimiter=delimiter, skipinitialspace=True)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DatasetError(f"{path}: empty file, a header row is required") from None
        rows = []
        for row in reader:
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(header):
                raise DatasetError(
                    f"{path}:{reader.line_num}: expected {len(header)} fields, "
                    f"got {len(row)}"
                )
            rows.append([cell.strip() for cell in row])
    return header, rows


def _apply_transform(
    manifest: DatasetManifest, header: list[str], rows: list[list[str]], path: Path
) -> tuple[list[str], list[list[str]]]:
    if manifest.transform == "none":
        return header, rows
    sources = manifest.consumed_columns
    missing = [c for c in sources if c not in header]
    if missing:
        raise DatasetError(f"{path}: transform columns {missing} not in header")
    idx = [header.index(c) for c in sources]
    out_rows = []
    for lineno, row in enumerate(rows, start=2):
        try:
            values = [float(row[i]) for i in idx]
        except ValueError:
            raise DatasetError(
                f"{path}:{lineno}: non-numeric value in transform column "
                f"{[row[i] for i in idx]}"
            ) from None
        if manifest.transform == "solar_flare_binary":
            label = "flare" if sum(values) >= 1 else "no_flare"
        else:
            label = "pass" if values[0] >= STUDENT_PASS_MARK else "fail"
        out_rows.append([v for i, v in enumerate(row) if i not in idx] + [label])
    out_header = [h for i, h in enumerate(header) if i not in idx] + [manifest.target_column]
    return out_header, out_rows


def _read_instances(manifest: DatasetManifest, path: Path):
    header, rows = _read_table(path, manifest.delimiter)
    missing_tokens = {manifest.missing_token}

    # missing values only matter in the columns that survive
    dropped = set(manifest.continuous_columns) | set(manifest.drop_columns)
    unknown = dropped - set(header)
    if unknown:
        raise DatasetError(f"{path}: columns {sorted(unknown)} not in header")
    keep = [i for i, h in enumerate(header) if h not in dropped]
    header = [header[i] for i in keep]
    rows = [[row[i] for i in keep] for row in rows]
    rows = [row for row in rows if not missing_tokens.intersection(row)]

    header, rows = _apply_transform(manifest, header, rows, path)
    if manifest.target_column not in header:
        raise DatasetError(f"{path}: target column {manifest.target_column!r} absent")
    if not rows:
        raise DatasetError(f"{path}: no instances left after filtering")

    t = header.index(manifest.target_column)
    names = tuple(h for i, h in enumerate(header) if i != t)
    features = [[v for i, v in enumerate(row) if i != t] for row in rows]
    labels = [row[t] for row in rows]
    return names, features, labels


def _domain_of(names, features, labels) -> FeatureDomain:
    values = tuple(tuple(sorted({row[i] for row in features})) for i in range(len(names)))
    return FeatureDomain(names, values, tuple(sorted(set(labels))))


def _encode(features, labels, domain: FeatureDomain, name: str) -> DiscreteDataset:
    lookup = [{v: k for k, v in enumerate(vals)} for vals in domain.feature_values]
    cls = {c: k for k, c in enumerate(domain.classes)}
    n, N = len(features), len(domain.feature_names)
    X = np.empty((n, N), dtype=np.int64)
    for j, row in enumerate(features):
        X[j] = [lookup[i][v] for i, v in enumerate(row)]
    y = np.array([cls[c] for c in labels], dtype=np.int64)
    return DiscreteDataset(X, y, domain, name)


def load_dataset(manifest: DatasetManifest, path=None) -> DiscreteDataset:
    """Read, filter and encode the manifest's main file (or ``path``).

    Row order is preserved. The domain covers only the values seen in this
    file; :func:`split_dataset` widens it when a separate test file exists.
    """
    path = Path(path) if path is not None else manifest.path
    names, features, labels = _read_instances(manifest, path)
    return _encode(features, labels, _domain_of(names, features, labels), manifest.name)


def train_size(n: int, fraction: Fraction) -> int:
    """``round(fraction * n)`` with halves rounded up, in exact arithmetic."""
    return math.floor(Fraction(n) * fraction + Fraction(1, 2))


def split_dataset(
    data: DiscreteDataset, manifest: DatasetManifest, seed: Optional[int] = None
) -> DatasetSplit:
    """Split into train/test sharing one domain.

    With ``provided_test_path`` the given file is the test set and ``data`` is
    the training set, unshuffled. Otherwise a PCG64 stream seeded with
    ``seed`` (falling back to ``manifest.split_seed``) produces a
    Fisher-Yates permutation whose leading ``round(train_fraction * n)``
    indices form the training set.
    """
    if manifest.provided_test_path is not None:
        test = load_dataset(manifest, manifest.provided_test_path)
        domain = data.domain.merge(test.domain)
        train, test = data.reencode(domain), test.reencode(domain)
    else:
        seed = manifest.split_seed if seed is None else seed
        if seed is None:
            raise DatasetError(f"{manifest.name}: a split seed is required")
        n = len(data)
        perm = np.random.Generator(np.random.PCG64(seed)).permutation(n)
        k = train_size(n, manifest.train_fraction)
        train, test = data.subset(perm[:k]), data.subset(perm[k:])
    if len(train) == 0 or len(test) == 0:
        raise DatasetError(f"{manifest.name}: empty train or test partition")
    return DatasetSplit(train, test)
