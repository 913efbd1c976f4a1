"""Tabular classification datasets: loading, normalization, splitting and
column masking.

Delimited file grammar accepted by :func:`load_delimited`:

* UTF-8 text, one sample per line, fields separated by commas (RFC 4180
  quoting is honoured).
* Optional first header row naming every column.
* Exactly one label column, chosen by header name or 0-based index. Its cells
  are kept verbatim as categorical labels (surrounding whitespace stripped).
* Every other cell must parse as a decimal-point real (``float()`` syntax);
  ``nan``/``inf`` are rejected.
* Blank lines are ignored. All remaining rows must have equal field counts.
"""
import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DatasetError
from .rng import RngStream


@dataclass(frozen=True, eq=False)
class Dataset:
    """Immutable feature matrix with categorical labels."""

    features: np.ndarray
    labels: np.ndarray
    feature_names: tuple

    def __post_init__(self):
        features = np.array(self.features, dtype=float)
        labels = np.array([str(v) for v in self.labels], dtype=object)
        names = tuple(str(n) for n in self.feature_names)
        if features.ndim != 2:
            raise DatasetError("features must be a 2-D matrix")
        n, d = features.shape
        if n < 2:
            raise DatasetError(f"need at least 2 samples, got {n}")
        if d < 1:
            raise DatasetError("need at least 1 feature")
        if labels.shape != (n,):
            raise DatasetError(f"labels length {labels.shape[0]} != n_samples {n}")
        if len(names) != d:
            raise DatasetError(f"{len(names)} feature names for {d} features")
        if not np.all(np.isfinite(features)):
            raise DatasetError("non-finite feature values")
        if len(set(labels)) < 2:
            raise DatasetError("need at least 2 distinct labels")
        features.setflags(write=False)
        labels.setflags(write=False)
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "feature_names", names)

    @property
    def n_samples(self):
        return self.features.shape[0]

    @property
    def n_features(self):
        return self.features.shape[1]

    @property
    def classes(self):
        """Sorted distinct labels."""
        return sorted(set(self.labels))

    def subset(self, indices):
        idx = np.asarray(indices, dtype=int)
        return Dataset(self.features[idx], self.labels[idx], self.feature_names)

    def with_features(self, features):
        return Dataset(features, self.labels, self.feature_names)

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return (
            self.feature_names == other.feature_names
            and np.array_equal(self.features, other.features)
            and np.array_equal(self.labels, other.labels)
        )

    __hash__ = None


@dataclass(frozen=True)
class NormalizationStats:
    per_feature_min: np.ndarray
    per_feature_max: np.ndarray


@dataclass(frozen=True)
class FoldPlan:
    folds: list

    @property
    def n_folds(self):
        return len(self.folds)


def load_delimited(path, label_column=-1, has_header=True):
    """Read a comma separated file into a :class:`Dataset`.

    ``label_column`` is a header name (requires ``has_header``) or a 0-based
    column index; negative indices count from the end.
    """
    path = Path(path)
    if not path.is_file():
        raise DatasetError(f"no such file: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if any(cell.strip() for cell in r)]
    if has_header:
        if not rows:
            raise DatasetError(f"{path}: empty file")
        header, rows = [c.strip() for c in rows[0]], rows[1:]
    else:
        header = None
    if not rows:
        raise DatasetError(f"{path}: no data rows")
    width = len(rows[0]) if header is None else len(header)
    for lineno, row in enumerate(rows, start=2 if has_header else 1):
        if len(row) != width:
            raise DatasetError(
                f"{path}:{lineno}: ragged row, {len(row)} fields where {width} expected"
            )
    if width < 2:
        raise DatasetError(f"{path}: need a label column and at least one feature")

    label_idx = _resolve_label_column(label_column, header, width, path)
    feature_cols = [c for c in range(width) if c != label_idx]
    names = [header[c] for c in feature_cols] if header else [f"f{c}" for c in feature_cols]

    features = np.empty((len(rows), len(feature_cols)))
    for r, row in enumerate(rows):
        for out_c, c in enumerate(feature_cols):
            cell = row[c].strip()
            try:
                value = float(cell)
            except ValueError:
                raise DatasetError(
                    f"{path}: non-numeric feature cell {cell!r} (row {r + 1}, column {c})"
                ) from None
            if not np.isfinite(value):
                raise DatasetError(f"{path}: non-finite feature cell {cell!r} (row {r + 1})")
            features[r, out_c] = value
    labels = [row[label_idx].strip() for row in rows]
    if len(set(labels)) < 2:
        raise DatasetError(f"{path}: label column has a single class")
    return Dataset(features, labels, names)


def _resolve_label_column(label_column, header, width, path):
    if isinstance(label_column, str):
        try:
            label_column = int(label_column)
        except ValueError:
            if header is None:
                raise DatasetError("label column given by name but file has no header") from None
            if label_column not in header:
                raise DatasetError(f"{path}: no column named {label_column!r}") from None
            return header.index(label_column)
    idx = int(label_column)
    if idx < 0:
        idx += width
    if not 0 <= idx < width:
        raise DatasetError(f"{path}: label column index {label_column} out of range")
    return idx


def fit_normalizer(train):
    return NormalizationStats(train.features.min(axis=0), train.features.max(axis=0))


def apply_normalizer(data, stats):
    """Min-max scale with the fitted range. Constant columns map to 0 and values
    outside the fitted range are left unclipped."""
    lo = np.asarray(stats.per_feature_min, dtype=float)
    hi = np.asarray(stats.per_feature_max, dtype=float)
    if lo.shape != (data.n_features,) or hi.shape != (data.n_features,):
        raise DatasetError(
            f"normalizer fitted on {lo.shape[0]} features, data has {data.n_features}"
        )
    span = hi - lo
    constant = span == 0
    scaled = (data.features - lo) / np.where(constant, 1.0, span)
    scaled[:, constant] = 0.0
    return data.with_features(scaled)


def _class_indices(labels):
    return {c: np.flatnonzero(labels == c) for c in sorted(set(labels))}


def stratified_kfold(data, k, seed, strict=True):
    """Stratified k-fold plan. Each class is shuffled and dealt round-robin into
    the folds, continuing the deal across classes so fold sizes stay balanced.

    With ``strict`` every class needs at least ``k`` samples; otherwise rare
    classes are simply absent from some test folds.
    """
    k = int(k)
    if not 2 <= k <= data.n_samples:
        raise DatasetError(f"k must lie in [2, n_samples], got {k}")
    by_class = _class_indices(data.labels)
    small = {c: len(ix) for c, ix in by_class.items() if len(ix) < k}
    if small and strict:
        raise DatasetError(f"classes with fewer than k={k} samples: {small}")
    rng = RngStream(seed)
    order = np.concatenate([rng.permutation(ix) for ix in by_class.values()])
    fold_of = np.empty(data.n_samples, dtype=int)
    fold_of[order] = np.arange(len(order)) % k
    everything = np.arange(data.n_samples)
    folds = [(everything[fold_of != f], everything[fold_of == f]) for f in range(k)]
    return FoldPlan(folds)


def _largest_remainder(total, weights):
    quotas = np.asarray(weights, dtype=float) * total / np.sum(weights)
    alloc = np.floor(quotas).astype(int)
    short = total - alloc.sum()
    # stable sort keeps class order on equal remainders
    order = np.argsort(-(quotas - alloc), kind="stable")
    alloc[order[:short]] += 1
    return alloc


def holdout_indices(data, test_fraction, seed, strict=True):
    """Stratified train/test index split with ``round(test_fraction * n)`` test
    rows.

    Per-class test counts follow largest-remainder apportionment. With
    ``strict`` every class must appear in both partitions.
    """
    if not 0.0 < test_fraction < 1.0:
        raise DatasetError(f"test_fraction must lie in (0, 1), got {test_fraction}")
    n = data.n_samples
    n_test = int(np.floor(test_fraction * n + 0.5))
    if n_test == 0 or n_test == n:
        side = "test" if n_test == 0 else "train"
        raise DatasetError(f"test_fraction {test_fraction} leaves an empty {side} partition")
    by_class = _class_indices(data.labels)
    alloc = _largest_remainder(n_test, [len(ix) for ix in by_class.values()])
    if strict:
        for (c, ix), a in zip(by_class.items(), alloc):
            if a == 0 or a == len(ix):
                raise DatasetError(f"class {c!r} would be missing from a partition")
    rng = RngStream(seed)
    test_parts, train_parts = [], []
    for ix, a in zip(by_class.values(), alloc):
        perm = rng.permutation(ix)
        test_parts.append(perm[:a])
        train_parts.append(perm[a:])
    return np.sort(np.concatenate(train_parts)), np.sort(np.concatenate(test_parts))


def stratified_holdout(data, test_fraction, seed, strict=True):
    train_idx, test_idx = holdout_indices(data, test_fraction, seed, strict=strict)
    return data.subset(train_idx), data.subset(test_idx)


def select_columns(data, mask):
    mask = np.asarray(mask).astype(bool)
    if mask.shape != (data.n_features,):
        raise DatasetError(f"mask length {mask.shape} != n_features {data.n_features}")
    if not mask.any():
        raise DatasetError("mask selects no features")
    names = tuple(n for n, m in zip(data.feature_names, mask) if m)
    return Dataset(data.features[:, mask], data.labels, names)
