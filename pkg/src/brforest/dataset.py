"""Loading, validating, discretizing, resampling and folding tabular datasets."""
import csv
import json
import math
import os
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .errors import (
    DataError,
    DimensionMismatch,
    EmptyDataset,
    MalformedRow,
    MissingValue,
    NonNumericCell,
    SingleClass,
    SubsetTooLarge,
    TooManyFolds,
)

#: Relative distance to a bin edge below which a value is taken to lie on it.
EDGE_SNAP = 1e-9

MISSING_TOKENS = frozenset({"", "?", "NA", "NaN", "nan"})

BUILTIN = ("iris", "wine", "soybean", "sonar", "thyroid", "ecoli", "dermatology")


@dataclass(frozen=True, eq=False)
class Dataset:
    """A dense feature matrix with integer class labels.

    Parameters
    ----------
    features : ndarray of shape (n, M)
        Real-valued features.
    labels : ndarray of shape (n,)
        Class ids in ``0 .. C-1``.
    feature_names : list of str
    class_names : list of str
        ``C`` names; ``labels`` index into this list.
    name : str
        Free-form tag used in reports.
    """

    features: np.ndarray
    labels: np.ndarray
    feature_names: tuple
    class_names: tuple
    name: str = ""

    def __post_init__(self):
        X = np.array(self.features, dtype=float, copy=True)
        y = np.array(self.labels, dtype=np.int64, copy=True)
        if X.ndim != 2 or X.shape[0] == 0:
            raise EmptyDataset("dataset has no rows")
        n, m = X.shape
        if m == 0:
            raise EmptyDataset("dataset has no feature columns")
        if y.shape != (n,):
            raise DataError(f"{y.shape[0]} labels for {n} rows")
        if not np.all(np.isfinite(X)):
            raise MissingValue("non-finite feature value")
        if len(self.feature_names) != m:
            raise DataError(f"{len(self.feature_names)} feature names for {m} columns")
        if len(self.class_names) < 2:
            raise SingleClass("need at least two classes")
        if y.min() < 0 or y.max() >= len(self.class_names):
            raise DataError("label outside 0..C-1")
        X.flags.writeable = False
        y.flags.writeable = False
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "labels", y)
        object.__setattr__(self, "feature_names", tuple(self.feature_names))
        object.__setattr__(self, "class_names", tuple(self.class_names))

    @property
    def n_samples(self):
        return self.features.shape[0]

    @property
    def n_features(self):
        return self.features.shape[1]

    @property
    def n_classes(self):
        return len(self.class_names)

    def take(self, rows):
        """Dataset restricted to (possibly repeated) row indices."""
        rows = np.asarray(rows, dtype=np.int64)
        return Dataset(self.features[rows], self.labels[rows], self.feature_names,
                       self.class_names, self.name)

    def fingerprint(self):
        """Row/column counts plus a content hash, for tying models to their data."""
        import hashlib

        h = hashlib.sha256()
        h.update(np.ascontiguousarray(self.features).tobytes())
        h.update(np.ascontiguousarray(self.labels).tobytes())
        return {"n_samples": self.n_samples, "n_features": self.n_features,
                "sha256": h.hexdigest()}


@dataclass(frozen=True, eq=False)
class DiscretizedView:
    """Equal-width bin codes for every feature column."""

    codes: np.ndarray
    bins_per_feature: tuple
    lows: np.ndarray = field(repr=False)
    highs: np.ndarray = field(repr=False)

    def transform(self, X):
        """Bin new rows with the stored edges (out-of-range values clip to the end bins)."""
        return _bin_columns(np.asarray(X, dtype=float), self.lows, self.highs,
                            np.asarray(self.bins_per_feature))


def _bin_columns(X, lows, highs, bins):
    span = highs - lows
    constant = span <= 0
    safe = np.where(constant, 1.0, span)
    pos = (X - lows) / safe * bins
    # snap round-off at an edge so rescaled copies of a column bin identically
    edge = np.rint(pos)
    pos = np.where(np.abs(pos - edge) <= EDGE_SNAP * np.maximum(bins, 1), edge, pos)
    codes = np.floor(pos).astype(np.int64)
    codes = np.clip(codes, 0, np.maximum(bins - 1, 0))
    codes[:, constant] = 0
    return codes


def discretize_array(X, bins):
    """Equal-width binning of each column of ``X`` over its observed range.

    Bin edges are half-open with the last bin closed, so the column maximum
    lands in bin ``bins - 1``. A constant column gets a single bin.
    """
    if bins < 2:
        raise ValueError("bins must be >= 2")
    X = np.asarray(X, dtype=float)
    lows = X.min(axis=0)
    highs = X.max(axis=0)
    per = np.where(highs > lows, bins, 1).astype(np.int64)
    codes = _bin_columns(X, lows, highs, per)
    return DiscretizedView(codes, tuple(int(b) for b in per), lows, highs)


def discretize(data, bins=10):
    return discretize_array(data.features, bins)


def _parse_float(text):
    try:
        value = float(text)
    except ValueError:
        return None
    return value



def _read_table(path, header):
    if not os.path.exists(path):
        raise FileNotFoundError(f"file not found: {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if header:
        if not rows:
            raise EmptyDataset(f"{path}: no header row")
        names = [c.strip() for c in rows[0]]
        rows = rows[1:]
    else:
        names = None
    if not rows:
        raise EmptyDataset(f"{path}: no data rows")
    width = len(names) if names is not None else len(rows[0])
    for i, r in enumerate(rows):
        if len(r) != width:
            line = i + 2 if header else i + 1
            raise MalformedRow(f"{path}:{line}: expected {width} cells, got {len(r)}")
    if names is None:
        names = [f"x{j}" for j in range(width)]
    return names, rows


def _feature_matrix(path, names, rows, feature_idx, declared=None):
    columns = []
    for j in feature_idx:
        cells = [r[j].strip() for r in rows]
        for i, c in enumerate(cells):
            if c in MISSING_TOKENS:
                raise MissingValue(f"{path}: missing value in column {names[j]!r}, row {i + 1}")
        parsed = [_parse_float(c) for c in cells]
        numeric = all(v is not None and math.isfinite(v) for v in parsed)
        if declared is not None and j not in declared and not numeric:
            bad = next(c for c, v in zip(cells, parsed) if v is None or not math.isfinite(v))
            raise NonNumericCell(f"{path}: column {names[j]!r} holds {bad!r}")
        if (declared is not None and j in declared) or not numeric:
            columns.append(_ordinal(cells).astype(float))
        else:
            columns.append(np.array(parsed, dtype=float))
    return np.column_stack(columns) if columns else np.empty((len(rows), 0))


def load_features(path, n_features, label_column=-1, header=True):
    """Read rows to predict on.

    A file with ``n_features`` columns is all features; one with an extra
    column has it taken as the label, returned as raw strings.

    Returns
    -------
    X : ndarray of shape (n, n_features)
    labels : list of str or None
    """
    names, rows = _read_table(path, header)
    width = len(names)
    if width == n_features:
        return _feature_matrix(path, names, rows, range(width)), None
    if width != n_features + 1:
        raise DimensionMismatch(f"{path}: {width} columns, model expects {n_features} features")
    label_idx = _column_index(label_column, names, width)
    feature_idx = [j for j in range(width) if j != label_idx]
    return (_feature_matrix(path, names, rows, feature_idx),
            [r[label_idx].strip() for r in rows])

def load_csv(path, label_column=-1, header=True, categorical=None, name=None):
    """Read a comma-separated file into a :class:`Dataset`.

    Parameters
    ----------
    path : str or path-like
    label_column : int or str
        Zero-based index (negative counts from the end) or header name.
    header : bool
        Whether the first row holds column names.
    categorical : iterable of str or int, optional
        Columns to ordinal-encode. When given, every other feature column is
        declared numeric and a non-numeric cell raises ``NonNumericCell``.
        When omitted, any column with a non-numeric cell is treated as
        categorical.

    Labels and categorical values are numbered in order of first occurrence.
    Missing cells (empty, ``?``, ``NA``) are rejected with ``MissingValue``.
    """
    names, rows = _read_table(path, header)
    width = len(names)

    label_idx = _column_index(label_column, names, width)
    feature_idx = [j for j in range(width) if j != label_idx]
    if categorical is not None:
        declared = {_column_index(c, names, width) for c in categorical}
    else:
        declared = None

    X = _feature_matrix(path, names, rows, feature_idx, declared)

    label_cells = [r[label_idx].strip() for r in rows]
    if any(c in MISSING_TOKENS for c in label_cells):
        raise MissingValue(f"{path}: missing label")
    class_names = list(dict.fromkeys(label_cells))
    if len(class_names) < 2:
        raise SingleClass(f"{path}: only one class present ({class_names[0]!r})")
    lookup = {c: k for k, c in enumerate(class_names)}
    labels = np.array([lookup[c] for c in label_cells], dtype=np.int64)

    stem = name if name is not None else os.path.splitext(os.path.basename(path))[0]
    return Dataset(X, labels, [names[j] for j in feature_idx], class_names, stem)


def _column_index(col, names, width):
    if isinstance(col, str) and not col.lstrip("-").isdigit():
        if col not in names:
            raise DataError(f"no column named {col!r}")
        return names.index(col)
    idx = int(col)
    if not -width <= idx < width:
        raise DataError(f"column index {idx} out of range for {width} columns")
    return idx % width


def _ordinal(cells):
    lookup = {}
    return np.array([lookup.setdefault(c, len(lookup)) for c in cells], dtype=np.int64)


def builtin_path(name):
    """Path to a bundled CSV, or to ``$BRF_DATA_DIR/<name>.csv`` when that exists."""
    extra = os.environ.get("BRF_DATA_DIR")
    if extra:
        candidate = os.path.join(extra, f"{name}.csv")
        if os.path.exists(candidate):
            return candidate
    ref = resources.files("brforest") / "data" / f"{name}.csv"
    with resources.as_file(ref) as p:
        if os.path.exists(p):
            return str(p)
    raise FileNotFoundError(
        f"file not found: dataset {name!r} is not bundled; place {name}.csv in $BRF_DATA_DIR")


def load_builtin(name):
    """Load one of the bundled UCI tables (label in the last column)."""
    return load_csv(builtin_path(name), label_column=-1, header=True, name=name)


def bootstrap_indices(n, rng_seed):
    rng = np.random.default_rng(rng_seed)
    return rng.integers(0, n, size=n)


def bootstrap_sample(data, rng_seed):
    """``n`` rows drawn uniformly with replacement; same seed, same sample."""
    return data.take(bootstrap_indices(data.n_samples, rng_seed))


def select_feature_subset(n_features, h, rng_seed):
    """``h`` distinct feature ids drawn without replacement, sorted ascending."""
    if h < 1:
        raise ValueError("subset size must be >= 1")
    if h > n_features:
        raise SubsetTooLarge(f"cannot select {h} features out of {n_features}")
    rng = np.random.default_rng(rng_seed)
    return sorted(int(j) for j in rng.choice(n_features, size=h, replace=False))


@dataclass(frozen=True, eq=False)
class FoldPlan:
    """Fold id for every row."""

    k: int
    assignments: np.ndarray

    def split(self, fold):
        """Return ``(train_rows, test_rows)`` for one fold."""
        test = np.flatnonzero(self.assignments == fold)
        train = np.flatnonzero(self.assignments != fold)
        return train, test

    def sizes(self):
        return [int(c) for c in np.bincount(self.assignments, minlength=self.k)]

    def __eq__(self, other):
        if not isinstance(other, FoldPlan):
            return NotImplemented
        return self.k == other.k and np.array_equal(self.assignments, other.assignments)

    def to_json(self):
        return json.dumps({"k": self.k, "assignments": [int(a) for a in self.assignments]})

    @classmethod
    def from_json(cls, text):
        obj = json.loads(text)
        return cls(int(obj["k"]), np.asarray(obj["assignments"], dtype=np.int64))


def make_folds(data, k, rng_seed):
    """Random permutation dealt round-robin into ``k`` folds (not stratified)."""
    n = data if isinstance(data, (int, np.integer)) else data.n_samples
    if k < 2:
        raise ValueError("need at least 2 folds")
    if k > n:
        raise TooManyFolds(f"{k} folds for {n} rows")
    perm = np.random.default_rng(rng_seed).permutation(n)
    assignments = np.empty(n, dtype=np.int64)
    assignments[perm] = np.arange(n) % k
    return FoldPlan(k, assignments)
