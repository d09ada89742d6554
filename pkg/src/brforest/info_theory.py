"""Plug-in (count-based) information measures over discrete code columns.

All quantities are in bits. Histogram terms are summed in sorted order so that
results do not depend on symbol ids or argument order.
"""
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import EmptyHistogram, LengthMismatch

#: Pre-clamp values down to this are treated as estimator round-off.
NEGATIVE_TOLERANCE = 1e-9


@dataclass(frozen=True, eq=False)
class JointCounts:
    """Dense contingency table of one or more discrete columns."""

    dims: tuple
    counts: np.ndarray
    total: int

    def marginal(self, axes):
        """Counts summed over every axis not listed in ``axes``."""
        drop = tuple(a for a in range(len(self.dims)) if a not in axes)
        table = self.counts.sum(axis=drop) if drop else self.counts
        return JointCounts(tuple(self.dims[a] for a in axes), table, self.total)


def joint_counts(*columns):
    cols = [np.asarray(c, dtype=np.int64) for c in columns]
    _check_lengths(*cols)
    dims = tuple(int(c.max()) + 1 if c.size else 0 for c in cols)
    counts = np.zeros(dims, dtype=np.int64)
    np.add.at(counts, tuple(cols), 1)
    return JointCounts(dims, counts, int(cols[0].size))


def _check_lengths(*cols):
    n = len(cols[0])
    for c in cols[1:]:
        if len(c) != n:
            raise LengthMismatch(f"column lengths {n} and {len(c)} differ")


def entropy(counts):
    """Shannon entropy of a histogram, with 0 log 0 = 0."""
    c = np.sort(np.asarray(counts, dtype=float).ravel())
    total = c.sum()
    if total <= 0:
        raise EmptyHistogram("histogram has no mass")
    p = c[c > 0] / total
    return max(0.0, float(-np.sum(p * np.log2(p))))


def _codes_entropy(*cols):
    # entropy of the joint symbol formed by the given columns
    if len(cols) == 1:
        keys = cols[0]
    else:
        keys = np.ravel_multi_index(cols, tuple(int(c.max()) + 1 for c in cols))
    return entropy(np.unique(keys, return_counts=True)[1])


def mutual_information(x, y):
    """I(X;Y) = H(X) + H(Y) - H(X,Y), clamped at zero."""
    x = np.asarray(x, dtype=np.int64)
    y = np.asarray(y, dtype=np.int64)
    _check_lengths(x, y)
    if x.size == 0:
        raise LengthMismatch("empty columns")
    value = _codes_entropy(x) + _codes_entropy(y) - _codes_entropy(x, y)
    return max(0.0, value)


def conditional_mutual_information(x, y, z=(), clamp=True):
    """I(X;Y|Z) as the joint-weighted sum over observed (x, y, z) cells.

    ``z`` is a sequence of columns (or an ``(n, k)`` array); the columns are
    composed into one product-alphabet symbol. Cells with no mass contribute
    nothing. With empty ``z`` this is the mutual information.
    """
    x = np.ascontiguousarray(x, dtype=np.int64)
    y = np.ascontiguousarray(y, dtype=np.int64)
    zs = _stack(z, x.size)
    _check_lengths(x, y, zs)
    if x.size == 0:
        raise LengthMismatch("empty columns")
    value = kernels.cmi_sum(x, y, zs)
    return max(0.0, value) if clamp else value


def _stack(z, n):
    if isinstance(z, np.ndarray) and z.ndim == 2:
        return np.ascontiguousarray(z, dtype=np.int64)
    if len(z) and np.ndim(z[0]) == 0:
        # a single column passed bare
        z = [z]
    cols = [np.asarray(c, dtype=np.int64) for c in z]
    if not cols:
        return np.zeros((n, 0), dtype=np.int64)
    _check_lengths(*cols)
    return np.ascontiguousarray(np.column_stack(cols))


def _gain_and_split(feature_codes, labels):
    f = np.asarray(feature_codes, dtype=np.int64)
    y = np.asarray(labels, dtype=np.int64)
    _check_lengths(f, y)
    # H(Y|F) = H(F,Y) - H(F)
    h_f = _codes_entropy(f)
    gain = _codes_entropy(y) - (_codes_entropy(f, y) - h_f)
    return max(0.0, gain), h_f


def information_gain(feature_codes, labels):
    """H(labels) - H(labels | feature)."""
    return _gain_and_split(feature_codes, labels)[0]


def gain_ratio(feature_codes, labels):
    """Information gain divided by split information; 0 when the feature is constant."""
    gain, split_info = _gain_and_split(feature_codes, labels)
    if split_info <= 0.0:
        return 0.0
    return gain / split_info


def _plogp_sum(counts, axis):
    c = counts.astype(float)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(c > 0, c * np.log2(np.where(c > 0, c, 1.0)), 0.0)
    return terms.sum(axis=axis)


def split_scores(codes, labels, criterion="gain_ratio"):
    """Gain ratio (or information gain) of every column of ``codes`` at once.

    Parameters
    ----------
    codes : ndarray of shape (n, k)
        Non-negative bin codes.
    labels : ndarray of shape (n,)
    criterion : {"gain_ratio", "info_gain"}

    Returns
    -------
    ndarray of shape (k,)
    """
    codes = np.asarray(codes, dtype=np.int64)
    y = np.asarray(labels, dtype=np.int64)
    n, k = codes.shape
    if y.shape[0] != n:
        raise LengthMismatch(f"{n} rows of codes, {y.shape[0]} labels")
    if k == 0:
        return np.zeros(0)
    n_bins = int(codes.max()) + 1
    n_cls = int(y.max()) + 1
    offsets = np.arange(k, dtype=np.int64)[None, :] * (n_bins * n_cls)
    keys = offsets + codes * n_cls + y[:, None]
    joint = np.bincount(keys.ravel(), minlength=k * n_bins * n_cls).reshape(k, n_bins, n_cls)
    per_bin = joint.sum(axis=2)
    log_n = np.log2(n)
    # H = log2(n) - sum(c log2 c) / n
    h_f = log_n - _plogp_sum(per_bin, axis=1) / n
    h_fy = log_n - _plogp_sum(joint.reshape(k, -1), axis=1) / n
    h_y = log_n - _plogp_sum(np.bincount(y), axis=0) / n
    gain = np.maximum(0.0, h_y - (h_fy - h_f))
    if criterion == "info_gain":
        return gain
    constant = (per_bin > 0).sum(axis=1) <= 1
    return np.where(constant, 0.0, gain / np.where(constant, 1.0, h_f))
