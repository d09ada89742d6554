"""Single Banzhaf decision trees.

The root split feature maximizes gain ratio; deeper split features win a
Banzhaf power contest among a random group of candidates. Every split cuts a
feature at the midpoint of its node-local range, sending ``x <= threshold``
left. Growth stops when the node's misclassification fraction drops below
``stop_d``, the node is pure, too small, too deep, or cannot be split.
"""
from dataclasses import dataclass
from typing import NamedTuple, Optional, Union

import numpy as np

from . import kernels
from .coalition_game import (
    DEFAULT_EPSILON_DEP,
    DEFAULT_G_MAX,
    DEFAULT_TAU,
    FeatureGame,
    NodeContext,
    power_indices,
)
from .dataset import discretize_array
from .errors import DimensionMismatch, NoUsableFeature, Unsplittable
from .info_theory import split_scores


@dataclass(frozen=True)
class Leaf:
    counts: tuple

    @property
    def total(self):
        return sum(self.counts)


@dataclass(frozen=True)
class Internal:
    feature: int
    threshold: float
    left: "TreeNode"
    right: "TreeNode"


TreeNode = Union[Leaf, Internal]

TIE_BREAKS = ("lowest_id", "gain_ratio", "random")


@dataclass(frozen=True)
class TreeConfig:
    """Growth parameters for one tree.

    ``stop_d=None`` resolves to ``n_classes / 100`` when the tree is built.
    ``root_criterion`` is ``"gain_ratio"`` or ``"info_gain"``.
    """

    stop_d: Optional[float] = None
    group_size: int = 5
    max_depth: int = 30
    min_node_size: int = 2
    bins: int = 10
    tau: float = DEFAULT_TAU
    epsilon_dep: float = DEFAULT_EPSILON_DEP
    g_max: int = DEFAULT_G_MAX
    root_criterion: str = "gain_ratio"
    reuse_features: bool = True
    tie_break: str = "gain_ratio"

    def __post_init__(self):
        if self.stop_d is not None and not 0.0 <= self.stop_d < 1.0:
            raise ValueError(f"stop_d must lie in [0, 1), got {self.stop_d}")
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")
        if self.min_node_size < 1:
            raise ValueError("min_node_size must be >= 1")
        if self.bins < 2:
            raise ValueError("bins must be >= 2")
        if self.group_size < 1:
            raise ValueError("group_size must be >= 1")
        if not 0.0 < self.tau <= 1.0:
            raise ValueError("tau must lie in (0, 1]")
        if not self.epsilon_dep > 0.0:
            raise ValueError("epsilon_dep must be positive")
        if self.tie_break not in TIE_BREAKS:
            raise ValueError(f"tie_break must be one of {TIE_BREAKS}")
        if self.root_criterion not in ("gain_ratio", "info_gain"):
            raise ValueError(f"unknown root criterion {self.root_criterion!r}")

    def resolved_stop_d(self, n_classes):
        return n_classes / 100.0 if self.stop_d is None else self.stop_d


def midpoint_threshold(values):
    """Midpoint of the node-local range of ``values``."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise Unsplittable("no values")
    lo, hi = float(values.min()), float(values.max())
    if not lo < hi:
        raise Unsplittable(f"constant feature (value {lo})")
    mid = (lo + hi) / 2.0
    if not lo <= mid < hi:
        # adjacent floats, or overflow of lo + hi
        mid = lo + (hi - lo) / 2.0
        if not lo <= mid < hi:
            mid = lo
    return mid


#: Node values within this fraction of the range from the midpoint count as on it.
MIDPOINT_SNAP = 1e-9


def snap_threshold(values, threshold, reference=None):
    """Move ``threshold`` onto a known value lying within round-off of it.

    Rows exactly at the midpoint go left. Without the snap, rescaling a column
    can round the computed midpoint to just below such a row and send it right.
    ``reference`` holds further values of the feature (e.g. the full training
    column) to snap onto; by default only ``values`` are used.
    """
    values = np.asarray(values, dtype=float)
    lo, hi = values.min(), values.max()
    pool = values if reference is None else np.concatenate([values, np.asarray(reference, float)])
    near = pool[(np.abs(pool - threshold) <= MIDPOINT_SNAP * (hi - lo)) & (pool < hi) & (pool >= lo)]
    return float(near.max()) if near.size else threshold


def _splittable(X_node, feature):
    col = X_node[:, feature]
    return col.size > 0 and col.min() < col.max()


def select_root_feature(candidates, X_node, codes_node, labels, criterion="gain_ratio"):
    """Splittable candidate with the highest gain ratio; ties go to the lowest id.

    ``X_node`` and ``codes_node`` are indexed by feature id along axis 1.
    """
    candidates = sorted(candidates)
    usable = [f for f in candidates if _splittable(X_node, f)]
    if not usable:
        raise NoUsableFeature(f"all of {candidates} are constant at this node")
    scores = split_scores(codes_node[:, usable], labels, criterion)
    # argmax returns the first maximum, i.e. the lowest id
    return usable[int(np.argmax(scores))]


def rank_group(group, codes_node, cfg):
    """Swing reports for a candidate group, best first (index desc, id asc)."""
    group = sorted(group)
    ctx = NodeContext(codes_node[:, group], group)
    game = FeatureGame(group, ctx, cfg.tau, cfg.epsilon_dep, cfg.g_max)
    reports = power_indices(game)
    return sorted(reports, key=lambda r: (-r.fraction, r.player))


def select_internal_feature(candidates, X_node, codes_node, labels, cfg, rng):
    """Draw a random candidate group and return its Banzhaf winner.

    Falls back down the ranking when the winner is constant at this node.
    ``labels`` is accepted for signature parity with the root selector; the
    feature game itself looks only at feature interdependence.
    """
    candidates = sorted(candidates)
    if not candidates:
        raise NoUsableFeature("no candidates")
    size = min(cfg.group_size, len(candidates))
    group = sorted(int(f) for f in rng.choice(candidates, size=size, replace=False))
    if size == 1:
        ranking = group
    else:
        reports = rank_group(group, codes_node, cfg)
        if cfg.tie_break == "lowest_id":
            ranking = [r.player for r in reports]
        else:
            if cfg.tie_break == "gain_ratio":
                scores = split_scores(codes_node[:, group], labels, cfg.root_criterion)
                second = dict(zip(group, -scores))
            else:
                second = dict(zip(group, rng.permutation(len(group))))
            ranking = [r.player for r in sorted(
                reports, key=lambda r: (-r.fraction, second[r.player], r.player))]
    for f in ranking:
        if _splittable(X_node, f):
            return f
    raise NoUsableFeature(f"group {group} is constant at this node")


def select_gain_feature(candidates, X_node, codes_node, labels, cfg, rng):
    """Baseline internal selector: gain ratio over every candidate."""
    return select_root_feature(candidates, X_node, codes_node, labels, cfg.root_criterion)


def stop_check(counts, d):
    """True when the fraction of rows outside the majority class is below ``d``."""
    counts = np.asarray(counts)
    total = counts.sum()
    if total < 1:
        raise ValueError("empty histogram")
    return bool((1.0 - counts.max() / total) < d)


def build_tree(X, y, candidates, cfg, rng_seed, n_classes=None, internal_selector=None,
               reference=None):
    """Grow one tree on ``(X, y)`` using only the ``candidates`` feature ids.

    Parameters
    ----------
    X : ndarray of shape (n, M)
    y : ndarray of shape (n,)
        Class ids.
    candidates : sequence of int
        Feature ids the tree may split on.
    cfg : TreeConfig
    rng_seed : int
    n_classes : int, optional
        Histogram width; defaults to ``y.max() + 1``.
    internal_selector : callable, optional
        Replaces the Banzhaf selector below the root, with the signature of
        :func:`select_internal_feature`.
    reference : ndarray of shape (m, M), optional
        Extra rows whose values thresholds may snap onto (see
        :func:`snap_threshold`); the forest passes the full training table so
        out-of-bag rows route the same way after a rescaling.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=np.int64)
    if X.shape[0] == 0:
        raise ValueError("no rows")
    candidates = sorted(int(c) for c in candidates)
    if not candidates:
        raise ValueError("no candidate features")
    C = int(n_classes) if n_classes is not None else int(y.max()) + 1
    d = cfg.resolved_stop_d(C)
    select = internal_selector or select_internal_feature
    rng = np.random.default_rng(rng_seed)
    codes = np.zeros(X.shape, dtype=np.int64)
    codes[:, candidates] = discretize_array(X[:, candidates], cfg.bins).codes

    def grow(rows, depth, used):
        counts = np.bincount(y[rows], minlength=C)
        leaf = Leaf(tuple(int(c) for c in counts))
        if (counts.max() == rows.size or stop_check(counts, d)
                or depth >= cfg.max_depth or rows.size < cfg.min_node_size):
            return leaf
        pool = candidates if cfg.reuse_features else [f for f in candidates if f not in used]
        if not pool:
            return leaf
        X_node, codes_node, y_node = X[rows], codes[rows], y[rows]
        try:
            if depth == 0:
                f = select_root_feature(pool, X_node, codes_node, y_node, cfg.root_criterion)
            else:
                f = select(pool, X_node, codes_node, y_node, cfg, rng)
            threshold = snap_threshold(X_node[:, f], midpoint_threshold(X_node[:, f]),
                                       None if reference is None else reference[:, f])
        except (NoUsableFeature, Unsplittable):
            return leaf
        go_left = X_node[:, f] <= threshold
        left_rows, right_rows = rows[go_left], rows[~go_left]
        used = used | {f}
        left = grow(left_rows, depth + 1, used) if left_rows.size else leaf
        right = grow(right_rows, depth + 1, used) if right_rows.size else leaf
        return Internal(int(f), float(threshold), left, right)

    return grow(np.arange(X.shape[0]), 0, frozenset())


class FlatTree(NamedTuple):
    """Array form of a tree for vectorized routing; leaves have ``feature == -1``."""

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    counts: np.ndarray


def flatten(tree, n_classes=None):
    nodes = []

    def visit(node):
        idx = len(nodes)
        nodes.append(None)
        if isinstance(node, Leaf):
            nodes[idx] = (-1, 0.0, -1, -1, node.counts)
        else:
            li = visit(node.left)
            ri = visit(node.right)
            nodes[idx] = (node.feature, node.threshold, li, ri, None)
        return idx

    visit(tree)
    width = n_classes or max(len(n[4]) for n in nodes if n[4] is not None)
    counts = np.zeros((len(nodes), width), dtype=float)
    for i, n in enumerate(nodes):
        if n[4] is not None:
            counts[i, :len(n[4])] = n[4]
    return FlatTree(
        np.array([n[0] for n in nodes], dtype=np.int64),
        np.array([n[1] for n in nodes], dtype=float),
        np.array([n[2] for n in nodes], dtype=np.int64),
        np.array([n[3] for n in nodes], dtype=np.int64),
        counts,
    )


def leaf_of(tree, x):
    node = tree
    while isinstance(node, Internal):
        node = node.left if x[node.feature] <= node.threshold else node.right
    return node


def tree_posterior(tree, x):
    """Class frequencies of the leaf that ``x`` falls into."""
    leaf = leaf_of(tree, np.asarray(x, dtype=float))
    counts = np.asarray(leaf.counts, dtype=float)
    return counts / counts.sum()


def tree_posteriors(flat, X):
    """Row-wise leaf class frequencies for a batch of queries."""
    X = np.ascontiguousarray(X, dtype=float)
    if X.ndim != 2:
        raise DimensionMismatch("queries must be a 2-D array")
    needed = int(flat.feature.max()) + 1
    if X.shape[1] < needed:
        raise DimensionMismatch(f"tree uses feature {needed - 1}, queries have {X.shape[1]}")
    leaves = kernels.route(flat.feature, flat.threshold, flat.left, flat.right, X)
    counts = flat.counts[leaves]
    return counts / counts.sum(axis=1, keepdims=True)


def depth(tree):
    if isinstance(tree, Leaf):
        return 0
    return 1 + max(depth(tree.left), depth(tree.right))


def n_leaves(tree):
    if isinstance(tree, Leaf):
        return 1
    return n_leaves(tree.left) + n_leaves(tree.right)


def tree_to_dict(tree):
    if isinstance(tree, Leaf):
        return {"counts": list(tree.counts)}
    return {"feature": tree.feature, "threshold": tree.threshold,
            "left": tree_to_dict(tree.left), "right": tree_to_dict(tree.right)}


def tree_from_dict(obj):
    if "counts" in obj:
        return Leaf(tuple(int(c) for c in obj["counts"]))
    return Internal(int(obj["feature"]), float(obj["threshold"]),
                    tree_from_dict(obj["left"]), tree_from_dict(obj["right"]))
