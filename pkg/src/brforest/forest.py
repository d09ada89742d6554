"""Bagged ensembles of Banzhaf trees, plus the gain-ratio baseline forest."""
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Optional

import numpy as np

from .dataset import bootstrap_indices, select_feature_subset
from .errors import DimensionMismatch, SubsetTooLarge
from .tree import (
    TreeConfig,
    build_tree,
    flatten,
    select_gain_feature,
    tree_from_dict,
    tree_posteriors,
    tree_to_dict,
)

MODEL_FORMAT = "brforest-model"
MODEL_VERSION = 1
VARIANTS = ("brf", "baseline")


def default_tree_count(dim):
    """``round(log2(dim) + 1)``, rounding halves up."""
    return max(1, int(math.floor(math.log2(dim) + 1.0 + 0.5)))


def default_subset_size(n_features):
    """Features per tree when not configured: all ``M`` of them.

    Smaller subsets often leave a group of two players, whose indices always
    tie, so the coalition ranking carries no information.
    """
    return int(n_features)


@dataclass(frozen=True)
class ForestConfig:
    """Ensemble parameters.

    ``n_trees=None`` uses ``round(log2(D) + 1)`` where ``D`` is the total
    feature count, or the per-tree subset size when ``tree_formula_arg`` is
    ``"h"``. ``n_features=None`` uses :func:`default_subset_size`.
    """

    n_trees: Optional[int] = None
    n_features: Optional[int] = None
    tree: TreeConfig = field(default_factory=TreeConfig)
    variant: str = "brf"
    seed: int = 0
    tree_formula_arg: str = "M"

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if self.n_trees is not None and self.n_trees < 1:
            raise ValueError("n_trees must be >= 1")
        if self.n_features is not None and self.n_features < 1:
            raise ValueError("n_features must be >= 1")
        if self.tree_formula_arg not in ("M", "h"):
            raise ValueError("tree_formula_arg must be 'M' or 'h'")

    def resolve(self, n_features):
        """Copy with ``n_trees`` and ``n_features`` filled in for data with ``n_features`` columns."""
        h = self.n_features if self.n_features is not None else default_subset_size(n_features)
        if h > n_features:
            raise SubsetTooLarge(f"cannot select {h} features out of {n_features}")
        T = self.n_trees
        if T is None:
            T = default_tree_count(n_features if self.tree_formula_arg == "M" else h)
        return replace(self, n_trees=T, n_features=h)

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, obj):
        obj = dict(obj)
        obj["tree"] = TreeConfig(**obj.get("tree", {}))
        return cls(**obj)


def tree_seeds(master_seed, index):
    """Seeds for (bootstrap, feature subset, growth) of tree ``index``.

    Keyed on the tree index alone, so adding trees leaves earlier ones unchanged.
    """
    ss = np.random.SeedSequence(master_seed, spawn_key=(index,))
    return tuple(int(s) for s in ss.generate_state(3, dtype=np.uint32))


def _fit_one(args):
    X, y, n_classes, cfg, index = args
    boot_seed, subset_seed, grow_seed = tree_seeds(cfg.seed, index)
    rows = bootstrap_indices(X.shape[0], boot_seed)
    subset = select_feature_subset(X.shape[1], cfg.n_features, subset_seed)
    selector = select_gain_feature if cfg.variant == "baseline" else None
    tree = build_tree(X[rows], y[rows], subset, cfg.tree, grow_seed,
                      n_classes=n_classes, internal_selector=selector, reference=X)
    return tree, tuple(subset)


def _workers():
    try:
        return max(1, int(os.environ.get("BRF_THREADS", "1")))
    except ValueError:
        return 1


class ForestModel:
    """A trained ensemble. Treat as immutable."""

    def __init__(self, trees, config, feature_names, class_names, train_fingerprint=None):
        self.trees = list(trees)
        self.config = config
        self.feature_names = tuple(feature_names)
        self.class_names = tuple(class_names)
        self.train_fingerprint = train_fingerprint or {}
        self._flat = None

    @property
    def n_features(self):
        return len(self.feature_names)

    @property
    def n_classes(self):
        return len(self.class_names)

    def _flat_trees(self):
        if self._flat is None:
            self._flat = [flatten(t, self.n_classes) for t, _ in self.trees]
        return self._flat

    def _check(self, X):
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X[None, :]
        if X.ndim != 2 or X.shape[1] != self.n_features:
            raise DimensionMismatch(
                f"model expects {self.n_features} features, got {X.shape[-1]}")
        return X

    def tree_votes(self, X):
        """Per-tree class votes, shape ``(T, n)``; tree-level ties go to the lowest class."""
        X = self._check(X)
        return np.stack([np.argmax(tree_posteriors(f, X), axis=1)
                         for f in self._flat_trees()])

    def vote_counts(self, X):
        votes = self.tree_votes(X)
        counts = np.zeros((votes.shape[1], self.n_classes), dtype=np.int64)
        for row in votes:
            counts[np.arange(votes.shape[1]), row] += 1
        return counts

    def predict_proba(self, X):
        """Vote share of every class."""
        counts = self.vote_counts(X)
        return counts / len(self.trees)

    def predict(self, X):
        """Majority vote; ties go to the lowest class id."""
        return np.argmax(self.vote_counts(X), axis=1)

    def score(self, X, y):
        return float(np.mean(self.predict(X) == np.asarray(y)))

    def to_dict(self):
        return {
            "format": MODEL_FORMAT,
            "version": MODEL_VERSION,
            "config": self.config.to_dict(),
            "feature_names": list(self.feature_names),
            "class_names": list(self.class_names),
            "train_fingerprint": self.train_fingerprint,
            "trees": [{"features": list(s), "root": tree_to_dict(t)} for t, s in self.trees],
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_dict(cls, obj, n_features=None):
        if obj.get("format") != MODEL_FORMAT:
            raise ValueError("not a brforest model file")
        if obj.get("version") != MODEL_VERSION:
            raise ValueError(f"unsupported model version {obj.get('version')}")
        names = obj["feature_names"]
        expected = obj.get("train_fingerprint", {}).get("n_features", len(names))
        if expected != len(names) or (n_features is not None and n_features != len(names)):
            raise DimensionMismatch(
                f"model has {len(names)} feature names, expected "
                f"{n_features if n_features is not None else expected}")
        trees = []
        for entry in obj["trees"]:
            subset = tuple(int(f) for f in entry["features"])
            if any(f >= len(names) for f in subset):
                raise DimensionMismatch("tree references a feature beyond the model width")
            trees.append((tree_from_dict(entry["root"]), subset))
        return cls(trees, ForestConfig.from_dict(obj["config"]), names,
                   obj["class_names"], obj.get("train_fingerprint"))

    @classmethod
    def from_json(cls, text, n_features=None):
        return cls.from_dict(json.loads(text), n_features)


def train(data, cfg):
    """Fit ``cfg.n_trees`` trees, each on a bootstrap sample and a random feature subset."""
    cfg = cfg.resolve(data.n_features)
    jobs = [(data.features, data.labels, data.n_classes, cfg, t) for t in range(cfg.n_trees)]
    workers = min(_workers(), cfg.n_trees)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            trees = list(pool.map(_fit_one, jobs))
    else:
        trees = [_fit_one(job) for job in jobs]
    return ForestModel(trees, cfg, data.feature_names, data.class_names, data.fingerprint())


def predict(model, x):
    """Class id for a single feature vector."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise DimensionMismatch("expected a single feature vector")
    return int(model.predict(x[None, :])[0])


def predict_proba(model, x):
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise DimensionMismatch("expected a single feature vector")
    return model.predict_proba(x[None, :])[0]
