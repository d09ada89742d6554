"""Cross-validation reports, the tree-count sweep and the consistency experiment."""
import math
import statistics
import time
from dataclasses import replace

import numpy as np

from .dataset import Dataset, make_folds
from .forest import ForestConfig, train

REPORT_FORMAT = "brforest-bench"
REPORT_VERSION = 1

#: Mean of class 1 is +SHIFT, class 0 is -SHIFT (both coordinates), unit variance.
GAUSSIAN_SHIFT = 1.0


def timed_train(data, cfg, repeats=1):
    """Train ``repeats`` times; return the last model and the median wall-clock seconds."""
    times = []
    model = None
    for _ in range(max(1, repeats)):
        start = time.perf_counter()
        model = train(data, cfg)
        times.append(time.perf_counter() - start)
    return model, statistics.median(times)


def cross_validate(data, cfg, k=5, seed=None, timing_repeats=1, plan=None):
    """k-fold accuracy of one configuration.

    The fold plan is drawn from ``seed`` (default: the forest's master seed)
    unless one is passed in, so several variants can share it.
    """
    seed = cfg.seed if seed is None else seed
    if plan is None:
        plan = make_folds(data, k, seed)
    accuracies = []
    seconds = []
    for fold in range(plan.k):
        train_rows, test_rows = plan.split(fold)
        model, elapsed = timed_train(data.take(train_rows), cfg, timing_repeats)
        accuracies.append(model.score(data.features[test_rows], data.labels[test_rows]))
        seconds.append(elapsed)
    resolved = cfg.resolve(data.n_features)
    return {
        "dataset": data.name,
        "variant": cfg.variant,
        "k": plan.k,
        "seed": int(seed),
        "fold_accuracies": [float(a) for a in accuracies],
        "mean_accuracy": float(np.mean(accuracies)),
        "config": resolved.to_dict(),
        "timing": {"train_seconds": float(sum(seconds)),
                   "fold_train_seconds": [float(s) for s in seconds],
                   "repeats": int(max(1, timing_repeats))},
    }


def evaluate(data, cfg, variants=("brf", "baseline"), k=5, seed=None, timing_repeats=1):
    """Cross-validate every variant on one shared fold plan."""
    seed = cfg.seed if seed is None else seed
    plan = make_folds(data, k, seed)
    reports = [cross_validate(data, replace(cfg, variant=v), k, seed, timing_repeats, plan)
               for v in variants]
    return {"format": REPORT_FORMAT, "version": REPORT_VERSION, "reports": reports}


def sweep_trees(data, counts, cfg, k=5, seed=None):
    """``(trees, accuracy)`` pairs, one CV run per distinct tree count, sharing folds."""
    counts = sorted({int(c) for c in counts})
    if not counts:
        raise ValueError("no tree counts given")
    seed = cfg.seed if seed is None else seed
    plan = make_folds(data, k, seed)
    rows = []
    for T in counts:
        report = cross_validate(data, replace(cfg, n_trees=T), k, seed, plan=plan)
        rows.append((T, report["mean_accuracy"]))
    return rows


def gaussian_bayes_risk(shift=GAUSSIAN_SHIFT):
    """Bayes error of two unit-variance isotropic Gaussians at ``±(shift, shift)``, equal priors.

    The optimal boundary is the perpendicular bisector; the class means are
    ``2 * shift * sqrt(2)`` apart, so the error is ``Phi(-shift * sqrt(2))``.
    """
    return 0.5 * math.erfc(shift * math.sqrt(2.0) / math.sqrt(2.0))


def two_gaussians(n, rng, shift=GAUSSIAN_SHIFT):
    """``n`` draws of the two-class Gaussian task as a :class:`Dataset`."""
    y = rng.integers(0, 2, size=n)
    centers = np.where(y[:, None] == 1, shift, -shift)
    X = centers + rng.standard_normal((n, 2))
    if np.unique(y).size < 2:
        y[0] = 1 - y[0]
        X[0] = -X[0]
    return Dataset(X, y, ("x0", "x1"), ("neg", "pos"), "two_gaussians")


def consistency_config(n, base):
    """Per-``n`` configuration: leaves must keep growing with ``n`` for the error to approach Bayes."""
    tree = replace(base.tree, min_node_size=max(base.tree.min_node_size,
                                                int(math.ceil(math.sqrt(n)))))
    return replace(base, tree=tree)


def consistency(ns, seeds, cfg, n_test=5000):
    """Median held-out error at each training size, with the analytic Bayes risk.

    Returns rows ``(n, median_error, bayes_risk)``.
    """
    ns = [int(n) for n in ns]
    if any(b <= a for a, b in zip(ns, ns[1:])):
        raise ValueError("training sizes must be strictly increasing")
    bayes = gaussian_bayes_risk()
    errors = {n: [] for n in ns}
    for s in seeds:
        rng = np.random.default_rng([int(s), 7919])
        test = two_gaussians(n_test, rng)
        for n in ns:
            data = two_gaussians(n, np.random.default_rng([int(s), n]))
            model = train(data, replace(consistency_config(n, cfg), seed=int(s)))
            errors[n].append(1.0 - model.score(test.features, test.labels))
    return [(n, float(statistics.median(errors[n])), bayes) for n in ns]
