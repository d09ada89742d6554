import json

import numpy as np
import pytest

from brforest.dataset import Dataset, load_builtin
from brforest.errors import DimensionMismatch, SubsetTooLarge
from brforest.forest import (
    ForestConfig,
    ForestModel,
    default_subset_size,
    default_tree_count,
    predict,
    predict_proba,
    train,
    tree_seeds,
)
from brforest.tree import Leaf, TreeConfig


def leaf_forest(votes, n_classes):
    """A model whose trees are single leaves voting for the given classes."""
    trees = []
    for v in votes:
        counts = [0] * n_classes
        counts[v] = 1
        trees.append((Leaf(tuple(counts)), (0,)))
    names = [f"c{k}" for k in range(n_classes)]
    return ForestModel(trees, ForestConfig(n_trees=len(votes)), ["x0"], names)


@pytest.mark.parametrize("votes,expected", [([1, 1, 2], 1), ([0, 1], 0), ([2, 1], 1)])
def test_majority_vote(votes, expected):
    assert predict(leaf_forest(votes, 3), [0.0]) == expected


def test_vote_share():
    assert predict_proba(leaf_forest([0, 0, 1, 2], 3), [0.0]).tolist() == [0.5, 0.25, 0.25]
    assert predict_proba(leaf_forest([2, 2], 3), [0.0]).tolist() == [0.0, 0.0, 1.0]


def test_defaults():
    assert default_tree_count(4) == 3
    assert default_tree_count(13) == 5
    assert default_tree_count(60) == 7
    assert default_subset_size(13) == 13
    cfg = ForestConfig(tree_formula_arg="h", n_features=2).resolve(60)
    assert cfg.n_trees == 2
    with pytest.raises(SubsetTooLarge):
        ForestConfig(n_features=5).resolve(4)


def test_seeds_depend_only_on_index():
    assert tree_seeds(3, 0) == tree_seeds(3, 0)
    assert tree_seeds(3, 0) != tree_seeds(3, 1)
    small = train(load_builtin("iris"), ForestConfig(n_trees=2, seed=5))
    big = train(load_builtin("iris"), ForestConfig(n_trees=4, seed=5))
    assert small.trees == big.trees[:2]


def test_single_tree_forest_equals_tree():
    d = load_builtin("wine")
    model = train(d, ForestConfig(n_trees=1, seed=2))
    votes = model.tree_votes(d.features)[0]
    assert np.array_equal(model.predict(d.features), votes)


def test_determinism_byte_identical():
    d = load_builtin("thyroid")
    cfg = ForestConfig(seed=11)
    assert train(d, cfg).to_json() == train(d, cfg).to_json()


def test_predict_is_argmax_of_proba():
    d = load_builtin("wine")
    model = train(d, ForestConfig(n_trees=6, seed=1))
    proba = model.predict_proba(d.features)
    assert np.array_equal(model.predict(d.features), np.argmax(proba, axis=1))
    assert np.all(np.abs(proba.sum(axis=1) - 1.0) <= 1e-12)
    hist = np.stack([np.bincount(v, minlength=3) for v in model.tree_votes(d.features).T])
    assert np.allclose(proba, hist / 6)


def test_duplicated_trees_keep_predictions():
    d = load_builtin("iris")
    model = train(d, ForestConfig(n_trees=5, seed=3))
    doubled = ForestModel(model.trees * 2, model.config, model.feature_names, model.class_names)
    assert np.array_equal(model.predict(d.features), doubled.predict(d.features))


def test_round_trip_and_dimension_check():
    d = load_builtin("iris")
    model = train(d, ForestConfig(seed=4))
    again = ForestModel.from_json(model.to_json())
    assert again.to_json() == model.to_json()
    assert np.array_equal(again.predict(d.features), model.predict(d.features))
    with pytest.raises(DimensionMismatch):
        ForestModel.from_json(model.to_json(), n_features=5)
    with pytest.raises(DimensionMismatch):
        model.predict(np.zeros((2, 3)))
    doc = json.loads(model.to_json())
    assert doc["format"] == "brforest-model" and doc["version"] == 1
    assert all(len(set(t["features"])) == model.config.n_features for t in doc["trees"])


@pytest.mark.parametrize("a,b", [(2.0, 1.0), (0.5, -3.0), (3.0, 0.25)])
def test_affine_invariant_predictions(a, b):
    d = load_builtin("wine")
    cfg = ForestConfig(n_trees=5, seed=8)
    base = train(d, cfg).predict(d.features)
    for j in (0, 6, 12):
        X = d.features.copy()
        X[:, j] = a * X[:, j] + b
        moved = Dataset(X, d.labels, d.feature_names, d.class_names, "wine")
        assert np.array_equal(train(moved, cfg).predict(X), base)


def test_baseline_variant_runs():
    d = load_builtin("iris")
    model = train(d, ForestConfig(variant="baseline", seed=0))
    assert model.score(d.features, d.labels) > 0.9
    with pytest.raises(ValueError):
        ForestConfig(variant="c45")


def test_worker_pool_matches_serial(monkeypatch):
    d = load_builtin("iris")
    cfg = ForestConfig(n_trees=3, seed=6)
    serial = train(d, cfg).to_json()
    monkeypatch.setenv("BRF_THREADS", "2")
    assert train(d, cfg).to_json() == serial
