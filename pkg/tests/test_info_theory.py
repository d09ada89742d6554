import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from brforest.errors import EmptyHistogram, LengthMismatch
from brforest.info_theory import (
    conditional_mutual_information,
    entropy,
    gain_ratio,
    information_gain,
    joint_counts,
    mutual_information,
    split_scores,
)

from oracles import cmi_by_cells, cmi_by_entropies, entropy_of


@pytest.mark.parametrize("counts,expected", [([1, 1], 1.0), ([4, 0], 0.0), ([3, 1], 0.811278)])
def test_entropy_examples(counts, expected):
    assert entropy(counts) == pytest.approx(expected, abs=1e-6)


def test_entropy_empty():
    with pytest.raises(EmptyHistogram):
        entropy([0, 0])


def test_mi_examples():
    assert mutual_information([0, 1, 0, 1], [0, 1, 0, 1]) == pytest.approx(1.0)
    assert mutual_information([0, 0, 1, 1], [0, 1, 0, 1]) == 0.0
    x, y = [0, 0, 1, 1, 1], [0, 1, 0, 0, 1]
    oracle = entropy_of(x) + entropy_of(y) - entropy_of(list(zip(x, y)))
    assert mutual_information(x, y) == pytest.approx(oracle, abs=1e-12)
    with pytest.raises(LengthMismatch):
        mutual_information([0, 1], [0])


def test_cmi_examples():
    assert conditional_mutual_information([0, 1, 0, 1], [0, 1, 0, 1], []) == pytest.approx(1.0)
    x, y = np.array([0, 0, 1, 1]), np.array([0, 1, 0, 1])
    assert conditional_mutual_information(x, y, [x ^ y]) == pytest.approx(1.0)
    assert conditional_mutual_information(x, y, [np.zeros(4, int)]) == 0.0
    with pytest.raises(LengthMismatch):
        conditional_mutual_information(x, y, [np.zeros(3, int)])


def test_cmi_accepts_bare_column_and_matrix():
    rng = np.random.default_rng(5)
    x, y, z = rng.integers(0, 3, (3, 40))
    a = conditional_mutual_information(x, y, z)
    assert a == conditional_mutual_information(x, y, [z])
    assert a == conditional_mutual_information(x, y, z[:, None])


def test_gain_ratio_examples():
    assert gain_ratio([0, 0, 1, 1], [0, 0, 1, 1]) == pytest.approx(1.0)
    assert gain_ratio([2, 2, 2, 2], [0, 1, 0, 1]) == 0.0
    assert gain_ratio([0, 0, 1, 1], [0, 1, 0, 1]) == 0.0
    assert information_gain([0, 0, 1, 1], [0, 0, 1, 1]) == pytest.approx(1.0)
    with pytest.raises(LengthMismatch):
        gain_ratio([0, 1], [0])


def test_split_scores_match_scalar():
    rng = np.random.default_rng(1)
    for _ in range(100):
        n = int(rng.integers(2, 60))
        codes = rng.integers(0, 5, (n, 6))
        codes[:, 0] = 3
        y = rng.integers(0, 3, n)
        np.testing.assert_allclose(split_scores(codes, y),
                                   [gain_ratio(codes[:, j], y) for j in range(6)], atol=1e-12)
        np.testing.assert_allclose(split_scores(codes, y, "info_gain"),
                                   [information_gain(codes[:, j], y) for j in range(6)], atol=1e-12)


def test_joint_counts_marginal():
    jc = joint_counts([0, 1, 1], [2, 0, 0])
    assert jc.dims == (2, 3) and jc.total == 3
    assert jc.marginal((0,)).counts.tolist() == [1, 2]


tables = st.integers(1, 50).flatmap(lambda n: st.tuples(
    *[st.lists(st.integers(0, 3), min_size=n, max_size=n) for _ in range(4)]))


@settings(max_examples=200, deadline=None)
@given(tables)
def test_cmi_matches_oracles(t):
    x, y, z1, z2 = t
    z = [z1, z2]
    value = conditional_mutual_information(x, y, z, clamp=False)
    assert value == pytest.approx(cmi_by_cells(x, y, z), abs=1e-9)
    assert value == pytest.approx(cmi_by_entropies(x, y, z), abs=1e-9)
    assert value >= -1e-9
    assert conditional_mutual_information(x, y, z) >= 0.0


@settings(max_examples=200, deadline=None)
@given(tables, st.permutations(range(4)))
def test_relabeling_invariance(t, perm):
    x, y, z1, _ = t
    px = [perm[v] for v in x]
    assert mutual_information(px, y) == pytest.approx(mutual_information(x, y), abs=1e-12)
    assert mutual_information(x, y) == mutual_information(y, x)
    assert conditional_mutual_information(px, y, [z1]) == pytest.approx(
        conditional_mutual_information(x, y, [z1]), abs=1e-12)
    assert gain_ratio(px, y) == pytest.approx(gain_ratio(x, y), abs=1e-12)
    assert entropy(np.bincount(px)) == pytest.approx(entropy(np.bincount(x)), abs=1e-12)
