import itertools
from fractions import Fraction

import numpy as np
import pytest

from brforest.coalition_game import (
    FeatureGame,
    NodeContext,
    banzhaf_power_index,
    coalitions_of,
    interdependent,
    marginal_contribution,
    power_indices,
)
from brforest.errors import EmptyCoalition, GroupTooLarge

from oracles import banzhaf_by_subsets

WORKED_WINNING = {frozenset({2}), frozenset({2, 3}), frozenset({1, 2})}


def table_game(players, winning):
    return FeatureGame(players, delta=lambda p, c: int(c in winning.get(p, ())), g_max=5)


def test_worked_example_three_sevenths():
    game = table_game([1, 2, 3, 4], {4: WORKED_WINNING})
    report = banzhaf_power_index(4, game)
    assert report.fraction == Fraction(3, 7)
    assert (report.wins, report.coalitions) == (3, 7)
    assert report.to_dict()["index"] == pytest.approx(0.428571, abs=1e-6)


@pytest.mark.parametrize("value,expected", [(1, 1.0), (0, 0.0)])
def test_constant_predicates(value, expected):
    game = FeatureGame([0, 1, 2], delta=lambda p, c: value)
    assert [r.index for r in power_indices(game)] == [expected] * 3


def test_coalition_enumeration():
    subsets = list(coalitions_of([7, 8, 9]))
    assert len(subsets) == 7 and len(set(subsets)) == 7
    assert frozenset() not in subsets


def test_game_validation():
    with pytest.raises(GroupTooLarge):
        FeatureGame(range(6), delta=lambda p, c: 1)
    with pytest.raises(ValueError):
        FeatureGame([0], delta=lambda p, c: 1)
    with pytest.raises(ValueError):
        FeatureGame([0, 1], delta=lambda p, c: 1, tau=0.0)
    with pytest.raises(ValueError):
        FeatureGame([0, 1], delta=lambda p, c: 1, epsilon_dep=0.0)
    with pytest.raises(ValueError):
        FeatureGame([0, 0], delta=lambda p, c: 1)


def all_coalitions(players, player):
    return list(coalitions_of([p for p in players if p != player]))


@pytest.mark.parametrize("g", [2, 3])
def test_oracle_exhaustive_small_groups(g):
    players = list(range(g))
    target = g - 1
    subsets = all_coalitions(players, target)
    for bits in itertools.product([0, 1], repeat=len(subsets)):
        winning = {s for s, b in zip(subsets, bits) if b}
        game = table_game(players, {target: winning})
        got = banzhaf_power_index(target, game).fraction
        assert got == banzhaf_by_subsets(target, players, lambda s: s in winning)


@pytest.mark.parametrize("g", [4, 5])
def test_oracle_random_large_groups(g):
    rng = np.random.default_rng(g)
    players = [3, 11, 5, 20, 8][:g]
    for _ in range(200):
        target = int(rng.choice(players))
        subsets = all_coalitions(players, target)
        winning = {s for s in subsets if rng.random() < 0.5}
        game = table_game(players, {target: winning})
        assert banzhaf_power_index(target, game).fraction == \
            banzhaf_by_subsets(target, players, lambda s: s in winning)


def test_monotone_in_predicate():
    rng = np.random.default_rng(3)
    players = [0, 1, 2, 3]
    subsets = all_coalitions(players, 0)
    winning = set()
    last = Fraction(0)
    for s in rng.permutation(len(subsets)):
        winning.add(subsets[s])
        now = banzhaf_power_index(0, table_game(players, {0: set(winning)})).fraction
        assert now >= last
        last = now
    assert last == 1


def test_relabeling_permutes_reports():
    rng = np.random.default_rng(0)
    codes = rng.integers(0, 3, (60, 4))
    codes[:, 3] = codes[:, 0]
    base = {r.player: r.fraction for r in power_indices(FeatureGame([0, 1, 2, 3], NodeContext(codes)))}
    ids = [40, 7, 13, 2]
    game = FeatureGame(ids, NodeContext(codes, ids))
    moved = {r.player: r.fraction for r in power_indices(game)}
    assert {ids[j]: base[j] for j in range(4)} == moved


def test_interdependent_examples():
    rng = np.random.default_rng(11)
    col = rng.integers(0, 4, 50)
    ctx = NodeContext(np.column_stack([col, col, np.zeros(50, int)]))
    assert interdependent(0, 1, {0}, ctx)
    x, y = np.array([0, 0, 1, 1]), np.array([0, 1, 0, 1])
    ctx = NodeContext(np.column_stack([x, y]))
    assert not interdependent(0, 1, {0}, ctx)
    ctx = NodeContext(np.column_stack([x, y, np.zeros(4, int)]))
    assert not interdependent(0, 2, {0, 1}, ctx)


def test_marginal_contribution_examples():
    rng = np.random.default_rng(2)
    a = rng.integers(0, 4, 80)
    ctx = NodeContext(np.column_stack([a, a, np.zeros((80, 3), int)]))
    assert marginal_contribution(0, {1}, ctx) == 1
    assert marginal_contribution(0, {2, 3, 4}, ctx) == 0
    # one of two members interdependent: p = 1/2 >= tau wins
    assert marginal_contribution(0, {1, 2}, ctx, tau=0.5) == 1
    assert marginal_contribution(0, {1, 2}, ctx, tau=0.6) == 0
    with pytest.raises(EmptyCoalition):
        marginal_contribution(0, set(), ctx)


def test_memo_counts_distinct_evaluations():
    rng = np.random.default_rng(4)
    ctx = NodeContext(rng.integers(0, 3, (40, 4)))
    game = FeatureGame([0, 1, 2, 3], ctx)
    power_indices(game)
    first = ctx.evaluations
    power_indices(game)
    assert ctx.evaluations == first
    assert first <= 4 * 3 * 4


def test_index_and_coalition_count_invariants():
    rng = np.random.default_rng(9)
    for g in range(2, 6):
        ctx = NodeContext(rng.integers(0, 3, (30, g)))
        for r in power_indices(FeatureGame(range(g), ctx)):
            assert r.coalitions == 2 ** (g - 1) - 1
            assert 0.0 <= r.index <= 1.0
