"""The per-node feature game and its Banzhaf power index.

Players are feature ids. For a player ``f`` and a non-empty coalition ``K`` of
other players, ``K + {f}`` is winning when the share of members of ``K`` that
are interdependent with ``f`` reaches ``tau``. Interdependence of a member
``k`` with ``f`` is a conditional mutual information test,
``I(f; k | K - {k}) > epsilon_dep``, on the node's discretized rows.

The index of ``f`` is the fraction of the ``2**(g-1) - 1`` non-empty
coalitions of the other players that ``f`` makes winning.
"""
import threading
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import EmptyCoalition, GroupTooLarge
from .info_theory import conditional_mutual_information

DEFAULT_TAU = 0.5
DEFAULT_EPSILON_DEP = 0.01
DEFAULT_G_MAX = 5


class NodeContext:
    """Discretized rows reaching one tree node, with a memo of CMI evaluations.

    Parameters
    ----------
    codes : ndarray of shape (n, k)
        Bin codes.
    feature_ids : sequence of int, optional
        Feature id of each column; defaults to ``0 .. k-1``.
    """

    def __init__(self, codes, feature_ids=None):
        self.codes = np.asarray(codes, dtype=np.int64)
        if feature_ids is None:
            feature_ids = range(self.codes.shape[1])
        self.column = {int(f): j for j, f in enumerate(feature_ids)}
        self._memo = {}
        self._lock = threading.Lock()
        self.evaluations = 0

    def cmi(self, a, b, given):
        """I(a; b | given) in bits; symmetric in ``a`` and ``b`` so cached once per pair."""
        given = frozenset(given)
        key = (min(a, b), max(a, b), given)
        value = self._memo.get(key)
        if value is None:
            cols = self.codes
            col = self.column
            z = cols[:, [col[f] for f in sorted(given)]]
            value = conditional_mutual_information(
                np.ascontiguousarray(cols[:, col[key[0]]]),
                np.ascontiguousarray(cols[:, col[key[1]]]), z)
            with self._lock:
                value = self._memo.setdefault(key, value)
                self.evaluations += 1
        return value


@dataclass(frozen=True)
class SwingReport:
    player: int
    wins: int
    coalitions: int

    @property
    def index(self):
        return self.wins / self.coalitions if self.coalitions else 0.0

    @property
    def fraction(self):
        return Fraction(self.wins, self.coalitions) if self.coalitions else Fraction(0)

    def to_dict(self):
        return {"player": self.player, "wins": self.wins,
                "coalitions": self.coalitions, "index": self.index}


@dataclass(frozen=True, eq=False)
class FeatureGame:
    """A cooperative game over a small group of candidate features.

    ``delta`` overrides the data-driven winning predicate; it is called as
    ``delta(player, coalition)`` with a frozenset coalition and must return
    0 or 1. Used for inspection fixtures and tests.
    """

    players: tuple
    context: NodeContext = None
    tau: float = DEFAULT_TAU
    epsilon_dep: float = DEFAULT_EPSILON_DEP
    g_max: int = DEFAULT_G_MAX
    delta: object = None

    def __post_init__(self):
        players = tuple(int(p) for p in self.players)
        object.__setattr__(self, "players", players)
        if len(set(players)) != len(players):
            raise ValueError(f"duplicate players in {players}")
        if len(players) > self.g_max:
            raise GroupTooLarge(f"group of {len(players)} exceeds g_max={self.g_max}")
        if len(players) < 2:
            raise ValueError("a feature game needs at least two players")
        if not 0.0 < self.tau <= 1.0:
            raise ValueError(f"tau must lie in (0, 1], got {self.tau}")
        if not self.epsilon_dep > 0.0:
            raise ValueError("epsilon_dep must be positive")
        if self.delta is None and self.context is None:
            raise ValueError("need a node context or a delta predicate")

    def marginal(self, player, coalition):
        if self.delta is not None:
            return int(self.delta(player, frozenset(coalition)))
        return marginal_contribution(player, coalition, self.context,
                                     self.tau, self.epsilon_dep)


def interdependent(f_i, f_j, coalition, ctx, epsilon_dep=DEFAULT_EPSILON_DEP):
    """Whether coalition member ``f_i`` depends on outsider ``f_j`` given the rest of the coalition."""
    rest = frozenset(coalition) - {f_i}
    return ctx.cmi(f_j, f_i, rest) > epsilon_dep


def marginal_contribution(f_i, coalition, ctx, tau=DEFAULT_TAU,
                          epsilon_dep=DEFAULT_EPSILON_DEP):
    """1 if ``coalition + {f_i}`` is winning, else 0."""
    coalition = frozenset(coalition)
    if not coalition:
        raise EmptyCoalition("interdependence ratio is undefined for an empty coalition")
    mu = sum(interdependent(f, f_i, coalition, ctx, epsilon_dep) for f in coalition)
    return int(mu / len(coalition) >= tau)


def coalitions_of(others):
    """Every non-empty subset of ``others``, in bitmask order."""
    others = tuple(others)
    for mask in range(1, 1 << len(others)):
        yield frozenset(o for bit, o in enumerate(others) if mask >> bit & 1)


def banzhaf_power_index(f_i, game):
    """Count the coalitions of the other players that ``f_i`` makes winning."""
    if f_i not in game.players:
        raise ValueError(f"{f_i} is not a player of this game")
    if len(game.players) > game.g_max:
        raise GroupTooLarge(f"group of {len(game.players)} exceeds g_max={game.g_max}")
    others = [p for p in game.players if p != f_i]
    wins = 0
    total = 0
    for coalition in coalitions_of(others):
        wins += game.marginal(f_i, coalition)
        total += 1
    return SwingReport(f_i, wins, total)


def power_indices(game):
    return [banzhaf_power_index(p, game) for p in game.players]
