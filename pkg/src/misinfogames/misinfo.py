"""Misinformation games: one actual game plus one subjective view per player."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from .errors import DegenerateGameError, MisinfoGameError, NonCanonicalError, ShapeError, UndefinedMetricError
from .game import (
    SUPPORT_EPS,
    NormalFormGame,
    PureProfile,
    StrategyProfile,
    ratio,
    social_optimum,
    social_welfare,
    support,
)
from .inflation import inflate_game
from .nash import DEDUPE_TOL, DEFAULT_TOL, all_nash

PositionVector = PureProfile
PositionSet = tuple[PositionVector, ...]


def position_set(positions: Iterable[Sequence[int]]) -> PositionSet:
    """Canonical sorted, duplicate-free form of a set of positions."""
    return tuple(sorted({tuple(p) for p in positions}))


@dataclass(frozen=True, eq=False)
class MisinformationGame:
    actual: NormalFormGame
    subjective: tuple[NormalFormGame, ...]

    def __post_init__(self):
        object.__setattr__(self, "subjective", tuple(self.subjective))

    @property
    def games(self) -> tuple[NormalFormGame, ...]:
        return (self.actual,) + self.subjective

    @property
    def num_players(self) -> int:
        return self.actual.num_players

    @property
    def shape(self) -> tuple[int, ...]:
        return self.actual.strategy_counts

    @cached_property
    def _hash(self) -> int:
        return hash(self.games)

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if not isinstance(other, MisinformationGame):
            return NotImplemented
        return self is other or (self._hash == other._hash and self.games == other.games)

    def __repr__(self):
        shape = "x".join(map(str, self.shape)) or "empty"
        return f"MisinformationGame({shape}, {len(self.subjective)} views)"


def is_uniform(mg: MisinformationGame) -> bool:
    """One subjective view per player and every game shares the actual game's shape."""
    n = mg.num_players
    return len(mg.subjective) == n and all(g.strategy_counts == mg.shape for g in mg.subjective)


def is_canonical(mg: MisinformationGame) -> bool:
    """Uniform, and additionally every player has the same number of strategies."""
    return is_uniform(mg) and len(set(mg.shape)) <= 1


def require_uniform(mg: MisinformationGame) -> None:
    if not is_uniform(mg):
        raise NonCanonicalError(
            "views do not share the actual game's players and strategies; run inflation_process first"
        )


def add_game(mg: MisinformationGame, target_players: int, target_strategy_counts: Sequence[int]) -> MisinformationGame:
    """Append a subjective view obtained by inflating the empty game to the target shape.

    The single profile of the empty game after adding players pays 0 to
    everyone; the remaining cells are dominated fillers.
    """
    g = NormalFormGame.empty()
    g = inflate_game(g, target_players, target_strategy_counts)
    return MisinformationGame(mg.actual, mg.subjective + (g,))


def inflation_process(mg: MisinformationGame) -> MisinformationGame:
    """Bring every game to a common square shape and give each player a view."""
    games = mg.games
    n_union = max(g.num_players for g in games)
    k_union = max((c for g in games for c in g.strategy_counts), default=1)
    target = (k_union,) * n_union
    if is_canonical(mg) and mg.shape == target:
        return mg
    out = mg
    while len(out.subjective) < n_union:
        out = add_game(out, n_union, target)
    inflated = [inflate_game(g, n_union, target) for g in out.games]
    return MisinformationGame(inflated[0], tuple(inflated[1:]))


def _component_key(strategy) -> tuple:
    return tuple(strategy)


def _dedupe_components(strategies) -> list:
    out = []
    for s in strategies:
        if any(isinstance(p, float) for p in s):
            if any(max(abs(float(a) - float(b)) for a, b in zip(s, t)) < DEDUPE_TOL for t in out):
                continue
        elif s in out:
            continue
        out.append(s)
    return sorted(out, key=_component_key)


def equilibrium_components(
    mg: MisinformationGame,
    player: int,
    allow_degenerate: bool = False,
    tol: float = DEFAULT_TOL,
    seed: int = 0,
) -> list:
    """Player's own strategies across the equilibria of their subjective game."""
    eq = all_nash(mg.subjective[player], tol=tol, seed=seed)
    if not allow_degenerate and player in eq.continuum_players:
        raise DegenerateGameError(
            f"player {player}'s view has a continuum of equilibrium strategies", mg.subjective[player]
        )
    if not eq.profiles:
        raise MisinfoGameError(f"no equilibrium found for player {player}'s view")
    return _dedupe_components(sigma[player] for sigma in eq.profiles)


def nme(
    mg: MisinformationGame,
    allow_degenerate: bool = False,
    tol: float = DEFAULT_TOL,
    seed: int = 0,
) -> list[StrategyProfile]:
    """Every combination of per-player equilibrium strategies, in lexicographic order."""
    require_uniform(mg)
    per_player = [
        equilibrium_components(mg, i, allow_degenerate, tol, seed) for i in range(mg.num_players)
    ]
    return [tuple(combo) for combo in itertools.product(*per_player)]


def characteristic_set(profile: StrategyProfile, eps: float = SUPPORT_EPS) -> PositionSet:
    """Product of per-player supports, lexicographically ordered."""
    return tuple(itertools.product(*(support(s, eps) for s in profile)))


def unknown_positions(mg: MisinformationGame) -> PositionSet:
    """Positions where some view disagrees with the actual game."""
    require_uniform(mg)
    out = []
    for k, prof in enumerate(mg.actual.profiles()):
        cell = mg.actual.payoffs[k]
        if any(g.payoffs[k] != cell for g in mg.subjective):
            out.append(prof)
    return tuple(out)


def update(mg: MisinformationGame, v: Sequence[int]) -> MisinformationGame:
    """Overwrite every view's payoff vector at ``v`` with the actual one.

    Returns ``mg`` itself when nothing changes.
    """
    require_uniform(mg)
    idx = mg.actual.index_of(tuple(v))
    truth = mg.actual.payoffs[idx]
    changed = False
    views = []
    for g in mg.subjective:
        if g.payoffs[idx] == truth:
            views.append(g)
            continue
        cells = list(g.payoffs)
        cells[idx] = truth
        views.append(NormalFormGame(g.strategy_counts, tuple(cells)))
        changed = True
    if not changed:
        return mg
    return MisinformationGame(mg.actual, tuple(views))


def update_set(mg: MisinformationGame, xs: Iterable[Sequence[int]]) -> MisinformationGame:
    out = mg
    for v in xs:
        out = update(out, v)
    return out


def price_of_misinformation(mg: MisinformationGame, profiles=None, **nme_kwargs):
    """Social optimum of the actual game over the worst actual welfare among the NMEs."""
    if profiles is None:
        profiles = nme(mg, **nme_kwargs)
    profiles = list(profiles)
    if not profiles:
        raise UndefinedMetricError("price of misinformation needs at least one nme")
    _, opt = social_optimum(mg.actual)
    worst = min(social_welfare(mg.actual, sigma) for sigma in profiles)
    return ratio(opt, worst)


def mg_equal(a: MisinformationGame, b: MisinformationGame) -> bool:
    """Cell-by-cell exact comparison of all games."""
    if len(a.games) != len(b.games) or any(
        x.strategy_counts != y.strategy_counts for x, y in zip(a.games, b.games)
    ):
        raise ShapeError("misinformation games have different shapes")
    if a is b:
        return True
    return all(x.payoffs == y.payoffs for x, y in zip(a.games, b.games))

