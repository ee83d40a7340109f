"""Enlarging games with dummy players and dominated strategies.

New players get a single strategy and a payoff of zero everywhere.  New
strategies are appended at the end of a player's list and every cell they
create is filled with ``m`` for all players, where ``m`` is one less than the
smallest payoff currently in the game.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .errors import DegenerateGameError, InflationError
from .game import NormalFormGame, StrategyProfile, pure_as_mixed
from .nash import all_nash, pure_nash


def compatible(g: NormalFormGame, sigma: StrategyProfile, g2: NormalFormGame, sigma2: StrategyProfile) -> bool:
    """Profiles agree on every common player and common strategy."""
    for i in range(min(g.num_players, g2.num_players)):
        for j in range(min(g.strategy_counts[i], g2.strategy_counts[i])):
            if sigma[i][j] != sigma2[i][j]:
                return False
    return True


def add_player(game: NormalFormGame, player_id: Optional[int] = None) -> NormalFormGame:
    n = game.num_players
    if player_id is None:
        player_id = n
    if player_id < n:
        raise InflationError(f"player {player_id} already exists")
    if player_id != n:
        raise InflationError(f"players are positional; the next player id is {n}, got {player_id}")
    cells = tuple(cell + (Fraction(0),) for cell in game.payoffs)
    return NormalFormGame(game.strategy_counts + (1,), cells)


def filler_value(game: NormalFormGame) -> Fraction:
    values = [x for cell in game.payoffs for x in cell]
    return (min(values) if values else Fraction(0)) - 1


def add_strategy(game: NormalFormGame, player: int, strategy_label=None) -> NormalFormGame:
    """Append one strategy for ``player``; ``strategy_label`` is accepted for symmetry but positions are what count."""
    if not 0 <= player < game.num_players:
        raise InflationError(f"no player {player}")
    m = filler_value(game)
    filler = tuple(m for _ in range(game.num_players))
    counts = list(game.strategy_counts)
    old = counts[player]
    counts[player] += 1

    def fill(prof):
        if prof[player] < old:
            return game.cell(prof)
        return filler

    return NormalFormGame.from_function(counts, fill)


def inflate_game(game: NormalFormGame, target_players: int, target_strategy_counts: Sequence[int]) -> NormalFormGame:
    """Add players (ascending) and then strategies (per player, ascending) up to the target shape."""
    target = tuple(target_strategy_counts)
    if len(target) != target_players:
        raise InflationError(f"target lists {len(target)} strategy counts for {target_players} players")
    if target_players < game.num_players:
        raise InflationError(f"cannot shrink from {game.num_players} to {target_players} players")
    for i, c in enumerate(game.strategy_counts):
        if target[i] < c:
            raise InflationError(f"player {i} has {c} strategies, target asks for {target[i]}")
    out = game
    for pid in range(game.num_players, target_players):
        out = add_player(out, pid)
    for i in range(target_players):
        while out.strategy_counts[i] < target[i]:
            out = add_strategy(out, i)
    return out


@dataclass(frozen=True)
class InflationReport:
    is_inflated: bool
    violated_bullet: Optional[int] = None
    witness: Optional[tuple] = None
    ne_mode: str = "exact"

    def __bool__(self):
        return self.is_inflated


def _equilibria(game: NormalFormGame, exact: bool):
    if exact:
        eq = all_nash(game)
        if eq.degenerate:
            raise DegenerateGameError("cannot certify equilibrium correspondence for a degenerate game", game)
        return list(eq.profiles)
    return [pure_as_mixed(game, p) for p in pure_nash(game)]


def is_inflated_version(g: NormalFormGame, g2: NormalFormGame) -> InflationReport:
    """Check whether ``g2`` is an inflated version of ``g``.

    Payoff conditions are checked exactly.  The equilibrium correspondence uses
    the exact solver when both games have at most two players and pure
    equilibria otherwise (recorded in ``ne_mode``).
    """
    n, n2 = g.num_players, g2.num_players
    if n > n2:
        return InflationReport(False, 1, (n, n2))
    for i in range(n):
        if g.strategy_counts[i] > g2.strategy_counts[i]:
            return InflationReport(False, 2, (i, g.strategy_counts[i], g2.strategy_counts[i]))
    extra = [range(c) for c in g2.strategy_counts[n:]]
    for prof in g.profiles():
        cell = g.cell(prof)
        for tail in itertools.product(*extra):
            prof2 = prof + tail
            cell2 = g2.cell(prof2)
            if any(cell[i] != cell2[i] for i in range(n)):
                return InflationReport(False, 3, (prof, prof2))

    exact = n <= 2 and n2 <= 2
    mode = "exact" if exact else "pure"
    ne = _equilibria(g, exact)
    ne2 = _equilibria(g2, exact)
    for sigma in ne:
        if not any(compatible(g, sigma, g2, s2) for s2 in ne2):
            return InflationReport(False, 4, (sigma,), mode)
    for s2 in ne2:
        if not any(compatible(g, sigma, g2, s2) for sigma in ne):
            return InflationReport(False, 5, (s2,), mode)
    return InflationReport(True, None, None, mode)
