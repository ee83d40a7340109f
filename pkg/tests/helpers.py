"""Shared fixtures and independent oracles for the test suite."""

from __future__ import annotations

import itertools
from fractions import Fraction

from misinfogames.adaptation import AdaptationConfig, traverse
from misinfogames.errors import DegenerateGameError
from misinfogames.experiments import DEGENERATE_RETRIES, Setting, random_misinfo
from misinfogames.game import NormalFormGame


def brute_expected(game: NormalFormGame, profile, player):
    """Direct sum over every cell, no support pruning."""
    total = Fraction(0)
    for prof in itertools.product(*(range(c) for c in game.strategy_counts)):
        weight = Fraction(1)
        for i, s in enumerate(prof):
            weight *= Fraction(profile[i][s])
        total += weight * game.payoffs[game.index_of(prof)][player]
    return total


def brute_is_nash(game: NormalFormGame, profile) -> bool:
    """Exact best-response audit: no pure deviation beats the profile's payoff."""
    for i, count in enumerate(game.strategy_counts):
        base = brute_expected(game, profile, i)
        for s in range(count):
            dev = list(profile)
            dev[i] = tuple(Fraction(int(j == s)) for j in range(count))
            if brute_expected(game, dev, i) > base:
                return False
    return True


def float_gap(game: NormalFormGame, profile) -> float:
    """Largest gain from a pure deviation, computed in floats without numpy."""
    def payoff(prof_mix, player):
        total = 0.0
        for prof in itertools.product(*(range(c) for c in game.strategy_counts)):
            w = 1.0
            for i, s in enumerate(prof):
                w *= float(prof_mix[i][s])
            total += w * float(game.payoffs[game.index_of(prof)][player])
        return total

    gap = 0.0
    for i, count in enumerate(game.strategy_counts):
        base = payoff(profile, i)
        for s in range(count):
            dev = list(profile)
            dev[i] = tuple(float(j == s) for j in range(count))
            gap = max(gap, payoff(dev, i) - base)
    return gap


def nash_2x2_oracle(game: NormalFormGame):
    """Every equilibrium of a nondegenerate 2x2 game from closed-form indifference."""
    out = set()
    for prof in itertools.product(range(2), range(2)):
        mix = tuple(tuple(Fraction(int(j == s)) for j in range(2)) for s in prof)
        if brute_is_nash(game, mix):
            out.add(mix)
    a = [[game.cell((i, j))[0] for j in range(2)] for i in range(2)]
    b = [[game.cell((i, j))[1] for j in range(2)] for i in range(2)]
    den_q = a[0][0] - a[0][1] - a[1][0] + a[1][1]
    den_p = b[0][0] - b[0][1] - b[1][0] + b[1][1]
    if den_q != 0 and den_p != 0:
        q = (a[1][1] - a[0][1]) / den_q  # column's weight on s1 making row indifferent
        p = (b[1][1] - b[1][0]) / den_p
        if 0 < p < 1 and 0 < q < 1:
            out.add(((p, 1 - p), (q, 1 - q)))
    return out


def nondegenerate_instances(shape, count, seed=0, config=AdaptationConfig()):
    """Seeded random instances with traversal results, skipping draws that hit degenerate views.

    Uses the harness rule: each run index gets up to ``DEGENERATE_RETRIES``
    redraws; run indices that still fail are skipped.
    """
    setting = Setting(tuple(shape), runs=1, seed=seed)
    found = []
    run = 0
    while len(found) < count:
        for attempt in range(DEGENERATE_RETRIES + 1):
            mg = random_misinfo(setting, run, attempt)
            try:
                graph = traverse(mg, config)
            except DegenerateGameError:
                continue
            found.append((mg, graph))
            break
        run += 1
    return found
