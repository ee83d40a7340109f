"""Finite normal-form games with exact rational payoffs.

Pure profiles are 0-based index tuples.  Mixed profiles are plain tuples of
per-player probability tuples; entries are ``Fraction`` in exact mode and
``float`` in numeric mode.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterator, Sequence, Union

from .errors import ShapeError, UndefinedMetricError

Number = Union[Fraction, float]
PureProfile = tuple[int, ...]
MixedStrategy = tuple[Number, ...]
StrategyProfile = tuple[MixedStrategy, ...]

SUPPORT_EPS = 1e-7


def to_rational(value) -> Fraction:
    """Coerce an int, Fraction or ``"p/q"`` string to a reduced Fraction.

    Floats are rejected: payoffs must be exact.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not payoffs")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        num, sep, den = text.partition("/")
        try:
            n = int(num)
            d = int(den) if sep else 1
        except ValueError:
            raise ValueError(f"not a rational: {value!r}") from None
        if d == 0:
            raise ZeroDivisionError(f"zero denominator in {value!r}")
        return Fraction(n, d)
    raise TypeError(f"cannot use {type(value).__name__} as an exact payoff")


def format_rational(q: Fraction) -> Union[int, str]:
    return q.numerator if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True, eq=False)
class NormalFormGame:
    """Payoff tensor of a finite game, stored as a flat row-major tuple of cells.

    ``payoffs[k]`` is the payoff vector (one Fraction per player) of the k-th
    pure profile in ``itertools.product`` order.  A zero-player game has a
    single cell holding the empty vector.
    """

    strategy_counts: tuple[int, ...]
    payoffs: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        counts = tuple(int(c) for c in self.strategy_counts)
        if any(c < 1 for c in counts):
            raise ShapeError(f"strategy counts must be positive, got {counts}")
        n = len(counts)
        cells = tuple(tuple(to_rational(x) for x in cell) for cell in self.payoffs)
        if len(cells) != math.prod(counts):
            raise ShapeError(f"expected {math.prod(counts)} cells for shape {counts}, got {len(cells)}")
        for cell in cells:
            if len(cell) != n:
                raise ShapeError(f"payoff vector {cell} does not have {n} entries")
        object.__setattr__(self, "strategy_counts", counts)
        object.__setattr__(self, "payoffs", cells)

    @classmethod
    def from_nested(cls, nested, strategy_counts: Sequence[int] | None = None) -> "NormalFormGame":
        """Build from nested lists indexed ``nested[s1][s2]...[sN] -> payoff vector``."""
        if strategy_counts is None:
            counts = []
            node = nested
            # descend until we hit a payoff vector (a list of scalars)
            while isinstance(node, (list, tuple)) and node and isinstance(node[0], (list, tuple)):
                counts.append(len(node))
                node = node[0]
            strategy_counts = counts
        counts = tuple(strategy_counts)
        cells = []
        for prof in itertools.product(*(range(c) for c in counts)):
            node = nested
            for s in prof:
                node = node[s]
            cells.append(tuple(node))
        return cls(counts, tuple(cells))

    @classmethod
    def from_function(cls, strategy_counts: Sequence[int], fn) -> "NormalFormGame":
        counts = tuple(strategy_counts)
        return cls(counts, tuple(tuple(fn(p)) for p in itertools.product(*(range(c) for c in counts))))

    @classmethod
    def empty(cls) -> "NormalFormGame":
        return cls((), ((),))

    @property
    def num_players(self) -> int:
        return len(self.strategy_counts)

    @property
    def num_profiles(self) -> int:
        return len(self.payoffs)

    @cached_property
    def _strides(self) -> tuple[int, ...]:
        strides = []
        acc = 1
        for c in reversed(self.strategy_counts):
            strides.append(acc)
            acc *= c
        return tuple(reversed(strides))

    def index_of(self, profile: Sequence[int]) -> int:
        if len(profile) != self.num_players:
            raise ShapeError(f"profile {tuple(profile)} has wrong length for {self.num_players} players")
        idx = 0
        for s, c, stride in zip(profile, self.strategy_counts, self._strides):
            if not 0 <= s < c:
                raise ShapeError(f"profile {tuple(profile)} out of bounds for shape {self.strategy_counts}")
            idx += s * stride
        return idx

    def cell(self, profile: Sequence[int]) -> tuple[Fraction, ...]:
        return self.payoffs[self.index_of(profile)]

    def payoff(self, profile: Sequence[int], player: int) -> Fraction:
        return self.cell(profile)[player]

    def profiles(self) -> Iterator[PureProfile]:
        return itertools.product(*(range(c) for c in self.strategy_counts))

    def to_nested(self):
        def build(prefix, depth):
            if depth == self.num_players:
                return list(self.cell(prefix))
            return [build(prefix + (s,), depth + 1) for s in range(self.strategy_counts[depth])]

        return build((), 0)

    def player_matrix(self, player: int):
        """Player's payoffs as a float ndarray of shape ``strategy_counts``."""
        import numpy as np

        arr = np.array([float(cell[player]) for cell in self.payoffs], dtype=float)
        return arr.reshape(self.strategy_counts)

    def with_cell(self, profile: Sequence[int], vector: Sequence) -> "NormalFormGame":
        idx = self.index_of(profile)
        cells = list(self.payoffs)
        cells[idx] = tuple(to_rational(x) for x in vector)
        return NormalFormGame(self.strategy_counts, tuple(cells))

    @cached_property
    def _hash(self) -> int:
        return hash((self.strategy_counts, self.payoffs))

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if not isinstance(other, NormalFormGame):
            return NotImplemented
        if self is other:
            return True
        return (
            self._hash == other._hash
            and self.strategy_counts == other.strategy_counts
            and self.payoffs == other.payoffs
        )

    def __repr__(self):
        shape = "x".join(map(str, self.strategy_counts)) or "empty"
        return f"NormalFormGame({shape})"


def pure_strategy(count: int, index: int) -> MixedStrategy:
    return tuple(Fraction(1) if j == index else Fraction(0) for j in range(count))


def pure_as_mixed(game: NormalFormGame, profile: Sequence[int]) -> StrategyProfile:
    return tuple(pure_strategy(c, s) for c, s in zip(game.strategy_counts, profile))


def as_profile(profile) -> StrategyProfile:
    """Normalise nested sequences into a profile; ints and strings become Fractions."""
    out = []
    for strat in profile:
        row = []
        for p in strat:
            if isinstance(p, float):
                row.append(p)
            else:
                row.append(to_rational(p))
        out.append(tuple(row))
    return tuple(out)


def is_exact(profile: StrategyProfile) -> bool:
    return all(isinstance(p, (Fraction, int)) for strat in profile for p in strat)


def check_profile(game: NormalFormGame, profile: StrategyProfile) -> None:
    if len(profile) != game.num_players:
        raise ShapeError(f"profile has {len(profile)} strategies, game has {game.num_players} players")
    for i, (strat, count) in enumerate(zip(profile, game.strategy_counts)):
        if len(strat) != count:
            raise ShapeError(f"player {i} strategy has {len(strat)} entries, expected {count}")


def expected_payoff(game: NormalFormGame, profile: StrategyProfile, player: int) -> Number:
    """Expected payoff of ``player``: sum over pure profiles of payoff times probability."""
    check_profile(game, profile)
    if not 0 <= player < game.num_players:
        raise ShapeError(f"no player {player}")
    exact = is_exact(profile)
    total = Fraction(0) if exact else 0.0
    nonzero = [[(j, p) for j, p in enumerate(strat) if p != 0] for strat in profile]
    for combo in itertools.product(*nonzero):
        weight = Fraction(1) if exact else 1.0
        for _, p in combo:
            weight *= p
        value = game.payoffs[game.index_of([j for j, _ in combo])][player]
        total += weight * (value if exact else float(value))
    return total


def social_welfare(game: NormalFormGame, profile: StrategyProfile) -> Number:
    return sum(expected_payoff(game, profile, i) for i in range(game.num_players))


def social_optimum(game: NormalFormGame) -> tuple[PureProfile, Fraction]:
    """Welfare-maximising pure profile; ties go to the lexicographically smallest.

    Welfare is multilinear in the mixed strategies, so the maximum over
    mixed profiles is always attained at a pure one.
    """
    best = None
    best_value = None
    for prof in game.profiles():
        value = sum(game.payoffs[game.index_of(prof)])
        if best_value is None or value > best_value:
            best, best_value = prof, value
    return best, Fraction(best_value)


def support(strategy: Sequence[Number], eps: float = SUPPORT_EPS) -> tuple[int, ...]:
    """Indices played with positive probability (``> eps`` for float entries)."""
    out = []
    for j, p in enumerate(strategy):
        if isinstance(p, float):
            if p > eps:
                out.append(j)
        elif p > 0:
            out.append(j)
    return tuple(out)


def price_of_anarchy(game: NormalFormGame, equilibria) -> Number:
    equilibria = list(equilibria)
    if not equilibria:
        raise UndefinedMetricError("price of anarchy needs at least one equilibrium")
    _, opt = social_optimum(game)
    worst = min(social_welfare(game, sigma) for sigma in equilibria)
    return ratio(opt, worst)


def ratio(numerator: Number, denominator: Number) -> Number:
    if denominator <= 0:
        raise UndefinedMetricError(f"welfare ratio undefined for non-positive denominator {denominator}")
    if isinstance(denominator, float) or isinstance(numerator, float):
        return float(numerator) / float(denominator)
    return Fraction(numerator) / Fraction(denominator)
