"""Nash equilibrium computation.

Two players are solved exactly over the rationals: support enumeration plus
vertex enumeration of the best-response polytopes, which also copes with
degenerate games.  Three or more players fall back to a numeric support
enumeration driven by multistart damped Newton.
"""

from __future__ import annotations

import hashlib
import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from .errors import CapExceededError, ShapeError
from .game import (
    NormalFormGame,
    PureProfile,
    StrategyProfile,
    expected_payoff,
    pure_as_mixed,
)

log = logging.getLogger(__name__)

DEFAULT_TOL = 1e-9
DEDUPE_TOL = 1e-6
NEWTON_STARTS = 16
DEFAULT_SUPPORT_CAP = 100_000


@dataclass(frozen=True)
class EquilibriumSet:
    """Equilibria of one game, sorted lexicographically.

    ``degenerate`` marks games with a positive-dimensional set of equilibria;
    ``continuum_players`` names the players whose own equilibrium strategies
    form a continuum.  Only extreme equilibria are listed in that case.
    ``incomplete`` is raised by the numeric solver when nothing converged.
    """

    profiles: tuple[StrategyProfile, ...]
    exact: bool
    degenerate: bool = False
    incomplete: bool = False
    continuum_players: frozenset[int] = field(default_factory=frozenset)

    @property
    def mode(self) -> str:
        return "exact" if self.exact else "numeric"

    def __iter__(self):
        return iter(self.profiles)

    def __len__(self):
        return len(self.profiles)

    def __contains__(self, item):
        return item in self.profiles


def pure_nash(game: NormalFormGame) -> list[PureProfile]:
    """All pure profiles where no player strictly gains by a unilateral pure deviation."""
    out = []
    for prof in game.profiles():
        cell = game.cell(prof)
        stable = True
        for i, count in enumerate(game.strategy_counts):
            mine = cell[i]
            for alt in range(count):
                if alt == prof[i]:
                    continue
                dev = prof[:i] + (alt,) + prof[i + 1:]
                if game.cell(dev)[i] > mine:
                    stable = False
                    break
            if not stable:
                break
        if stable:
            out.append(prof)
    return out


# ----------------------------------------------------------------------------
# exact linear algebra

def solve_exact(matrix: list[list[Fraction]], rhs: list[Fraction]) -> Optional[list[Fraction]]:
    """Solve a square system by Gauss-Jordan elimination; None when singular."""
    n = len(matrix)
    aug = [list(row) + [b] for row, b in zip(matrix, rhs)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            return None
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = 1 / aug[col][col]
        prow = [v * inv for v in aug[col]]
        aug[col] = prow
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], prow)]
    return [aug[r][n] for r in range(n)]


def _bimatrix(game: NormalFormGame):
    m, n = game.strategy_counts
    A = [[game.cell((i, j))[0] for j in range(n)] for i in range(m)]
    B = [[game.cell((i, j))[1] for j in range(n)] for i in range(m)]
    return A, B


def _indifference(payoff_rows: list[list[Fraction]], own: Sequence[int], other: Sequence[int]):
    """Mix over ``other`` making every strategy in ``own`` equally good.

    ``payoff_rows[a][b]`` is the payoff of own strategy a against other strategy b.
    Returns (mix restricted to ``other``, common value) or None.
    """
    k = len(other)
    matrix = []
    rhs = []
    for a in own:
        matrix.append([payoff_rows[a][b] for b in other] + [Fraction(-1)])
        rhs.append(Fraction(0))
    matrix.append([Fraction(1)] * k + [Fraction(0)])
    rhs.append(Fraction(1))
    sol = solve_exact(matrix, rhs)
    if sol is None:
        return None
    return sol[:k], sol[k]


def _support_enumeration(A, B) -> set[StrategyProfile]:
    m, n = len(A), len(A[0])
    Bt = [[B[i][j] for i in range(m)] for j in range(n)]
    found = set()
    for k in range(1, min(m, n) + 1):
        for rows in itertools.combinations(range(m), k):
            for cols in itertools.combinations(range(n), k):
                ys = _indifference(A, rows, cols)
                if ys is None or any(p <= 0 for p in ys[0]):
                    continue
                xs = _indifference(Bt, cols, rows)
                if xs is None or any(p <= 0 for p in xs[0]):
                    continue
                y = [Fraction(0)] * n
                for j, p in zip(cols, ys[0]):
                    y[j] = p
                x = [Fraction(0)] * m
                for i, p in zip(rows, xs[0]):
                    x[i] = p
                u, v = ys[1], xs[1]
                if any(sum(A[i][j] * y[j] for j in range(n)) > u for i in range(m)):
                    continue
                if any(sum(B[i][j] * x[i] for i in range(m)) > v for j in range(n)):
                    continue
                found.add((tuple(x), tuple(y)))
    return found


def _polytope_vertices(M: list[list[Fraction]], dim: int):
    """Non-zero vertices of {z >= 0, M z <= 1} with their label sets.

    Label ``k`` for ``k < dim`` means z_k = 0; label ``dim + r`` means row r is tight.
    """
    rows = len(M)
    constraints = []
    for k in range(dim):
        constraints.append(([Fraction(1) if c == k else Fraction(0) for c in range(dim)], Fraction(0)))
    for r in range(rows):
        constraints.append((list(M[r]), Fraction(1)))
    vertices = {}
    for chosen in itertools.combinations(range(len(constraints)), dim):
        sol = solve_exact([constraints[c][0] for c in chosen], [constraints[c][1] for c in chosen])
        if sol is None or all(z == 0 for z in sol) or any(z < 0 for z in sol):
            continue
        slack = [sum(a * z for a, z in zip(M[r], sol)) for r in range(rows)]
        if any(s > 1 for s in slack):
            continue
        key = tuple(sol)
        if key in vertices:
            continue
        labels = {k for k in range(dim) if sol[k] == 0}
        labels |= {dim + r for r in range(rows) if slack[r] == 1}
        vertices[key] = frozenset(labels)
    return vertices


def _vertex_enumeration(A, B):
    """Extreme equilibria as completely labelled vertex pairs of the best-response polytopes."""
    m, n = len(A), len(A[0])
    shift_a = 1 - min(min(r) for r in A)
    shift_b = 1 - min(min(r) for r in B)
    Ap = [[a + shift_a for a in r] for r in A]
    Bp = [[b + shift_b for b in r] for r in B]
    # P = {x in R^m : x >= 0, B'^T x <= 1}; labels: i (x_i = 0), m + j (column j tight)
    BpT = [[Bp[i][j] for i in range(m)] for j in range(n)]
    px = _polytope_vertices(BpT, m)
    # Q = {y in R^n : y >= 0, A' y <= 1}; relabel so that y_j = 0 -> m + j and row i tight -> i
    qy_raw = _polytope_vertices(Ap, n)
    qy = {}
    for y, labels in qy_raw.items():
        qy[y] = frozenset((m + k) if k < n else (k - n) for k in labels)
    everything = frozenset(range(m + n))
    pairs = []
    for x, lx in px.items():
        for y, ly in qy.items():
            if lx | ly == everything:
                sx, sy = sum(x), sum(y)
                pairs.append((tuple(v / sx for v in x), tuple(v / sy for v in y)))
    return pairs


def support_enumeration_2p(game: NormalFormGame) -> EquilibriumSet:
    """All extreme Nash equilibria of a bimatrix game in exact arithmetic."""
    if game.num_players != 2:
        raise ShapeError(f"support_enumeration_2p needs 2 players, got {game.num_players}")
    A, B = _bimatrix(game)
    found = _support_enumeration(A, B)
    pairs = _vertex_enumeration(A, B)
    found.update(pairs)

    # clique rule: an extreme strategy of one player matched with two extreme
    # strategies of the other means a segment of equilibria for the latter
    partners_of_y: dict = {}
    partners_of_x: dict = {}
    for x, y in pairs:
        partners_of_y.setdefault(y, set()).add(x)
        partners_of_x.setdefault(x, set()).add(y)
    continuum = set()
    if any(len(v) > 1 for v in partners_of_y.values()):
        continuum.add(0)
    if any(len(v) > 1 for v in partners_of_x.values()):
        continuum.add(1)
    return EquilibriumSet(
        profiles=tuple(sorted(found)),
        exact=True,
        degenerate=bool(continuum),
        continuum_players=frozenset(continuum),
    )


def _one_player(game: NormalFormGame) -> EquilibriumSet:
    values = [game.cell((s,))[0] for s in range(game.strategy_counts[0])]
    best = max(values)
    rows = [s for s, v in enumerate(values) if v == best]
    profiles = tuple(sorted(pure_as_mixed(game, (s,)) for s in rows))
    cont = frozenset({0}) if len(rows) > 1 else frozenset()
    return EquilibriumSet(profiles, exact=True, degenerate=bool(cont), continuum_players=cont)


# ----------------------------------------------------------------------------
# numeric N-player solver

def game_digest(game: NormalFormGame) -> bytes:
    """Stable content hash, independent of Python's per-process hash seed."""
    h = hashlib.sha256()
    h.update(repr(game.strategy_counts).encode())
    for cell in game.payoffs:
        h.update(b"|")
        h.update(",".join(f"{q.numerator}/{q.denominator}" for q in cell).encode())
    return h.digest()


def _contract_except(tensor: np.ndarray, sigma: list[np.ndarray], keep: Sequence[int]) -> np.ndarray:
    """Contract every axis not in ``keep`` with the matching mixed strategy."""
    out = tensor
    # contract from the last axis down so earlier axis numbers stay valid
    for ax in reversed(range(tensor.ndim)):
        if ax in keep:
            continue
        out = np.tensordot(out, sigma[ax], axes=([ax], [0]))
    return out


class _SupportSystem:
    def __init__(self, tensors, counts, supports):
        self.tensors = tensors
        self.counts = counts
        self.supports = supports
        self.n = len(counts)
        self.offsets = []
        acc = 0
        for R in supports:
            self.offsets.append(acc)
            acc += len(R)
        self.nprob = acc
        self.size = acc + self.n

    def unpack(self, z):
        sigma = []
        for i, R in enumerate(self.supports):
            vec = np.zeros(self.counts[i])
            vec[list(R)] = z[self.offsets[i]:self.offsets[i] + len(R)]
            sigma.append(vec)
        return sigma, z[self.nprob:]

    def residual_and_jacobian(self, z):
        sigma, values = self.unpack(z)
        F = np.zeros(self.size)
        J = np.zeros((self.size, self.size))
        row = 0
        for i, R in enumerate(self.supports):
            ui = _contract_except(self.tensors[i], sigma, (i,))
            for s in R:
                F[row] = ui[s] - values[i]
                J[row, self.nprob + i] = -1.0
                for j, Rj in enumerate(self.supports):
                    if j == i:
                        continue
                    mat = _contract_except(self.tensors[i], sigma, (i, j))
                    # axes of mat are (i, j) in original order
                    block = mat[s, :] if i < j else mat[:, s]
                    for k, t in enumerate(Rj):
                        J[row, self.offsets[j] + k] = block[t]
                row += 1
        for i, R in enumerate(self.supports):
            F[row] = z[self.offsets[i]:self.offsets[i] + len(R)].sum() - 1.0
            J[row, self.offsets[i]:self.offsets[i] + len(R)] = 1.0
            row += 1
        return F, J


def _newton(system: _SupportSystem, z0, tol, max_iter=40):
    z = z0
    F, J = system.residual_and_jacobian(z)
    norm = np.linalg.norm(F)
    for _ in range(max_iter):
        if norm < tol * 1e-2:
            break
        step = np.linalg.lstsq(J, -F, rcond=None)[0]
        t = 1.0
        while t > 1e-6:
            cand = z + t * step
            Fc, Jc = system.residual_and_jacobian(cand)
            nc = np.linalg.norm(Fc)
            if nc < norm:
                z, F, J, norm = cand, Fc, Jc, nc
                break
            t *= 0.5
        else:
            break
    return z, F, J


def best_response_gap(game: NormalFormGame, profile: StrategyProfile) -> float:
    """Largest gain any player can get from a pure deviation (float)."""
    tensors = [game.player_matrix(i) for i in range(game.num_players)]
    sigma = [np.asarray([float(p) for p in s]) for s in profile]
    gap = 0.0
    for i in range(game.num_players):
        ui = _contract_except(tensors[i], sigma, (i,))
        gap = max(gap, float(ui.max() - ui @ sigma[i]))
    return gap


def nash_numeric(
    game: NormalFormGame,
    tol: float = DEFAULT_TOL,
    seed: int = 0,
    starts: int = NEWTON_STARTS,
    support_cap: int = DEFAULT_SUPPORT_CAP,
) -> EquilibriumSet:
    """Numeric support enumeration for any number of players."""
    counts = game.strategy_counts
    n = game.num_players
    n_supports = 1
    for c in counts:
        n_supports *= (2 ** c - 1)
    if n_supports > support_cap:
        raise CapExceededError(f"{n_supports} joint supports exceed the cap of {support_cap}")
    tensors = [game.player_matrix(i) for i in range(n)]
    scale = max(1.0, max((abs(float(x)) for cell in game.payoffs for x in cell), default=1.0))
    rng = np.random.default_rng([seed, int.from_bytes(game_digest(game)[:8], "little")])

    per_player = [
        [R for k in range(1, c + 1) for R in itertools.combinations(range(c), k)] for c in counts
    ]
    found: list[np.ndarray] = []
    profiles: list[StrategyProfile] = []
    degenerate = False
    continuum = set()

    def record(sigma):
        flat = np.concatenate(sigma)
        for prev in found:
            if np.max(np.abs(prev - flat)) < DEDUPE_TOL:
                return False
        found.append(flat)
        profiles.append(tuple(tuple(float(p) for p in s) for s in sigma))
        return True

    for supports in itertools.product(*per_player):
        if all(len(R) == 1 for R in supports):
            prof = tuple(R[0] for R in supports)
            sigma = [np.eye(c)[s] for c, s in zip(counts, prof)]
            if best_response_gap(game, tuple(tuple(v) for v in sigma)) <= tol:
                record(sigma)
            continue
        system = _SupportSystem(tensors, counts, supports)
        for _ in range(starts):
            parts = [rng.dirichlet(np.ones(len(R))) for R in supports]
            sigma0, _ = system.unpack(np.concatenate(parts + [np.zeros(n)]))
            vals = [float(_contract_except(tensors[i], sigma0, (i,)) @ sigma0[i]) for i in range(n)]
            z0 = np.concatenate(parts + [np.asarray(vals)])
            z, F, J = _newton(system, z0, tol)
            if not np.all(np.isfinite(z)) or np.max(np.abs(F)) >= tol * scale:
                continue
            probs = z[:system.nprob]
            if np.any(probs < -tol):
                continue
            sigma, _ = system.unpack(np.clip(z, 0.0, None))
            sigma = [s / s.sum() for s in sigma]
            if best_response_gap(game, tuple(tuple(v) for v in sigma)) >= tol:
                continue
            if record(sigma):
                sv = np.linalg.svd(J, compute_uv=True)
                if sv[1][-1] < 1e-8 * scale:
                    degenerate = True
                    null = sv[2][-1]
                    for i, R in enumerate(supports):
                        seg = null[system.offsets[i]:system.offsets[i] + len(R)]
                        if np.max(np.abs(seg)) > 1e-6:
                            continuum.add(i)
            break
    order = sorted(range(len(profiles)), key=lambda k: profiles[k])
    return EquilibriumSet(
        profiles=tuple(profiles[k] for k in order),
        exact=False,
        degenerate=degenerate,
        incomplete=not profiles,
        continuum_players=frozenset(continuum),
    )


@lru_cache(maxsize=1 << 16)
def _all_nash_cached(game: NormalFormGame, tol: float, seed: int) -> EquilibriumSet:
    n = game.num_players
    if n == 0:
        return EquilibriumSet(((),), exact=True)
    if n == 1:
        return _one_player(game)
    if n == 2:
        return support_enumeration_2p(game)
    return nash_numeric(game, tol=tol, seed=seed)


def all_nash(game: NormalFormGame, tol: float = DEFAULT_TOL, seed: int = 0) -> EquilibriumSet:
    """Exact for one or two players, numeric (pure profiles plus Newton) otherwise."""
    return _all_nash_cached(game, float(tol), int(seed))


def is_nash(game: NormalFormGame, profile: StrategyProfile, tol: float = 0.0) -> bool:
    """Check every pure deviation against the profile's payoff; exact when tol is 0 and inputs are rational."""
    for i, count in enumerate(game.strategy_counts):
        base = expected_payoff(game, profile, i)
        for s in range(count):
            dev = list(profile)
            dev[i] = tuple(Fraction(int(j == s)) for j in range(count))
            if expected_payoff(game, tuple(dev), i) - base > tol:
                return False
    return True
