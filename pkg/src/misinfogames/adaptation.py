"""The adaptation procedure: play an nme, learn the realised payoffs, repeat.

The search runs over sets of learned positions.  ``theta`` maps each visited
position set to the game obtained by revealing those positions; sets that
reveal nothing new are aliases and share the handle of their parent.
"""

from __future__ import annotations

import hashlib
import threading
from bisect import bisect_left
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .errors import CapExceededError
from .game import SUPPORT_EPS, StrategyProfile
from .misinfo import (
    MisinformationGame,
    PositionSet,
    PositionVector,
    characteristic_set,
    mg_equal,
    nme,
    require_uniform,
    update,
)
from .nash import DEFAULT_TOL, game_digest

DEFAULT_MAX_NODES = 10 ** 6
DEFAULT_MAX_QUEUE = 10 ** 6

Edge = tuple[PositionSet, PositionVector, PositionSet]


@dataclass(frozen=True)
class AdaptationConfig:
    allow_degenerate: bool = False
    tol: float = DEFAULT_TOL
    seed: int = 0
    support_eps: float = SUPPORT_EPS
    max_nodes: int = DEFAULT_MAX_NODES
    max_queue: int = DEFAULT_MAX_QUEUE


class _NmeCache:
    """Thread-safe memo of NME lists and their characteristic sets per game."""

    def __init__(self, config: AdaptationConfig):
        self.config = config
        self._lock = threading.Lock()
        self._data: dict[MisinformationGame, tuple] = {}

    def get(self, mg: MisinformationGame):
        with self._lock:
            hit = self._data.get(mg)
        if hit is not None:
            return hit
        cfg = self.config
        profiles = nme(mg, allow_degenerate=cfg.allow_degenerate, tol=cfg.tol, seed=cfg.seed)
        chis = [characteristic_set(sigma, cfg.support_eps) for sigma in profiles]
        positions = tuple(sorted({v for chi in chis for v in chi}))
        entry = (tuple(profiles), tuple(chis), positions)
        with self._lock:
            self._data.setdefault(mg, entry)
        return entry


def adapt_step(
    games: Iterable[MisinformationGame], config: AdaptationConfig = AdaptationConfig(), _cache=None
) -> set[MisinformationGame]:
    """One application of the adaptation operator to a set of games."""
    cache = _cache or _NmeCache(config)
    out = set()
    for mg in games:
        _, _, positions = cache.get(mg)
        for v in positions:
            out.add(update(mg, v))
    return out


@dataclass
class NaiveResult:
    stable_set: frozenset
    lad: int
    total_nodes: int
    steps: list = field(default_factory=list)


def naive_adaptation(
    mg: MisinformationGame, max_steps: Optional[int] = None, config: AdaptationConfig = AdaptationConfig()
) -> NaiveResult:
    """Iterate the adaptation operator on sets of games until two steps agree.

    ``total_nodes`` counts every game generated, duplicates included: the root
    plus one child per (game, nme, position) triple in each step before the
    fixpoint.
    """
    require_uniform(mg)
    if max_steps is None:
        max_steps = mg.actual.num_profiles + 1
    cache = _NmeCache(config)
    current = frozenset({mg})
    history = [current]
    total = 1
    for t in range(max_steps + 1):
        generated = 0
        for g in current:
            _, chis, _ = cache.get(g)
            generated += sum(len(chi) for chi in chis)
        nxt = frozenset(adapt_step(current, config, cache))
        if nxt == current:
            return NaiveResult(current, t, total, history)
        total += generated
        current = nxt
        history.append(current)
    raise CapExceededError(f"no fixpoint within {max_steps} steps", partial=history)


@dataclass
class AdaptationStats:
    unique_mgs: int
    leaves: int
    terminal_games: int
    lad: int
    visited: int
    edges: int


@dataclass
class AdaptationGraph:
    root: MisinformationGame
    nodes: tuple[PositionSet, ...]
    edges: tuple[Edge, ...]
    theta: dict[PositionSet, MisinformationGame]
    terminal: tuple[PositionSet, ...]
    expanded: tuple[PositionSet, ...]
    equilibria: dict[PositionSet, tuple[StrategyProfile, ...]]
    stats: Optional[AdaptationStats] = None

    def terminal_games(self) -> set[MisinformationGame]:
        return {self.theta[x] for x in self.terminal}

    def loopless_edges(self) -> list[Edge]:
        """Edges whose endpoints map to different games."""
        return [(w, v, x) for (w, v, x) in self.edges if not mg_equal(self.theta[w], self.theta[x])]

    def loopless_nodes(self) -> list[PositionSet]:
        """Root plus every node touched by a loopless edge (aliases drop out)."""
        keep = {()}
        for w, _, x in self.loopless_edges():
            keep.add(w)
            keep.add(x)
        return sorted(keep, key=_set_order)

    def sinks(self) -> list[PositionSet]:
        out_deg = {x: 0 for x in self.loopless_nodes()}
        for w, _, _ in self.loopless_edges():
            out_deg[w] += 1
        return sorted((x for x, d in out_deg.items() if d == 0), key=_set_order)


def _set_order(xs: PositionSet):
    return (len(xs), xs)


def _with(xs: PositionSet, v: PositionVector) -> PositionSet:
    return tuple(sorted(xs + (v,)))


def _contains(xs: PositionSet, v: PositionVector) -> bool:
    k = bisect_left(xs, v)
    return k < len(xs) and xs[k] == v


def _longest_path(nodes: list[PositionSet], edges: list[Edge]) -> int:
    # every loopless edge adds exactly one position, so size order is topological
    depth = {x: 0 for x in nodes}
    for w, _, x in sorted(edges, key=lambda e: _set_order(e[0])):
        depth[x] = max(depth[x], depth[w] + 1)
    return max(depth.values(), default=0)


def _finish(root, visited, edges, theta, terminal, expanded, equilibria) -> AdaptationGraph:
    graph = AdaptationGraph(
        root=root,
        nodes=tuple(sorted(visited, key=_set_order)),
        edges=tuple(sorted(set(edges), key=lambda e: (_set_order(e[0]), e[1]))),
        theta=theta,
        terminal=tuple(sorted(terminal, key=_set_order)),
        expanded=tuple(sorted(expanded, key=_set_order)),
        equilibria=equilibria,
    )
    tgames = graph.terminal_games()
    leaves = sum(1 for x in graph.nodes if x in theta and theta[x] in tgames)
    graph.stats = AdaptationStats(
        unique_mgs=len(set(theta.values())),
        leaves=leaves,
        terminal_games=len(tgames),
        lad=_longest_path(graph.loopless_nodes(), graph.loopless_edges()),
        visited=len(graph.nodes),
        edges=len(graph.edges),
    )
    return graph


def traverse(mg: MisinformationGame, config: AdaptationConfig = AdaptationConfig()) -> AdaptationGraph:
    """Breadth-first search over learned-position sets, collecting self-looping nodes."""
    require_uniform(mg)
    cache = _NmeCache(config)
    root: PositionSet = ()
    terminal: set[PositionSet] = set()
    queue = deque([root])
    visited = {root}
    theta = {root: mg}
    equilibria = {}
    edges: list[Edge] = []
    expanded = []
    cache.get(mg)

    def partial():
        return _finish(mg, visited, edges, theta, terminal, expanded, equilibria)

    while queue:
        w = queue.popleft()
        expanded.append(w)
        game_w = theta[w]
        profiles, _, positions = cache.get(game_w)
        equilibria[w] = profiles
        # cheap self-loop check: a realised position is already learned
        if any(_contains(w, v) for v in positions):
            terminal.add(w)
        for v in positions:
            if _contains(w, v):
                edges.append((w, v, w))
                continue
            x = _with(w, v)
            edges.append((w, v, x))
            if x in visited:
                continue
            visited.add(x)
            game_x = update(game_w, v)
            if mg_equal(game_x, game_w):
                theta[x] = game_w
                terminal.add(w)
            else:
                theta[x] = game_x
                cache.get(game_x)
                queue.append(x)
                if len(expanded) + len(queue) > config.max_nodes:
                    raise CapExceededError(f"more than {config.max_nodes} games", partial=partial())
                if len(queue) > config.max_queue:
                    raise CapExceededError(f"queue longer than {config.max_queue}", partial=partial())
    return partial()


def parallel_traverse(
    mg: MisinformationGame, threads: int = 1, config: AdaptationConfig = AdaptationConfig()
) -> AdaptationGraph:
    """Same search as :func:`traverse` with ``threads`` workers sharing the queue.

    The queue, visited set, terminal set and ``theta`` each have their own lock.
    A position set is marked visited before its game is computed, so no update
    or equilibrium computation is repeated for the same set.
    """
    if threads < 1:
        raise ValueError("threads must be at least 1")
    require_uniform(mg)
    cache = _NmeCache(config)
    root: PositionSet = ()
    queue = deque([root])
    queue_cv = threading.Condition()
    pending = [1]
    visited = {root}
    visited_lock = threading.Lock()
    terminal: set[PositionSet] = set()
    terminal_lock = threading.Lock()
    theta = {root: mg}
    theta_lock = threading.Lock()
    equilibria = {}
    counters = {"queued": 1}
    abort: list = []
    edge_lists: list[list[Edge]] = []
    expanded_lists: list[list[PositionSet]] = []
    cache.get(mg)

    def process(w, edges, expanded):
        expanded.append(w)
        with theta_lock:
            game_w = theta[w]
        profiles, _, positions = cache.get(game_w)
        with theta_lock:
            equilibria[w] = profiles
        if any(_contains(w, v) for v in positions):
            with terminal_lock:
                terminal.add(w)
        for v in positions:
            if _contains(w, v):
                edges.append((w, v, w))
                continue
            x = _with(w, v)
            edges.append((w, v, x))
            with visited_lock:
                if x in visited:
                    continue
                visited.add(x)
            game_x = update(game_w, v)
            if mg_equal(game_x, game_w):
                with theta_lock:
                    theta[x] = game_w
                with terminal_lock:
                    terminal.add(w)
            else:
                cache.get(game_x)
                with theta_lock:
                    theta[x] = game_x
                with queue_cv:
                    counters["queued"] += 1
                    if counters["queued"] > config.max_nodes:
                        raise CapExceededError(f"more than {config.max_nodes} games")
                    if len(queue) >= config.max_queue:
                        raise CapExceededError(f"queue longer than {config.max_queue}")
                    queue.append(x)
                    pending[0] += 1
                    queue_cv.notify()

    def worker():
        edges: list[Edge] = []
        expanded: list[PositionSet] = []
        edge_lists.append(edges)
        expanded_lists.append(expanded)
        while True:
            with queue_cv:
                while not queue and pending[0] > 0 and not abort:
                    queue_cv.wait()
                if abort or not queue:
                    queue_cv.notify_all()
                    return
                w = queue.popleft()
            try:
                process(w, edges, expanded)
            except BaseException as exc:  # surfaced to the caller after join
                with queue_cv:
                    abort.append(exc)
                    queue_cv.notify_all()
                return
            finally:
                with queue_cv:
                    pending[0] -= 1
                    queue_cv.notify_all()

    workers = [threading.Thread(target=worker, name=f"adapt-{k}") for k in range(threads)]
    for t in workers:
        t.start()
    for t in workers:
        t.join()
    edges = [e for lst in edge_lists for e in lst]
    expanded = [w for lst in expanded_lists for w in lst]
    if abort:
        exc = abort[0]
        if isinstance(exc, CapExceededError):
            exc.partial = _finish(mg, visited, edges, theta, terminal, expanded, equilibria)
        raise exc
    return _finish(mg, visited, edges, theta, terminal, expanded, equilibria)


def _lookup(graph: AdaptationGraph, xs: PositionSet) -> MisinformationGame:
    game = graph.theta.get(xs)
    if game is None:
        game = graph.root
        for v in xs:
            game = update(game, v)
    return game


def compute_sme(graph: AdaptationGraph, support_eps: float = SUPPORT_EPS) -> list[StrategyProfile]:
    """NMEs of terminal nodes whose realised positions reveal nothing new."""
    found = []
    for x in graph.terminal:
        game_x = graph.theta[x]
        for sigma in graph.equilibria[x]:
            if all(mg_equal(_lookup(graph, _with(x, v) if not _contains(x, v) else x), game_x)
                   for v in characteristic_set(sigma, support_eps)):
                if sigma not in found:
                    found.append(sigma)
    return sorted(found)


def adaptation_procedure(
    mg: MisinformationGame, threads: int = 1, config: AdaptationConfig = AdaptationConfig()
) -> list[StrategyProfile]:
    graph = traverse(mg, config) if threads == 1 else parallel_traverse(mg, threads, config)
    return compute_sme(graph, config.support_eps)


@dataclass
class OneSmeResult:
    profile: StrategyProfile
    steps: int
    path: tuple[PositionVector, ...]


def find_one_sme_path(mg: MisinformationGame, config: AdaptationConfig = AdaptationConfig()) -> OneSmeResult:
    """Follow one branch: first nme, first position that still teaches something."""
    require_uniform(mg)
    cache = _NmeCache(config)
    current = mg
    path: list[PositionVector] = []
    limit = mg.actual.num_profiles
    while True:
        profiles, chis, _ = cache.get(current)
        sigma, chi = profiles[0], chis[0]
        for v in chi:
            nxt = update(current, v)
            if not mg_equal(nxt, current):
                current = nxt
                path.append(v)
                break
        else:
            return OneSmeResult(sigma, len(path), tuple(path))
        if len(path) > limit:
            raise CapExceededError("single-branch search did not settle", partial=tuple(path))


def find_one_sme(mg: MisinformationGame, config: AdaptationConfig = AdaptationConfig()) -> StrategyProfile:
    return find_one_sme_path(mg, config).profile


# ----------------------------------------------------------------------------
# DOT export

def mg_digest(mg: MisinformationGame, length: int = 8) -> str:
    h = hashlib.sha256()
    for g in mg.games:
        h.update(game_digest(g))
    return h.hexdigest()[:length]


def format_positions(xs: PositionSet) -> str:
    return "{" + ", ".join("(" + ",".join(str(s) for s in v) + ")" for v in xs) + "}"


def export_dot(graph: AdaptationGraph, loopless: bool = False) -> str:
    """Deterministic Graphviz text for the traversal result."""
    if loopless:
        nodes = graph.loopless_nodes()
        edges = graph.loopless_edges()
    else:
        nodes = list(graph.nodes)
        edges = list(graph.edges)
    ids = {x: f"n{k}" for k, x in enumerate(nodes)}
    terminal = set(graph.terminal)
    lines = ["digraph adaptation {", "  rankdir=TB;", "  node [shape=ellipse];"]
    for x in nodes:
        label = f"{format_positions(x)}\\nmG {mg_digest(graph.theta[x])}"
        style = ", shape=doublecircle" if x in terminal else ""
        lines.append(f'  {ids[x]} [label="{label}"{style}];')
    for w, v, x in edges:
        v_label = "(" + ",".join(str(s) for s in v) + ")"
        lines.append(f'  {ids[w]} -> {ids[x]} [label="{v_label}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"

