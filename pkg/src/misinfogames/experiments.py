"""Random and adversarial instance generators plus a Monte Carlo harness."""

from __future__ import annotations

import csv
import io
import math
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .adaptation import AdaptationConfig, compute_sme, naive_adaptation, parallel_traverse, traverse
from .errors import DegenerateGameError, MisinfoGameError
from .game import NormalFormGame
from .misinfo import MisinformationGame

DEGENERATE_RETRIES = 3

CSV_COLUMNS = [
    "setting", "run", "seed", "naive_nodes", "unique_mgs", "leaves",
    "smes", "lad", "sp", "wall_total_s", "wall_core_s",
]


@dataclass(frozen=True)
class Setting:
    strategy_counts: tuple[int, ...]
    runs: int = 100
    seed: int = 0
    payoff_lo: int = -10
    payoff_hi: int = 10

    def __post_init__(self):
        object.__setattr__(self, "strategy_counts", tuple(int(c) for c in self.strategy_counts))
        if not self.strategy_counts or any(c < 1 for c in self.strategy_counts):
            raise ValueError(f"bad strategy counts {self.strategy_counts}")
        if self.runs < 1:
            raise ValueError("runs must be positive")
        if self.payoff_lo > self.payoff_hi:
            raise ValueError("payoff_lo exceeds payoff_hi")

    @property
    def label(self) -> str:
        return "x".join(map(str, self.strategy_counts))

    @property
    def num_profiles(self) -> int:
        return math.prod(self.strategy_counts)

    @classmethod
    def parse(cls, text: str, **kw) -> "Setting":
        return cls(tuple(int(p) for p in text.lower().split("x")), **kw)


def random_misinfo(setting: Setting, run_index: int, attempt: int = 0) -> MisinformationGame:
    """Independent uniform integer payoffs for the actual game and every view."""
    rng = np.random.default_rng([setting.seed, run_index, attempt])
    n = len(setting.strategy_counts)
    draws = rng.integers(setting.payoff_lo, setting.payoff_hi + 1, size=(n + 1, setting.num_profiles, n))
    games = [
        NormalFormGame(setting.strategy_counts, tuple(tuple(int(x) for x in cell) for cell in block))
        for block in draws
    ]
    return MisinformationGame(games[0], tuple(games[1:]))


def adversarial_lad(setting: Setting) -> MisinformationGame:
    """Instance whose adaptation takes one step per pure profile.

    All views share a common-payoff game whose values run from the number of
    profiles down to 1, cells taken in lexicographically descending order.
    The actual game is its negation, so each learned cell drops to the bottom.
    """
    counts = setting.strategy_counts
    if len(counts) < 2:
        raise ValueError("adversarial construction needs at least 2 players")
    n = len(counts)
    total = math.prod(counts)
    # product order is lexicographic ascending, so the k-th cell gets k + 1
    view_cells = tuple((Fraction(k + 1),) * n for k in range(total))
    view = NormalFormGame(counts, view_cells)
    actual = NormalFormGame(counts, tuple(tuple(-x for x in cell) for cell in view_cells))
    return MisinformationGame(actual, (view,) * n)


@dataclass
class RunMetrics:
    setting: str
    run: int
    seed: int
    attempt: int
    naive_nodes: int
    unique_mgs: int
    leaves: int
    terminal_games: int
    smes: int
    lad: int
    sp: int
    wall_total: float
    wall_core: float


@dataclass
class MonteCarloTable:
    setting: Setting
    rows: list[RunMetrics] = field(default_factory=list)
    failures: list[dict] = field(default_factory=list)

    def aggregate(self) -> dict:
        if not self.rows:
            return {"runs": 0, "failures": len(self.failures)}
        keys = ["naive_nodes", "unique_mgs", "leaves", "terminal_games", "smes", "lad", "wall_total", "wall_core"]
        out = {"runs": len(self.rows), "failures": len(self.failures), "sp": self.rows[0].sp}
        for k in keys:
            mean = sum(getattr(r, k) for r in self.rows) / len(self.rows)
            out[k] = round(mean, 3) if k.startswith("wall") else round(mean)
            out[k + "_mean"] = mean
        return out

    def to_json(self) -> dict:
        return {
            "setting": asdict(self.setting),
            "rows": [asdict(r) for r in self.rows],
            "failures": self.failures,
            "aggregate": self.aggregate(),
        }


def measure_run(
    mg: MisinformationGame,
    label: str,
    run: int,
    seed: int,
    attempt: int = 0,
    threads: int = 1,
    config: AdaptationConfig = AdaptationConfig(),
) -> RunMetrics:
    start = time.perf_counter()
    graph = traverse(mg, config) if threads == 1 else parallel_traverse(mg, threads, config)
    smes = compute_sme(graph, config.support_eps)
    core = time.perf_counter() - start
    naive = naive_adaptation(mg, config=config)
    total = time.perf_counter() - start
    return RunMetrics(
        setting=label,
        run=run,
        seed=seed,
        attempt=attempt,
        naive_nodes=naive.total_nodes,
        unique_mgs=graph.stats.unique_mgs,
        leaves=graph.stats.leaves,
        terminal_games=graph.stats.terminal_games,
        smes=len(smes),
        lad=naive.lad,
        sp=2 ** mg.actual.num_profiles,
        wall_total=total,
        wall_core=core,
    )


def monte_carlo(
    setting: Setting, threads: int = 1, config: AdaptationConfig = AdaptationConfig()
) -> MonteCarloTable:
    """One row per run; degenerate draws are redrawn up to three times, then logged as failures."""
    table = MonteCarloTable(setting)
    for run in range(setting.runs):
        last_error: Optional[Exception] = None
        for attempt in range(DEGENERATE_RETRIES + 1):
            mg = random_misinfo(setting, run, attempt)
            try:
                table.rows.append(measure_run(mg, setting.label, run, setting.seed, attempt, threads, config))
                last_error = None
                break
            except DegenerateGameError as exc:
                last_error = exc
            except MisinfoGameError as exc:
                last_error = exc
                break
        if last_error is not None:
            table.failures.append({"run": run, "error": f"{type(last_error).__name__}: {last_error}"})
    return table


def emit_csv(rows) -> str:
    """CSV with a header line and one line per run; durations in seconds to 3 decimals."""
    if isinstance(rows, MonteCarloTable):
        rows = rows.rows
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in rows:
        writer.writerow([
            r.setting, r.run, r.seed, r.naive_nodes, r.unique_mgs, r.leaves,
            r.smes, r.lad, r.sp, f"{r.wall_total:.3f}", f"{r.wall_core:.3f}",
        ])
    return buf.getvalue()
