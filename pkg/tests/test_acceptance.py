"""Acceptance criteria, one test each, with a PASS/FAIL line per criterion.

Run standalone with ``python3 tests/test_acceptance.py`` or through pytest.
"""

import sys
from fractions import Fraction
from pathlib import Path

import networkx as nx
import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from helpers import brute_expected, brute_is_nash, nondegenerate_instances  # noqa: E402
from misinfogames.adaptation import (  # noqa: E402
    adapt_step,
    compute_sme,
    export_dot,
    find_one_sme,
    naive_adaptation,
    parallel_traverse,
    traverse,
)
from misinfogames.errors import DegenerateGameError  # noqa: E402
from misinfogames.experiments import Setting, adversarial_lad, monte_carlo  # noqa: E402
from misinfogames.game import NormalFormGame, price_of_anarchy, social_optimum  # noqa: E402
from misinfogames.inflation import inflate_game, is_inflated_version  # noqa: E402
from misinfogames.io import parse_misinfo_json  # noqa: E402
from misinfogames.misinfo import (  # noqa: E402
    MisinformationGame,
    characteristic_set,
    mg_equal,
    nme,
    price_of_misinformation,
    update,
)
from misinfogames.nash import all_nash  # noqa: E402
from misinfogames.running_example import KNOWN_DISCREPANCIES  # noqa: E402

F = Fraction
HALF = F(1, 2)
EXAMPLE_JSON = Path(__file__).parent / "data" / "running_example.json"
SEED = 2024


def report(capsys, number, failures, summary):
    ok = not failures
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {summary}"
    if failures:
        line += " | failed: " + "; ".join(failures)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


def check(failures, cond, label):
    if not cond:
        failures.append(label)


@pytest.fixture(scope="module")
def example():
    mg = parse_misinfo_json(EXAMPLE_JSON.read_text())
    return mg, traverse(mg)


@pytest.fixture(scope="module")
def runs_2x2():
    return nondegenerate_instances((2, 2), 100, seed=SEED)


@pytest.fixture(scope="module")
def runs_3x2():
    return nondegenerate_instances((3, 2), 100, seed=SEED)


def sme_placement_failures(mg, graph, tag):
    out = []
    smes = compute_sme(graph)
    if not smes:
        out.append(f"{tag}: no sme")
    for sigma in smes:
        if not any(sigma in graph.equilibria[x] for x in graph.terminal):
            out.append(f"{tag}: sme outside terminal nmes")
    if find_one_sme(mg) not in smes:
        out.append(f"{tag}: find_one_sme not in SME set")
    return out


def test_criterion_01_running_example(capsys, example):
    mg, graph = example
    failures = []
    sigma = ((F(0), F(1)), (HALF, HALF))
    check(failures, nme(mg) == [sigma], "nme")
    chi = {tuple(k + 1 for k in v) for v in characteristic_set(sigma)}
    check(failures, chi == {(2, 1), (2, 2)}, "chi")
    a, b = update(mg, (1, 0)), update(mg, (1, 1))
    # learned bottom-left: (7,2) in both views, rest untouched
    check(failures, all(g.cell((1, 0)) == (7, 2) for g in a.subjective), "bottom-left update")
    check(failures, all(a.subjective[i].cell(p) == mg.subjective[i].cell(p)
                        for i in range(2) for p in mg.actual.profiles() if p != (1, 0)), "bottom-left update leaves other cells")
    # learned bottom-right: only the second view changes
    check(failures, b.subjective[0] == mg.subjective[0] and b.subjective[1].cell((1, 1)) == (1, 1), "bottom-right update")
    two_b = update(a, (1, 1))
    expected_terminal = {a, two_b}
    got_terminal = graph.terminal_games()
    check(failures, got_terminal == expected_terminal,
          f"terminal set has {len(got_terminal)} games, expected 2 (extra member: the (2,2)-learned game"
          f" self-loops on (2,2))" if got_terminal >= expected_terminal else "terminal set")
    check(failures, naive_adaptation(mg).lad == 2 and graph.stats.lad == 2, "lad")
    check(failures, compute_sme(graph) == [((F(0), F(1)), (F(1), F(0)))], "sme")
    report(capsys, 1, failures, "running example nme, chi, updates, terminal set, lad=2, sme (exact)")


def test_criterion_02_poa_pom(capsys, example):
    mg, _ = example
    failures = []
    opt_profile, opt = social_optimum(mg.actual)
    check(failures, opt == 12, "SW(opt) = 12")
    brute_opt = max(sum(mg.actual.cell(p)) for p in mg.actual.profiles())
    check(failures, opt == brute_opt, "optimum vs brute force")

    def sw(profile):
        return sum(brute_expected(mg.actual, profile, i) for i in range(2))

    eqs = all_nash(mg.actual).profiles
    poa_oracle = brute_opt / min(sw(s) for s in eqs)
    nmes = nme(mg)
    pom_oracle = brute_opt / min(sw(s) for s in nmes)
    check(failures, min(sw(s) for s in nmes) == F(11, 2), "min nme SW")
    check(failures, price_of_anarchy(mg.actual, eqs) == poa_oracle, "PoA")
    check(failures, price_of_misinformation(mg) == pom_oracle, "PoM")
    check(failures, {"price_of_anarchy", "price_of_misinformation"} <= set(KNOWN_DISCREPANCIES), "discrepancy note")
    report(capsys, 2, failures, f"SW(opt)=12, PoA={poa_oracle}, PoM={pom_oracle} match the oracle; discrepancy note present")


def test_criterion_03_lad_bound(capsys, runs_2x2, runs_3x2):
    failures = []
    for shape, runs in (("2x2", runs_2x2), ("3x2", runs_3x2)):
        check(failures, len(runs) == 100, f"{shape}: only {len(runs)} runs")
        for k, (mg, graph) in enumerate(runs):
            check(failures, graph.stats.lad <= mg.actual.num_profiles, f"{shape} run {k}: lad > |S|")
    for shape, size in (((2, 2), 4), ((3, 2), 6)):
        mg = adversarial_lad(Setting(shape))
        lad = naive_adaptation(mg).lad
        check(failures, lad == size == traverse(mg).stats.lad, f"adversarial {shape}: lad {lad} != {size}")
    report(capsys, 3, failures, "LAD <= |S| on 100+100 random runs; adversarial LAD = 4 (2x2) and 6 (3x2)")


def test_criterion_04_update_algebra(capsys):
    failures = []
    rng = np.random.default_rng(SEED)
    for case in range(200):
        counts = (2, 2) if case % 2 == 0 else (3, 2)
        n = len(counts)
        games = [NormalFormGame.from_function(counts, lambda p: [int(x) for x in rng.integers(-10, 11, n)])
                 for _ in range(n + 1)]
        mg = MisinformationGame(games[0], tuple(games[1:]))
        profiles = list(mg.actual.profiles())
        u = profiles[int(rng.integers(len(profiles)))]
        v = profiles[int(rng.integers(len(profiles)))]
        once = update(mg, v)
        check(failures, mg_equal(update(once, v), once), f"case {case}: idempotence")
        check(failures, mg_equal(update(update(mg, u), v), update(update(mg, v), u)), f"case {case}: commutativity")
    report(capsys, 4, failures, "idempotence and commutativity bit-exact on 200 seeded cases")


def test_criterion_05_inflation(capsys):
    failures = []
    rng = np.random.default_rng(SEED)
    games, redraws = [], 0
    while len(games) < 50:
        g = NormalFormGame.from_function((2, 2), lambda p: [int(x) for x in rng.integers(-10, 11, 2)])
        if all_nash(g).degenerate:
            redraws += 1
            continue
        games.append(g)
    for k, g in enumerate(games):
        for target in ((2, [3, 3]), (3, [2, 2, 1])):
            big = inflate_game(g, *target)
            try:
                rep = is_inflated_version(g, big)
            except DegenerateGameError:
                failures.append(f"game {k} -> {target}: degenerate")
                continue
            check(failures, rep.is_inflated, f"game {k} -> {target}: bullet {rep.violated_bullet}")
            cell = big.cell((1, 1) + (0,) * (len(target[1]) - 2))
            mutated = big.with_cell((1, 1) + (0,) * (len(target[1]) - 2), (cell[0] + 1,) + cell[1:])
            bad = is_inflated_version(g, mutated)
            check(failures, not bad.is_inflated and bad.violated_bullet == 3, f"game {k} -> {target}: mutation missed")
    report(capsys, 5, failures, f"50 random 2x2 games ({redraws} degenerate redraws) inflate and verify; mutations caught")


def test_criterion_06_graph_structure(capsys, runs_2x2):
    failures = []
    for k, (mg, graph) in enumerate(runs_2x2):
        dag = nx.DiGraph()
        dag.add_nodes_from(graph.loopless_nodes())
        dag.add_edges_from((w, x) for w, _, x in graph.loopless_edges())
        if not nx.is_directed_acyclic_graph(dag):
            failures.append(f"run {k}: cycle")
            continue
        check(failures, [n for n in dag if dag.in_degree(n) == 0] == [()], f"run {k}: source")
        sinks = {n for n in dag if dag.out_degree(n) == 0}
        check(failures, sinks <= set(graph.terminal), f"run {k}: sink not terminal")
        check(failures, nx.dag_longest_path_length(dag) == naive_adaptation(mg).lad, f"run {k}: longest path")
    report(capsys, 6, failures, "100 random 2x2 runs: loopless graph acyclic, single source, sinks terminal, path = lad")


def test_criterion_07_stable_set(capsys, runs_2x2, runs_3x2):
    failures = []
    for shape, runs in (("2x2", runs_2x2[:50]), ("3x2", runs_3x2[:50])):
        for k, (mg, graph) in enumerate(runs):
            closure = set(graph.terminal_games())
            while True:
                nxt = closure | adapt_step(closure)
                if nxt == closure:
                    break
                closure = nxt
            stable = naive_adaptation(mg).stable_set
            same = len(closure) == len(stable) and all(any(mg_equal(x, y) for y in stable) for x in closure)
            check(failures, same, f"{shape} run {k}")
    report(capsys, 7, failures, "terminal-set closure equals the naive stable set on 50+50 runs")


def test_criterion_08_sme_placement(capsys, example, runs_2x2, runs_3x2):
    failures = []
    failures += sme_placement_failures(*example, "example")
    for shape, runs in (("2x2", runs_2x2), ("3x2", runs_3x2)):
        for k, (mg, graph) in enumerate(runs):
            failures += sme_placement_failures(mg, graph, f"{shape} run {k}")
    for shape in ((2, 2), (3, 2)):
        mg = adversarial_lad(Setting(shape))
        failures += sme_placement_failures(mg, traverse(mg), f"adversarial {shape}")
    report(capsys, 8, failures, "every run has an sme, each from a terminal member; find_one_sme lands in the set")


def test_criterion_09_parallel(capsys, runs_3x2):
    failures = []
    for k, (mg, graph) in enumerate(runs_3x2[:20]):
        base = (graph.terminal, compute_sme(graph), graph.stats.unique_mgs, export_dot(graph))
        for threads in (2, 4, 8):
            g = parallel_traverse(mg, threads)
            got = (g.terminal, compute_sme(g), g.stats.unique_mgs, export_dot(g))
            check(failures, got == base, f"run {k}, k={threads}")
    report(capsys, 9, failures, "20 random 3x2 runs identical for k in {2,4,8} vs k=1 (terminal, smes, counts, DOT)")


def test_criterion_10_monte_carlo(capsys):
    failures = []
    table = monte_carlo(Setting((2, 2), runs=100, seed=SEED))
    agg = table.aggregate()
    for r in table.rows:
        check(failures, r.naive_nodes >= r.unique_mgs, f"run {r.run}: naive < unique")
    brackets = {"naive_nodes": (4, 40), "unique_mgs": (3, 20), "leaves": (2, 20), "smes": (1, 10)}
    for key, (lo, hi) in brackets.items():
        check(failures, lo <= agg[key + "_mean"] <= hi, f"{key} mean {agg[key + '_mean']:.2f} outside [{lo},{hi}]")
    summary = ", ".join(f"{k}={agg[k + '_mean']:.2f}" for k in brackets)
    report(capsys, 10, failures, f"2x2 Monte Carlo ({agg['runs']} runs, {agg['failures']} failed): {summary}")


def test_criterion_11_nash_audit(capsys):
    failures = []
    rng = np.random.default_rng(SEED)
    total = 0
    for case in range(200):
        counts = (int(rng.integers(1, 5)), int(rng.integers(1, 5)))
        g = NormalFormGame.from_function(counts, lambda p: [int(x) for x in rng.integers(-10, 11, 2)])
        eq = all_nash(g)
        check(failures, bool(eq.profiles), f"case {case}: empty")
        for sigma in eq.profiles:
            total += 1
            check(failures, brute_is_nash(g, sigma), f"case {case}: {sigma} fails best-response audit")

    def pure(i, n):
        return tuple(F(int(j == i)) for j in range(n))

    pd = NormalFormGame.from_nested([[[3, 3], [0, 5]], [[5, 0], [1, 1]]])
    mp = NormalFormGame.from_nested([[[1, -1], [-1, 1]], [[-1, 1], [1, -1]]])
    chicken = NormalFormGame.from_nested([[[0, 0], [-1, 1]], [[1, -1], [-10, -10]]])
    check(failures, set(all_nash(pd).profiles) == {(pure(1, 2), pure(1, 2))}, "prisoner's dilemma")
    check(failures, set(all_nash(mp).profiles) == {((HALF, HALF), (HALF, HALF))}, "matching pennies")
    mix = (F(9, 10), F(1, 10))
    check(failures, set(all_nash(chicken).profiles) == {(pure(0, 2), pure(1, 2)), (pure(1, 2), pure(0, 2)), (mix, mix)},
          "chicken")
    report(capsys, 11, failures, f"{total} equilibria of 200 random games pass the exact audit; textbook sets match")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
