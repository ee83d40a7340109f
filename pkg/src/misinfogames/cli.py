"""Command-line entry point.

Exit codes: 0 success, 1 domain error (degenerate game, undefined metric,
cap exceeded, ...), 2 unreadable or malformed input.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from . import __version__
from .adaptation import (
    AdaptationConfig,
    compute_sme,
    export_dot,
    find_one_sme_path,
    naive_adaptation,
    parallel_traverse,
    traverse,
)
from .errors import MisinfoGameError, SchemaError, UndefinedMetricError
from .experiments import Setting, emit_csv, monte_carlo
from .game import price_of_anarchy, social_optimum
from .inflation import inflate_game
from .io import (
    dumps,
    emit_misinfo_json,
    game_to_json,
    parse_game_json,
    parse_json_text,
    misinfo_from_json,
    profile_to_json,
)
from .misinfo import inflation_process, nme, price_of_misinformation
from .nash import all_nash

COMMANDS = ["solve", "nme", "canonicalize", "inflate", "adapt", "sme", "one-sme", "experiment", "export-dot"]


def _read(path: Optional[str]) -> str:
    if path is None or path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _write(path: Optional[str], text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _config(args) -> AdaptationConfig:
    return AdaptationConfig(
        allow_degenerate=args.allow_degenerate,
        tol=args.tol,
        seed=args.seed,
        support_eps=args.support_eps,
        max_nodes=args.max_nodes,
    )


def _report_config(args) -> dict:
    # thread count is left out so reports match across --threads values
    return {
        "command": args.command,
        "seed": args.seed,
        "tol": args.tol,
        "support_eps": args.support_eps,
        "allow_degenerate": args.allow_degenerate,
        "max_nodes": args.max_nodes,
    }


def _metric(fn):
    try:
        value = fn()
    except UndefinedMetricError:
        return None
    return value if isinstance(value, float) else str(value)


def _load_misinfo(args):
    return misinfo_from_json(parse_json_text(_read(args.input), args.input or "<stdin>"))


def _graph(mg, args):
    cfg = _config(args)
    return traverse(mg, cfg) if args.threads == 1 else parallel_traverse(mg, args.threads, cfg)


def cmd_solve(args) -> str:
    game = parse_game_json(_read(args.input))
    eq = all_nash(game, tol=args.tol, seed=args.seed)
    opt_profile, opt_value = social_optimum(game)
    out = {
        "equilibria": [profile_to_json(p) for p in eq.profiles],
        "mode": eq.mode,
        "degenerate": eq.degenerate,
        "incomplete": eq.incomplete,
        "social_optimum": {"profile": list(opt_profile), "value": str(opt_value)},
        "price_of_anarchy": _metric(lambda: price_of_anarchy(game, eq.profiles)),
    }
    return dumps(out)


def cmd_nme(args) -> str:
    mg = _load_misinfo(args)
    cfg = _config(args)
    profiles = nme(mg, allow_degenerate=cfg.allow_degenerate, tol=cfg.tol, seed=cfg.seed)
    out = {
        "nme": [profile_to_json(p) for p in profiles],
        "price_of_misinformation": _metric(lambda: price_of_misinformation(mg, profiles)),
    }
    return dumps(out)


def cmd_canonicalize(args) -> str:
    return emit_misinfo_json(inflation_process(_load_misinfo(args)))


def cmd_inflate(args) -> str:
    game = parse_game_json(_read(args.input))
    if args.strategies is None:
        raise SchemaError("--strategies", "required for inflate")
    try:
        counts = [int(c) for c in args.strategies.split(",")]
    except ValueError:
        raise SchemaError("--strategies", "expected comma-separated integers") from None
    players = args.players if args.players is not None else len(counts)
    return dumps(game_to_json(inflate_game(game, players, counts)))


def _positions(xs) -> list:
    return [list(v) for v in xs]


def cmd_adapt(args) -> str:
    mg = _load_misinfo(args)
    graph = _graph(mg, args)
    smes = compute_sme(graph, args.support_eps)
    naive = naive_adaptation(mg, config=_config(args))
    out = {
        "version": __version__,
        "config": _report_config(args),
        "lad": naive.lad,
        "unique_mgs": graph.stats.unique_mgs,
        "naive_nodes": naive.total_nodes,
        "leaves": graph.stats.leaves,
        "terminal_games": graph.stats.terminal_games,
        "smes": [profile_to_json(p) for p in smes],
        "terminal": [_positions(x) for x in graph.terminal],
    }
    return dumps(out)


def cmd_sme(args) -> str:
    mg = _load_misinfo(args)
    smes = compute_sme(_graph(mg, args), args.support_eps)
    return dumps({"smes": [profile_to_json(p) for p in smes]})


def cmd_one_sme(args) -> str:
    mg = _load_misinfo(args)
    result = find_one_sme_path(mg, _config(args))
    return dumps({"sme": profile_to_json(result.profile), "steps": result.steps, "path": _positions(result.path)})


def cmd_experiment(args) -> str:
    setting = Setting.parse(args.shape, runs=args.runs, seed=args.seed, payoff_lo=args.lo, payoff_hi=args.hi)
    table = monte_carlo(setting, threads=args.threads, config=_config(args))
    if args.format == "csv":
        return emit_csv(table)
    return dumps(table.to_json())


def cmd_export_dot(args) -> str:
    mg = _load_misinfo(args)
    return export_dot(_graph(mg, args), loopless=args.loopless)


HANDLERS = {
    "solve": cmd_solve,
    "nme": cmd_nme,
    "canonicalize": cmd_canonicalize,
    "inflate": cmd_inflate,
    "adapt": cmd_adapt,
    "sme": cmd_sme,
    "one-sme": cmd_one_sme,
    "experiment": cmd_experiment,
    "export-dot": cmd_export_dot,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--in", dest="input", help="input JSON file (default: stdin)")
    common.add_argument("--out", dest="output", help="output file (default: stdout)")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=["json", "csv", "dot"], default=None)
    common.add_argument("--tol", type=float, default=1e-9)
    common.add_argument("--support-eps", type=float, default=1e-7)
    common.add_argument("--allow-degenerate", action="store_true")
    common.add_argument("--max-nodes", type=int, default=10 ** 6)

    parser = argparse.ArgumentParser(prog="misinfo-games", description="Misinformation games toolkit")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name == "inflate":
            p.add_argument("--players", type=int)
            p.add_argument("--strategies", help="comma-separated target strategy counts")
        if name == "experiment":
            p.add_argument("--shape", default="2x2", help="e.g. 3x2x2")
            p.add_argument("--runs", type=int, default=100)
            p.add_argument("--lo", type=int, default=-10)
            p.add_argument("--hi", type=int, default=10)
        if name == "export-dot":
            p.add_argument("--loopless", action="store_true")
    return parser


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads < 1:
        parser.error("--threads must be at least 1")
    try:
        text = HANDLERS[args.command](args)
        _write(args.output, text)
    except (SchemaError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except MisinfoGameError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
