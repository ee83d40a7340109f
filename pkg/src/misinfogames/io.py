"""JSON reading and writing for games, misinformation games and profiles."""

from __future__ import annotations

import json
import math
from fractions import Fraction
from typing import Any

from .errors import SchemaError
from .game import NormalFormGame, StrategyProfile, format_rational, to_rational
from .misinfo import MisinformationGame


def _rational(value: Any, path: str) -> Fraction:
    if isinstance(value, bool) or not isinstance(value, (int, str)):
        raise SchemaError(path, f"expected an integer or 'p/q' string, got {value!r}")
    try:
        return to_rational(value)
    except ZeroDivisionError:
        raise SchemaError(path, f"zero denominator in {value!r}") from None
    except ValueError as exc:
        raise SchemaError(path, str(exc)) from None


def game_from_json(obj: Any, path: str = "$") -> NormalFormGame:
    if not isinstance(obj, dict):
        raise SchemaError(path, "expected an object")
    for key in ("players", "strategies", "payoffs"):
        if key not in obj:
            raise SchemaError(f"{path}.{key}", "missing field")
    n = obj["players"]
    if isinstance(n, bool) or not isinstance(n, int) or n < 0:
        raise SchemaError(f"{path}.players", "expected a non-negative integer")
    counts = obj["strategies"]
    if not isinstance(counts, list) or len(counts) != n:
        raise SchemaError(f"{path}.strategies", f"expected a list of {n} positive integers")
    for k, c in enumerate(counts):
        if isinstance(c, bool) or not isinstance(c, int) or c < 1:
            raise SchemaError(f"{path}.strategies[{k}]", "expected a positive integer")

    cells = []

    def walk(node, depth, where):
        if depth == n:
            if not isinstance(node, list) or len(node) != n:
                raise SchemaError(where, f"expected a payoff vector of length {n}")
            cells.append(tuple(_rational(x, f"{where}[{k}]") for k, x in enumerate(node)))
            return
        if not isinstance(node, list) or len(node) != counts[depth]:
            raise SchemaError(where, f"expected {counts[depth]} entries for player {depth + 1}")
        for k, child in enumerate(node):
            walk(child, depth + 1, f"{where}[{k}]")

    walk(obj["payoffs"], 0, f"{path}.payoffs")
    assert len(cells) == math.prod(counts)
    return NormalFormGame(tuple(counts), tuple(cells))


def game_to_json(game: NormalFormGame) -> dict:
    def conv(node):
        if isinstance(node, list):
            return [conv(x) for x in node]
        return format_rational(node)

    return {
        "players": game.num_players,
        "strategies": list(game.strategy_counts),
        "payoffs": conv(game.to_nested()),
    }


def misinfo_from_json(obj: Any, path: str = "$") -> MisinformationGame:
    if not isinstance(obj, dict):
        raise SchemaError(path, "expected an object")
    if "actual" not in obj:
        raise SchemaError(f"{path}.actual", "missing field")
    if "subjective" not in obj:
        raise SchemaError(f"{path}.subjective", "missing field")
    if not isinstance(obj["subjective"], list):
        raise SchemaError(f"{path}.subjective", "expected a list of games")
    actual = game_from_json(obj["actual"], f"{path}.actual")
    views = tuple(game_from_json(g, f"{path}.subjective[{k}]") for k, g in enumerate(obj["subjective"]))
    return MisinformationGame(actual, views)


def misinfo_to_json(mg: MisinformationGame) -> dict:
    return {"actual": game_to_json(mg.actual), "subjective": [game_to_json(g) for g in mg.subjective]}


def parse_json_text(text: str, path: str = "$") -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(path, f"invalid JSON: {exc}") from None


def parse_misinfo_json(text: str) -> MisinformationGame:
    return misinfo_from_json(parse_json_text(text))


def parse_game_json(text: str) -> NormalFormGame:
    return game_from_json(parse_json_text(text))


def dumps(obj: Any) -> str:
    """Stable text form: fixed key order as built, two-space indent, trailing newline."""
    return json.dumps(obj, indent=2) + "\n"


def emit_misinfo_json(mg: MisinformationGame) -> str:
    return dumps(misinfo_to_json(mg))


def profile_to_json(profile: StrategyProfile) -> list:
    return [[p if isinstance(p, float) else format_rational(Fraction(p)) for p in s] for s in profile]


def profile_from_json(obj: Any, path: str = "$") -> StrategyProfile:
    if not isinstance(obj, list):
        raise SchemaError(path, "expected a list of strategies")
    out = []
    for i, s in enumerate(obj):
        if not isinstance(s, list):
            raise SchemaError(f"{path}[{i}]", "expected a list of probabilities")
        out.append(tuple(_rational(p, f"{path}[{i}][{j}]") for j, p in enumerate(s)))
    return tuple(out)
