"""JSON-friendly encodings: rationals as "p/q" strings, partitions as nested
arrays, and file formats for games and family tables."""

from __future__ import annotations

import json
from fractions import Fraction

from . import partitions, random_partitions
from .partitions import Coalition, Partition
from .random_partitions import RandomPartitionFamily
from .tu_games import TuGame
from .tux_games import TuxGame


def format_rational(x: Fraction) -> str:
    return str(Fraction(x))


def parse_rational(value) -> Fraction:
    """Parse "p/q" or an integer; floats are rejected to keep arithmetic exact."""
    if isinstance(value, bool) or isinstance(value, float):
        raise ValueError(f"expected an exact rational, got {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational number: {value!r}") from exc
    raise ValueError(f"expected an exact rational, got {value!r}")


def coalition_to_list(mask: Coalition) -> list[int]:
    return list(partitions.members(mask))


def coalition_from_list(data) -> Coalition:
    if not isinstance(data, (list, tuple)):
        raise ValueError(f"expected a list of player ids, got {data!r}")
    return partitions.mask_from(data)


def partition_to_lists(pi: Partition) -> list[list[int]]:
    return [coalition_to_list(block) for block in pi]


def partition_from_lists(data) -> Partition:
    if not isinstance(data, (list, tuple)):
        raise ValueError(f"expected a list of blocks, got {data!r}")
    return partitions.partition_from(data)


def payoff_to_json(payoff) -> dict[str, str]:
    return {str(i): format_rational(x) for i, x in sorted(payoff.items())}


# --- TU games: {"players": [1,2,3], "worth": {"[1,2]": "3/2", ...}} ---


def tu_game_to_json(v: TuGame) -> dict:
    worth = {
        json.dumps(coalition_to_list(S), separators=(",", ":")): format_rational(x)
        for S, x in sorted(v.nonzero_worths().items())
    }
    return {"players": coalition_to_list(v.players), "worth": worth}


def tu_game_from_json(data) -> TuGame:
    players = coalition_from_list(data.get("players", []))
    worth = {}
    for key, raw in data.get("worth", {}).items():
        try:
            ids = json.loads(key)
        except json.JSONDecodeError as exc:
            raise ValueError(f"worth key {key!r} is not a JSON list of ids") from exc
        worth[coalition_from_list(ids)] = parse_rational(raw)
    return TuGame(players, worth)


# --- TUX games: {"players": [...], "worth": [{"S": .., "pi": .., "w": ..}]} ---


def tux_game_to_json(w: TuxGame) -> dict:
    entries = [
        {
            "S": coalition_to_list(S),
            "pi": partition_to_lists(pi),
            "w": format_rational(x),
        }
        for (S, pi), x in w.cells()
        if S != 0
    ]
    return {"players": coalition_to_list(w.players), "worth": entries}


def tux_game_from_json(data) -> TuxGame:
    players = coalition_from_list(data.get("players", []))
    worth = {}
    for pos, entry in enumerate(data.get("worth", [])):
        try:
            key = (
                coalition_from_list(entry["S"]),
                partition_from_lists(entry["pi"]),
            )
            worth[key] = parse_rational(entry["w"])
        except (KeyError, ValueError) as exc:
            raise ValueError(f"worth entry #{pos}: {exc}") from exc
    # empty-coalition cells are implied; the constructor checks full coverage
    worth = {key: x for key, x in worth.items() if key[0] != 0 or x != 0}
    return TuxGame(players, worth)


def game_to_json(game) -> dict:
    if isinstance(game, TuGame):
        return tu_game_to_json(game)
    if isinstance(game, TuxGame):
        return tux_game_to_json(game)
    raise ValueError(f"not a game: {game!r}")


def game_from_json(data):
    """Load a TU or partition-function game, telling them apart by shape."""
    if not isinstance(data, dict) or "players" not in data:
        raise ValueError("a game file must be a JSON object with a 'players' key")
    worth = data.get("worth", {})
    if isinstance(worth, dict):
        return tu_game_from_json(data)
    if isinstance(worth, list):
        return tux_game_from_json(data)
    raise ValueError("'worth' must be an object (TU) or an array (partition function)")


def load_game(path):
    with open(path) as handle:
        try:
            data = json.load(handle)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    try:
        return game_from_json(data)
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from exc


# --- family tables: {"n": 4, "entries": [{"partition": .., "prob": ..}]} ---


def family_table_from_json(data, label="table") -> RandomPartitionFamily:
    """Build a family from explicit tables, falling back to pstar elsewhere.

    Accepts a single table object or a list of them. A table names its player
    set either explicitly ("players": [...]) or by cardinality ("n": 4,
    meaning players 1..n). Distribution invariants are enforced on first use.
    """
    tables = {}
    items = data if isinstance(data, list) else [data]
    for pos, table in enumerate(items):
        if "players" in table:
            players = coalition_from_list(table["players"])
        elif "n" in table:
            players = partitions.mask_from(range(1, int(table["n"]) + 1))
        else:
            raise ValueError(f"table #{pos}: needs a 'players' or 'n' key")
        dist = {}
        for entry_pos, entry in enumerate(table.get("entries", [])):
            try:
                pi = partition_from_lists(entry["partition"])
                dist[pi] = parse_rational(entry["prob"])
            except (KeyError, ValueError) as exc:
                raise ValueError(f"table #{pos}, entry #{entry_pos}: {exc}") from exc
        tables[players] = dist
    return random_partitions.family_from_distributions(label, tables)


def load_family_table(path) -> RandomPartitionFamily:
    with open(path) as handle:
        try:
            data = json.load(handle)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    try:
        return family_table_from_json(data, label=f"table:{path}")
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from exc
