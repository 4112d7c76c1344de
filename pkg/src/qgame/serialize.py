"""JSON and CSV encodings for games and reports.

Games use ``{"labels": {"row": [...], "col": [...]}, "cells": [[[r, c], ...], ...]}``
with row-major cells. Floats in JSON are written with 17 significant digits so
that a dump/load round trip reproduces every value bit for bit.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any

import numpy as np

from .games import BimatrixGame, game_from_grid


def _float17(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"cannot encode non-finite float {x!r} as JSON")
    s = format(x, ".17g")
    # Keep integral values recognisable as floats.
    if s.lstrip("-").isdigit():
        s += ".0"
    return s


def _encode(obj: Any, indent: int, level: int) -> str:
    pad = "\n" + " " * (indent * (level + 1)) if indent else ""
    end = "\n" + " " * (indent * level) if indent else ""
    sep = "," + pad if indent else ", "
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _float17(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{" + pad + sep.join(items) + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        # Payoff pairs and other flat numeric rows stay on one line.
        if all(isinstance(v, (int, float, np.integer, np.floating)) and not isinstance(v, bool) for v in seq):
            return "[" + ", ".join(_encode(v, 0, 0) for v in seq) + "]"
        return "[" + pad + sep.join(_encode(v, indent, level + 1) for v in seq) + end + "]"
    raise TypeError(f"cannot encode {type(obj).__name__} as JSON")


def dumps(obj: Any, indent: int = 2) -> str:
    return _encode(obj, indent, 0) + "\n"


def game_to_dict(game: BimatrixGame) -> dict:
    return {
        "labels": {"row": list(game.row_labels), "col": list(game.col_labels)},
        "cells": game.to_grid(),
    }


def game_from_dict(data: dict) -> BimatrixGame:
    try:
        labels = data.get("labels")
        cells = data["cells"]
    except (AttributeError, KeyError) as exc:
        raise ValueError("game JSON needs a 'cells' grid (and optional 'labels')") from exc
    if labels is not None and not (isinstance(labels, dict) and {"row", "col"} <= set(labels)):
        raise ValueError("'labels' must be an object with 'row' and 'col' lists")
    return game_from_grid(labels, cells)


def game_to_json(game: BimatrixGame) -> str:
    return dumps(game_to_dict(game))


def game_from_json(text: str) -> BimatrixGame:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"invalid game JSON: {exc}") from exc
    return game_from_dict(data)


def load_game(path) -> BimatrixGame:
    return game_from_json(Path(path).read_text())


def fmt_num(x: float) -> str:
    """Shortest round-trip repr, without a trailing ``.0``."""
    s = repr(float(x))
    if s == "-0.0":
        return "0"
    return s[:-2] if s.endswith(".0") else s


def fmt_pair(pair) -> str:
    return "(" + ",".join(fmt_num(v) for v in pair) + ")"


def csv_rows(header, rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt_num(v) if isinstance(v, (float, int, np.floating)) else str(v) for v in row))
    return "\n".join(lines) + "\n"


def game_csv(game: BimatrixGame) -> str:
    rows = []
    for i, r in enumerate(game.row_labels):
        for j, c in enumerate(game.col_labels):
            rows.append((r, c, float(game.payoffs[i, j, 0]), float(game.payoffs[i, j, 1])))
    return csv_rows(("row", "col", "alice", "bob"), rows)


def game_table(game: BimatrixGame, digits: int = 12, corner: str = "Alice\\Bob") -> str:
    """Plain-text matrix with cells rendered as ``(x,y)``."""

    def cell(i, j):
        return fmt_pair(round(float(v), digits) + 0.0 for v in game.payoffs[i, j])

    head = [corner] + list(game.col_labels)
    body = [[r] + [cell(i, j) for j in range(game.shape[1])] for i, r in enumerate(game.row_labels)]
    widths = [max(len(row[k]) for row in [head] + body) for k in range(len(head))]
    lines = ["  ".join(s.rjust(w) for s, w in zip(head, widths))]
    lines.append("-" * len(lines[0]))
    lines += ["  ".join(s.rjust(w) for s, w in zip(row, widths)) for row in body]
    return "\n".join(lines)
