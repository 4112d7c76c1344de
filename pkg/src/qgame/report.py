"""Reproduction harness: every published number recomputed and compared.

Each check yields a :class:`ClaimReport`. A claim matches when the absolute
deviation is below the report tolerance (1e-9, overridable through the
``QGAME_TOLERANCE`` environment variable). Claims known to disagree with
first-principles simulation are reported as ``flagged-discrepancy`` with the
reason attached instead of failing the run.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Any, Optional

import numpy as np

from . import equilibrium as eqm
from .games import BimatrixGame, PayoffParams, classical_game, pd_weights
from .protocols import (
    AS_PUBLISHED,
    COMMITTED,
    DEFAULT_GRID,
    classical_replication_check,
    combined_table,
    committed_catalogs,
    ewl_catalog,
    ewl_spec,
    grid_axis,
    induced_matrix,
    play,
    random_flip,
    shared_state_spec,
    vb_maximize,
    vb_payoff_closed_form,
)
from .serialize import fmt_pair, game_table, game_to_dict

DEFAULT_TOLERANCE = 1e-9
TOLERANCE_ENV = "QGAME_TOLERANCE"

MATCH = "match"
MISMATCH = "mismatch"
FLAGGED = "flagged-discrepancy"

PUBLISHED_PARAMS = PayoffParams(3.0, 5.0, 1.0)

# Combined 4x4 table over C, D, Q, R as printed.
PRINTED_TABLE = [
    [(3, 3), (0, 5), (1, 1), (2.5, 2.5)],
    [(5, 0), (1, 1), (0, 5), (2.5, 2.5)],
    [(1, 1), (5, 0), (3, 3), (2.5, 2.5)],
    [(2.5, 2.5), (2.5, 2.5), (2.5, 2.5), (2.5, 2.5)],
]

# Shared-state 3x3 submatrix over C, D, Q as printed.
PRINTED_SUBMATRIX = [
    [(2, 2), (2.5, 2.5), (2.5, 2.5)],
    [(2.5, 2.5), (2, 2), (2.5, 2.5)],
    [(2.5, 2.5), (2.5, 2.5), (2, 2)],
]

# Printed cells that first-principles simulation contradicts.
KNOWN_DISCREPANCIES = {
    "submatrix[C\\Q]": (
        "C = I and Q = iZ are both diagonal, so no bit flip occurs and the Bell state "
        "(|00>+|11>)/sqrt(2) keeps its support on {00, 11}; the payoff is (a+c)/2 = 2 for each player"
    ),
    "submatrix[Q\\C]": (
        "Q = iZ and C = I are both diagonal, so no bit flip occurs and the Bell state "
        "(|00>+|11>)/sqrt(2) keeps its support on {00, 11}; the payoff is (a+c)/2 = 2 for each player"
    ),
}


def report_tolerance() -> float:
    raw = os.environ.get(TOLERANCE_ENV)
    if raw is None or raw == "":
        return DEFAULT_TOLERANCE
    try:
        tol = float(raw)
    except ValueError as exc:
        raise ValueError(f"{TOLERANCE_ENV} must be a positive number, got {raw!r}") from exc
    if not (math.isfinite(tol) and tol > 0):
        raise ValueError(f"{TOLERANCE_ENV} must be a positive number, got {raw!r}")
    return tol


@dataclass
class ClaimReport:
    claim_id: str
    provenance: str
    expected: Any
    computed: Any
    deviation: float
    verdict: str = ""
    note: str = ""
    tolerance: float = DEFAULT_TOLERANCE

    def __post_init__(self):
        if not self.verdict:
            if self.deviation < self.tolerance:
                self.verdict = MATCH
            elif self.claim_id in KNOWN_DISCREPANCIES:
                self.verdict = FLAGGED
                self.note = self.note or KNOWN_DISCREPANCIES[self.claim_id]
            else:
                self.verdict = MISMATCH

    def as_dict(self) -> dict:
        return {
            "id": self.claim_id,
            "provenance": self.provenance,
            "expected": _plain(self.expected),
            "computed": _plain(self.computed),
            "deviation": float(self.deviation),
            "verdict": self.verdict,
            "note": self.note,
        }


def _plain(v):
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    return v


def _pair_dev(expected, computed) -> float:
    return float(np.max(np.abs(np.asarray(expected, dtype=float) - np.asarray(computed, dtype=float))))


def _cell_claims(prefix: str, provenance: str, game: BimatrixGame, expected_grid, tol: float) -> list:
    out = []
    for i, r in enumerate(game.row_labels):
        for j, c in enumerate(game.col_labels):
            exp = tuple(float(v) for v in expected_grid[i][j])
            got = game.cell(i, j)
            out.append(ClaimReport(f"{prefix}[{r}\\{c}]", provenance, list(exp), list(got),
                                   _pair_dev(exp, got), tolerance=tol))
    return out


def ewl_expected(params: PayoffParams) -> list:
    a, b, c = params.a, params.b, params.c
    return [
        [(a, a), (0, b), (c, c)],
        [(b, 0), (c, c), (0, b)],
        [(c, c), (b, 0), (a, a)],
    ]


def _hausdorff(xs, ys) -> float:
    xs, ys = np.asarray(xs, dtype=float), np.asarray(ys, dtype=float)
    if len(xs) == 0 or len(ys) == 0:
        return math.inf if len(xs) != len(ys) else 0.0
    d = np.max(np.abs(xs[:, None, :] - ys[None, :, :]), axis=2)
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


def closed_form_deviation(grid: int = DEFAULT_GRID) -> tuple:
    """Largest gap between simulated R(p) vs R(q) play and the closed form.

    Returns ``(max_gap, max_alice_bob_gap)`` over a ``grid x grid`` lattice.
    """
    spec = shared_state_spec(PUBLISHED_PARAMS)
    axis = grid_axis(grid)
    worst = worst_sym = 0.0
    for p in axis:
        rp = random_flip(float(p))
        for q in axis:
            sim = play(spec, rp, random_flip(float(q)))
            ref = vb_payoff_closed_form(float(p), float(q))
            worst = max(worst, abs(sim.alice - ref.alice), abs(sim.bob - ref.bob))
            worst_sym = max(worst_sym, abs(sim.alice - sim.bob))
    return worst, worst_sym


def grid_maximizers(grid: int = DEFAULT_GRID, tol: float = 1e-12) -> tuple:
    """Grid-sweep maximum of the simulated random-strategy payoff and its locations."""
    spec = shared_state_spec(PUBLISHED_PARAMS)
    axis = grid_axis(grid)
    vals = np.array([[play(spec, random_flip(float(p)), random_flip(float(q))).alice for q in axis] for p in axis])
    best = float(vals.max())
    where = np.argwhere(vals >= best - tol)
    return best, [(float(axis[i]), float(axis[j])) for i, j in where]


def _nash_labels(game: BimatrixGame) -> list:
    return sorted(f"{game.row_labels[e.row]}\\{game.col_labels[e.col]} {e.kind}" for e in eqm.pure_nash(game))


def _set_claim(cid, provenance, expected: list, computed: list, tol: float) -> ClaimReport:
    dev = 0.0 if sorted(expected) == sorted(computed) else 1.0
    return ClaimReport(cid, provenance, sorted(expected), sorted(computed), dev, tolerance=tol)


def run_claims(params: PayoffParams = PUBLISHED_PARAMS, grid: int = DEFAULT_GRID,
               tol: Optional[float] = None) -> tuple:
    """Run the full claim suite.

    ``params`` drives the symbolic EWL matrix claim; the numeric claims about
    the random strategy and the combined tables refer to the published
    instance (a, b, c) = (3, 5, 1). Returns ``(claims, artifacts)`` where
    ``artifacts`` holds the computed games for display.
    """
    tol = report_tolerance() if tol is None else tol
    claims = []
    cat = ewl_catalog()

    ewl = induced_matrix(ewl_spec(params), cat)
    claims += _cell_claims("ewl", "extended EWL payoff matrix over C, D, Q (symbolic a, b, c)",
                           ewl, ewl_expected(params), tol)

    gap, sym_gap = closed_form_deviation(grid)
    claims.append(ClaimReport("rand.identity", "closed-form random-strategy payoff (4 - 2pq + p + q)/2, "
                              f"{grid}x{grid} grid", 0.0, gap, gap, tolerance=tol))
    claims.append(ClaimReport("rand.symmetric", "random-strategy payoff equal for both players",
                              0.0, sym_gap, sym_gap, tolerance=tol))

    best, where = grid_maximizers(grid)
    claims.append(ClaimReport("rand.max", "maximal random-strategy payoff", 2.5, best, abs(best - 2.5),
                              tolerance=tol))
    expected_at = [(1.0, 0.0), (0.0, 1.0)]
    claims.append(ClaimReport("rand.max.location", "maximizers (p, q) = (1, 0) and (0, 1)",
                              [list(p) for p in expected_at], [list(p) for p in where],
                              _hausdorff(expected_at, where), tolerance=tol))
    vertex = [(p, q) for p, q, _ in vb_maximize(grid)]
    claims.append(ClaimReport("rand.max.vertex", "bilinear maximum attained on vertices",
                              [list(p) for p in expected_at], [list(p) for p in vertex],
                              _hausdorff(expected_at, vertex), tolerance=tol))
    both_id = play(shared_state_spec(PUBLISHED_PARAMS), random_flip(1.0), random_flip(1.0))
    claims.append(ClaimReport("rand(1,1)", "both players act with the identity", [2.0, 2.0], list(both_id),
                              _pair_dev((2, 2), both_id), tolerance=tol))

    combined = combined_table(AS_PUBLISHED, params=PUBLISHED_PARAMS)
    claims += _cell_claims("combined", "combined 4x4 payoff table over C, D, Q, R", combined, PRINTED_TABLE, tol)

    shared = induced_matrix(shared_state_spec(PUBLISHED_PARAMS), cat)
    claims += _cell_claims("submatrix", "C, D, Q played on the shared Bell state without disentangler",
                           shared, PRINTED_SUBMATRIX, tol)

    committed = combined_table(COMMITTED, (0.0, 1.0), params=PUBLISHED_PARAMS)
    for cell, exp in (("C", (2.0, 2.0)), ("R", (2.5, 2.5))):
        got = committed.cell(cell, "R")
        claims.append(ClaimReport(f"commit[{cell}\\R]", "R committed in advance with (p, q) = (0, 1)",
                                  list(exp), list(got), _pair_dev(exp, got), tolerance=tol))

    classical = classical_game(pd_weights(params))
    claims.append(_set_claim("nash.classical", "classical PD: mutual defection is the only equilibrium",
                             ["1\\1 strict"], _nash_labels(classical), tol))
    claims.append(_set_claim("nash.ewl", "EWL game over C, D, Q: (Q, Q) is the only equilibrium",
                             ["Q\\Q strict"], _nash_labels(ewl), tol))
    claims.append(_set_claim("nash.combined", "combined table: (Q, Q) strict, (R, R) only weak",
                             ["Q\\Q strict", "R\\R weak"], _nash_labels(combined), tol))

    rows, cols = committed_catalogs(0.0, 1.0)
    checks = {
        "ewl": classical_replication_check(ewl, ewl_spec(params), cat, tolerance=tol),
        "shared": classical_replication_check(shared, shared_state_spec(PUBLISHED_PARAMS), cat, tolerance=tol),
        "committed": classical_replication_check(committed, shared_state_spec(PUBLISHED_PARAMS), rows, cols,
                                                 tolerance=tol),
    }
    for name, rep in checks.items():
        worst = max(rep.max_deviation, rep.profile_deviation)
        claims.append(ClaimReport(f"replication.{name}", "a finite quantum game is the classical game of "
                                  "its induced matrix", 0.0, worst, worst, tolerance=tol))

    artifacts = {
        "ewl": ewl,
        "combined": combined,
        "shared_submatrix": shared,
        "committed_0_1": committed,
        "classical": classical,
    }
    return claims, artifacts


def exit_code(claims) -> int:
    return 1 if any(c.verdict == MISMATCH for c in claims) else 0


def bundle(claims, artifacts, params: PayoffParams, tol: float) -> dict:
    counts = {v: sum(c.verdict == v for c in claims) for v in (MATCH, MISMATCH, FLAGGED)}
    return {
        "tolerance": tol,
        "params": {"a": params.a, "b": params.b, "c": params.c},
        "summary": counts,
        "claims": [c.as_dict() for c in claims],
        "games": {name: game_to_dict(g) for name, g in artifacts.items()},
        "equilibria": {name: eqm.summarize(g) for name, g in artifacts.items()},
    }


def render(claims, artifacts) -> str:
    titles = {
        "ewl": "EWL induced matrix (C, D, Q)",
        "combined": "Combined table, as published",
        "shared_submatrix": "C, D, Q on the shared Bell state (computed)",
        "committed_0_1": "Combined table, R committed with (p, q) = (0, 1)",
        "classical": "Classical PD on measurement bits",
    }
    parts = []
    for name, game in artifacts.items():
        parts.append(titles.get(name, name))
        parts.append(game_table(game))
        parts.append("")

    def show(v):
        if isinstance(v, (list, tuple)) and len(v) == 2 and all(isinstance(x, (int, float)) for x in v):
            return fmt_pair(round(float(x), 12) + 0.0 for x in v)
        if isinstance(v, float):
            return f"{v:.6g}"
        return str(v)

    id_w = max(len(c.claim_id) for c in claims)
    parts.append(f"{'claim':<{id_w}}  {'expected':>14}  {'computed':>14}  {'deviation':>10}  verdict")
    for c in claims:
        parts.append(f"{c.claim_id:<{id_w}}  {show(c.expected):>14}  {show(c.computed):>14}  "
                     f"{c.deviation:>10.3g}  {c.verdict}")
        if c.verdict == FLAGGED:
            parts.append(f"{'':<{id_w}}  note: {c.note}")
    counts = {v: sum(c.verdict == v for c in claims) for v in (MATCH, MISMATCH, FLAGGED)}
    parts.append("")
    parts.append(f"{counts[MATCH]} match, {counts[MISMATCH]} mismatch, {counts[FLAGGED]} flagged")
    return "\n".join(parts) + "\n"
