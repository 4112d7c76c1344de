"""Equilibrium and dominance analysis for small bimatrix games."""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np
from scipy.optimize import linprog

from .games import BimatrixGame, MixedProfile
from .protocols import PayoffPair

logger = logging.getLogger(__name__)

TIE_TOL = 1e-9
MAX_SUPPORT_DIM = 6

ROW, COL = 0, 1


class PureEquilibrium(NamedTuple):
    row: int
    col: int
    payoffs: PayoffPair
    kind: str  # "strict" or "weak"


@dataclass(frozen=True, eq=False)
class MixedEquilibrium:
    profile: MixedProfile
    payoffs: PayoffPair
    row_support: tuple
    col_support: tuple
    degenerate: bool = False

    @property
    def is_pure(self) -> bool:
        return len(self.row_support) == 1 and len(self.col_support) == 1


class Equilibria(list):
    """List of equilibria with a free-text ``note`` (e.g. why it is empty)."""

    def __init__(self, items=(), note: str = ""):
        super().__init__(items)
        self.note = note


def _player_matrix(game: BimatrixGame, player: int) -> np.ndarray:
    """Payoffs of ``player`` with rows = own strategies, cols = opponent's."""
    if player == ROW:
        return game.row_matrix
    if player == COL:
        return game.col_matrix.T
    raise ValueError(f"player must be 0 (row) or 1 (column), got {player!r}")


def best_responses(game: BimatrixGame, player: int, opponent_mix, tol: float = TIE_TOL) -> tuple:
    """Indices of ``player``'s strategies maximizing expected payoff, ties included."""
    m = _player_matrix(game, player)
    y = np.asarray(opponent_mix, dtype=float)
    if y.shape != (m.shape[1],):
        raise ValueError(f"opponent mix has {y.shape} entries, expected {m.shape[1]}")
    if np.any(y < -1e-12) or abs(y.sum() - 1.0) >= 1e-12:
        raise ValueError(f"opponent mix is not a probability vector: {y}")
    values = m @ y
    return tuple(int(k) for k in np.flatnonzero(values >= values.max() - tol))


def pure_nash(game: BimatrixGame, tol: float = TIE_TOL) -> list:
    """All pure-strategy equilibria, each labelled strict or weak.

    Strict means at least one unilateral deviation exists and every one of
    them lowers the deviator's payoff by more than ``tol``.
    """
    a, b = game.row_matrix, game.col_matrix
    found = []
    n, m = game.shape
    for i in range(n):
        for j in range(m):
            others_a = np.delete(a[:, j], i)
            others_b = np.delete(b[i, :], j)
            if np.any(others_a > a[i, j] + tol) or np.any(others_b > b[i, j] + tol):
                continue
            # A game with no deviations at all (1x1) gives only a weak equilibrium.
            strict = (others_a.size + others_b.size > 0
                      and np.all(others_a < a[i, j] - tol) and np.all(others_b < b[i, j] - tol))
            found.append(PureEquilibrium(i, j, PayoffPair(float(a[i, j]), float(b[i, j])),
                                         "strict" if strict else "weak"))
    return found


def mixed_2x2(game: BimatrixGame, tol: float = TIE_TOL) -> Equilibria:
    """Fully mixed equilibria of a 2x2 game from the indifference equations.

    Each player's mix makes the other indifferent between both strategies. When
    a player's payoff differences vanish identically the indifference holds for
    every opponent mix and the result is flagged as a degenerate family.
    """
    if game.shape != (2, 2):
        raise ValueError(f"mixed_2x2 needs a 2x2 game, got {game.shape}")
    a, b = game.row_matrix, game.col_matrix

    # Row is indifferent when y*(a00 - a10) + (1-y)*(a01 - a11) = 0.
    da0, da1 = a[0, 0] - a[1, 0], a[0, 1] - a[1, 1]
    db0, db1 = b[0, 0] - b[0, 1], b[1, 0] - b[1, 1]

    def solve(d0, d1):
        if abs(d0 - d1) <= tol:
            return "any" if abs(d0) <= tol else None
        return d1 / (d1 - d0)

    y = solve(da0, da1)
    x = solve(db0, db1)
    if y is None or x is None:
        dom = dominance(game)
        note = "; ".join(d.describe(game) for d in dom if d.kind == "strict") or "no interior solution"
        return Equilibria([], note=f"no interior mixed equilibrium ({note})")

    degenerate = y == "any" or x == "any"
    x = 0.5 if x == "any" else x
    y = 0.5 if y == "any" else y
    if not (tol < x < 1 - tol and tol < y < 1 - tol):
        dom = dominance(game)
        note = "; ".join(d.describe(game) for d in dom if d.kind == "strict") or "indifference point on the boundary"
        return Equilibria([], note=f"no interior mixed equilibrium ({note})")
    profile = MixedProfile(np.array([x, 1 - x]), np.array([y, 1 - y]))
    eq = MixedEquilibrium(profile, PayoffPair(*game.expected_payoffs(profile)), (0, 1), (0, 1), degenerate)
    return Equilibria([eq], note="degenerate family, representative shown" if degenerate else "")


def _solve_mix(
    payoff: np.ndarray, own: tuple, mixer: tuple, tol: float
) -> Optional[tuple]:
    """Mixer's distribution on ``mixer`` making every ``own`` strategy a best response.

    ``payoff`` has rows = indifferent player's strategies, columns = mixer's.
    Returns ``(mix, value, unique)`` or None when infeasible. When the
    indifference system has a unique solution it is solved directly; otherwise
    the feasible set is a family and the LP picks its most interior point.
    """
    n, m = payoff.shape
    k = len(mixer)
    sub = payoff[np.ix_(own, mixer)]
    # Unknowns (y_mixer, v): sub @ y - v = 0, sum(y) = 1.
    eq_lhs = np.vstack([np.hstack([sub, -np.ones((len(own), 1))]),
                        np.hstack([np.ones((1, k)), np.zeros((1, 1))])])
    eq_rhs = np.zeros(len(own) + 1)
    eq_rhs[-1] = 1.0
    rank = np.linalg.matrix_rank(eq_lhs, tol=1e-10)
    unique = rank == k + 1

    if unique:
        sol, *_ = np.linalg.lstsq(eq_lhs, eq_rhs, rcond=None)
        if np.max(np.abs(eq_lhs @ sol - eq_rhs)) > tol:
            return None
        y_sub, v = sol[:k], float(sol[k])
        if np.any(y_sub <= tol):
            return None
    else:
        # Maximize t subject to y_j >= t on the mixer's support.
        c = np.zeros(k + 2)
        c[-1] = -1.0
        a_eq = np.hstack([eq_lhs, np.zeros((len(own) + 1, 1))])
        off = [r for r in range(n) if r not in own]
        a_ub = [np.concatenate([payoff[r, list(mixer)], [-1.0, 0.0]]) for r in off]
        a_ub += [np.concatenate([-np.eye(k)[j], [0.0, 1.0]]) for j in range(k)]
        res = linprog(c, A_ub=np.array(a_ub), b_ub=np.zeros(len(a_ub)), A_eq=a_eq, b_eq=eq_rhs,
                      bounds=[(0, 1)] * k + [(None, None), (0, 1)], method="highs")
        if res.status != 0 or -res.fun <= tol:
            return None
        y_sub, v = res.x[:k], float(res.x[k])
        y_sub = np.clip(y_sub, 0.0, None)
        y_sub = y_sub / y_sub.sum()

    y = np.zeros(m)
    y[list(mixer)] = y_sub
    values = payoff @ y
    if np.any(values > v + tol):
        return None
    return y, v, unique


def support_enumeration(game: BimatrixGame, max_support: Optional[int] = None,
                        tol: float = TIE_TOL) -> Equilibria:
    """All equilibria whose supports have at most ``max_support`` strategies each.

    Every pair of supports (I, J) is tried, including unequal sizes so that
    degenerate games are covered. An equilibrium is flagged degenerate when its
    indifference system has a continuum of solutions or when some strategy mix
    has more pure best responses than its support size; families are
    represented by their most interior point.
    """
    n, m = game.shape
    if max(n, m) > MAX_SUPPORT_DIM:
        raise ValueError(f"support enumeration is limited to {MAX_SUPPORT_DIM} strategies per player")
    limit = min(n, m) if max_support is None else max_support
    if not 1 <= limit <= min(n, m):
        raise ValueError(f"max_support must be in [1, {min(n, m)}], got {max_support}")

    a, bt = game.row_matrix, game.col_matrix.T
    found = Equilibria()
    for ki, kj in itertools.product(range(1, limit + 1), repeat=2):
        for rows in itertools.combinations(range(n), ki):
            for cols in itertools.combinations(range(m), kj):
                col_side = _solve_mix(a, rows, cols, tol)
                if col_side is None:
                    continue
                row_side = _solve_mix(bt, cols, rows, tol)
                if row_side is None:
                    continue
                y, _, uy = col_side
                x, _, ux = row_side
                profile = MixedProfile(x, y)
                n_br_row = len(best_responses(game, ROW, y, tol))
                n_br_col = len(best_responses(game, COL, x, tol))
                degenerate = not (ux and uy) or n_br_row > kj or n_br_col > ki
                if any(e.profile.close_to(profile, tol) for e in found):
                    continue
                found.append(MixedEquilibrium(profile, PayoffPair(*game.expected_payoffs(profile)),
                                              rows, cols, degenerate))
    if any(e.degenerate for e in found):
        found.note = "degenerate game: flagged entries stand for equilibrium families"
    logger.debug("support enumeration found %d equilibria", len(found))
    return found


def is_equilibrium(game: BimatrixGame, profile: MixedProfile, tol: float = TIE_TOL) -> bool:
    """Mutual best-response check used to validate solver output."""
    u_row = game.row_matrix @ profile.col
    u_col = profile.row @ game.col_matrix
    v_row, v_col = profile.row @ u_row, u_col @ profile.col
    return bool(np.all(u_row <= v_row + tol) and np.all(u_col <= v_col + tol))


class Domination(NamedTuple):
    player: int
    dominated: int
    dominator: int
    kind: str  # "strict": worse against every opponent strategy; "weak": never better

    def describe(self, game: BimatrixGame) -> str:
        labels = game.row_labels if self.player == ROW else game.col_labels
        who = "row" if self.player == ROW else "column"
        return f"{who} {labels[self.dominated]} {self.kind}ly dominated by {labels[self.dominator]}"


def dominance(game: BimatrixGame, tol: float = TIE_TOL) -> list:
    """Pure-strategy dominations for both players.

    ``strict``: the dominator pays more against every opponent strategy.
    ``weak``: it pays at least as much everywhere without being strict, so
    two strategies with identical payoffs weakly dominate each other.
    """
    out = []
    for player in (ROW, COL):
        m = _player_matrix(game, player)
        for s, t in itertools.permutations(range(m.shape[0]), 2):
            diff = m[t] - m[s]
            if np.all(diff > tol):
                out.append(Domination(player, s, t, "strict"))
            elif np.all(diff >= -tol):
                out.append(Domination(player, s, t, "weak"))
    return out


def strategy_labels(game: BimatrixGame, eq) -> tuple:
    """Human-readable labels of a pure equilibrium cell."""
    return game.row_labels[eq.row], game.col_labels[eq.col]


def summarize(game: BimatrixGame, max_support: Optional[int] = None) -> dict:
    """Pure, mixed and dominance results as plain data."""
    pure = pure_nash(game)
    mixed = support_enumeration(game, max_support) if max(game.shape) <= MAX_SUPPORT_DIM else None
    out = {
        "pure": [
            {"row": game.row_labels[e.row], "col": game.col_labels[e.col],
             "payoffs": list(e.payoffs), "kind": e.kind}
            for e in pure
        ],
        "dominance": [
            {"player": "row" if d.player == ROW else "col",
             "dominated": (game.row_labels if d.player == ROW else game.col_labels)[d.dominated],
             "dominator": (game.row_labels if d.player == ROW else game.col_labels)[d.dominator],
             "kind": d.kind}
            for d in dominance(game)
        ],
    }
    if mixed is not None:
        out["mixed"] = [
            {"row": [float(v) for v in e.profile.row], "col": [float(v) for v in e.profile.col],
             "payoffs": list(e.payoffs),
             "row_support": [game.row_labels[k] for k in e.row_support],
             "col_support": [game.col_labels[k] for k in e.col_support],
             "degenerate": e.degenerate}
            for e in mixed
        ]
        out["mixed_note"] = mixed.note
    return out

