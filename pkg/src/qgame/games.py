"""Classical game objects: PD payoff parameters, per-outcome payoff weights,
finite bimatrix games and mixed profiles."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence, Union

import numpy as np

PROB_TOL = 1e-12


@dataclass(frozen=True)
class PayoffParams:
    """Prisoners' Dilemma payoffs: reward ``a``, temptation ``b``, punishment ``c``.

    The sucker's payoff is fixed at 0, and ``b > a > c > 0`` is enforced.
    """

    a: float = 3.0
    b: float = 5.0
    c: float = 1.0

    def __post_init__(self):
        for v in (self.a, self.b, self.c):
            if not math.isfinite(v):
                raise ValueError(f"payoff parameters must be finite, got {self}")
        if not (self.b > self.a > self.c > 0):
            raise ValueError(
                f"payoff parameters must satisfy b > a > c > 0, got a={self.a}, b={self.b}, c={self.c}"
            )


@dataclass(frozen=True)
class PayoffWeights:
    """Payoff to each player for outcomes 00, 01, 10, 11 (Alice's bit first)."""

    alice: tuple
    bob: tuple

    def __post_init__(self):
        for who in ("alice", "bob"):
            w = tuple(float(x) for x in getattr(self, who))
            if len(w) != 4:
                raise ValueError(f"{who} weights need 4 entries, got {len(w)}")
            if not all(math.isfinite(x) for x in w):
                raise ValueError(f"{who} weights must be finite: {w}")
            object.__setattr__(self, who, w)

    @classmethod
    def parse(cls, text: str) -> "PayoffWeights":
        """Parse ``wA00,wA01,wA10,wA11,wB00,wB01,wB10,wB11``."""
        try:
            vals = [float(x) for x in text.split(",")]
        except ValueError as exc:
            raise ValueError(f"weights must be 8 comma-separated numbers: {text!r}") from exc
        if len(vals) != 8:
            raise ValueError(f"weights must be 8 comma-separated numbers, got {len(vals)}")
        return cls(tuple(vals[:4]), tuple(vals[4:]))


def pd_weights(params: PayoffParams) -> PayoffWeights:
    a, b, c = params.a, params.b, params.c
    return PayoffWeights((a, 0.0, b, c), (a, b, 0.0, c))


@dataclass(frozen=True)
class BimatrixGame:
    row_labels: tuple
    col_labels: tuple
    payoffs: np.ndarray  # shape (n, m, 2): [..., 0] row player, [..., 1] column player

    def __post_init__(self):
        rows = tuple(str(x) for x in self.row_labels)
        cols = tuple(str(x) for x in self.col_labels)
        pay = np.array(self.payoffs, dtype=float)
        if pay.ndim != 3 or pay.shape[2] != 2:
            raise ValueError(f"payoffs must be an n x m grid of pairs, got shape {pay.shape}")
        if pay.shape[:2] != (len(rows), len(cols)):
            raise ValueError(
                f"grid is {pay.shape[0]}x{pay.shape[1]} but there are "
                f"{len(rows)} row and {len(cols)} column labels"
            )
        if pay.shape[0] == 0 or pay.shape[1] == 0:
            raise ValueError("game needs at least one strategy per player")
        if not np.all(np.isfinite(pay)):
            raise ValueError("payoffs must be finite")
        pay.setflags(write=False)
        object.__setattr__(self, "row_labels", rows)
        object.__setattr__(self, "col_labels", cols)
        object.__setattr__(self, "payoffs", pay)

    def __eq__(self, other):
        if not isinstance(other, BimatrixGame):
            return NotImplemented
        return (self.row_labels == other.row_labels and self.col_labels == other.col_labels
                and bool(np.array_equal(self.payoffs, other.payoffs)))

    def __hash__(self):
        return hash((self.row_labels, self.col_labels, self.payoffs.tobytes()))

    @property
    def shape(self) -> tuple:
        return self.payoffs.shape[:2]

    @property
    def row_matrix(self) -> np.ndarray:
        return self.payoffs[:, :, 0]

    @property
    def col_matrix(self) -> np.ndarray:
        return self.payoffs[:, :, 1]

    def cell(self, i, j) -> tuple:
        i = self.row_index(i) if isinstance(i, str) else i
        j = self.col_index(j) if isinstance(j, str) else j
        return float(self.payoffs[i, j, 0]), float(self.payoffs[i, j, 1])

    def row_index(self, label: str) -> int:
        return self.row_labels.index(label)

    def col_index(self, label: str) -> int:
        return self.col_labels.index(label)

    def expected_payoffs(self, profile: "MixedProfile") -> tuple:
        x, y = profile.row, profile.col
        if len(x) != self.shape[0] or len(y) != self.shape[1]:
            raise ValueError("profile does not match game dimensions")
        return float(x @ self.row_matrix @ y), float(x @ self.col_matrix @ y)

    def permuted(self, row_perm: Sequence[int], col_perm: Sequence[int]) -> "BimatrixGame":
        """Game whose row ``k`` is this game's row ``row_perm[k]`` (same for columns)."""
        rp, cp = list(row_perm), list(col_perm)
        return BimatrixGame(
            [self.row_labels[k] for k in rp],
            [self.col_labels[k] for k in cp],
            self.payoffs[np.ix_(rp, cp)],
        )

    def transformed(self, player: int, scale: float, shift: float) -> "BimatrixGame":
        pay = np.array(self.payoffs)
        pay[:, :, player] = scale * pay[:, :, player] + shift
        return BimatrixGame(self.row_labels, self.col_labels, pay)

    def with_cell(self, i: int, j: int, pair) -> "BimatrixGame":
        pay = np.array(self.payoffs)
        pay[i, j] = pair
        return BimatrixGame(self.row_labels, self.col_labels, pay)

    def to_grid(self) -> list:
        return [[[float(v) for v in self.payoffs[i, j]] for j in range(self.shape[1])]
                for i in range(self.shape[0])]


def classical_game(weights: PayoffWeights) -> BimatrixGame:
    """2x2 game on measurement bits: cell (i, j) pays outcome ``2*i + j``."""
    grid = [[(weights.alice[2 * i + j], weights.bob[2 * i + j]) for j in range(2)] for i in range(2)]
    return BimatrixGame(("0", "1"), ("0", "1"), grid)


Labels = Union[None, Sequence[str], Mapping[str, Sequence[str]]]


def game_from_grid(labels: Labels, grid) -> BimatrixGame:
    """Build a validated game from a row-major grid of payoff pairs.

    ``labels`` is either ``{"row": [...], "col": [...]}``, a single list used
    for both players, or None for ``0..n-1`` / ``0..m-1``.
    """
    rows = list(grid)
    if not rows or not all(isinstance(r, (list, tuple)) for r in rows):
        raise ValueError("grid must be a non-empty list of rows")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ValueError(f"ragged grid: row lengths {[len(r) for r in rows]}")
    for r in rows:
        for pair in r:
            if not isinstance(pair, (list, tuple)) or len(pair) != 2:
                raise ValueError(f"each cell must be a payoff pair, got {pair!r}")
    try:
        pay = np.array(rows, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ValueError(f"non-numeric payoff in grid: {exc}") from exc

    if labels is None:
        row_labels = [str(k) for k in range(len(rows))]
        col_labels = [str(k) for k in range(width)]
    elif isinstance(labels, Mapping):
        row_labels, col_labels = list(labels["row"]), list(labels["col"])
    else:
        row_labels = col_labels = list(labels)
    return BimatrixGame(row_labels, col_labels, pay)


@dataclass(frozen=True, eq=False)
class MixedProfile:
    row: np.ndarray
    col: np.ndarray

    def __post_init__(self):
        for who in ("row", "col"):
            v = np.array(getattr(self, who), dtype=float)
            if v.ndim != 1 or len(v) == 0:
                raise ValueError(f"{who} probabilities must be a non-empty vector")
            if np.any(v < -PROB_TOL) or np.any(v > 1 + PROB_TOL) or not np.all(np.isfinite(v)):
                raise ValueError(f"{who} probabilities out of [0, 1]: {v}")
            if abs(v.sum() - 1.0) >= PROB_TOL:
                raise ValueError(f"{who} probabilities sum to {v.sum()!r}, not 1")
            v.setflags(write=False)
            object.__setattr__(self, who, v)

    @classmethod
    def pure(cls, n: int, m: int, i: int, j: int) -> "MixedProfile":
        return cls(np.eye(n)[i], np.eye(m)[j])

    def support(self, who: str, tol: float = 1e-9) -> tuple:
        return tuple(int(k) for k in np.flatnonzero(getattr(self, who) > tol))

    def close_to(self, other: "MixedProfile", tol: float = 1e-9) -> bool:
        return (self.row.shape == other.row.shape and self.col.shape == other.col.shape
                and np.max(np.abs(self.row - other.row)) <= tol
                and np.max(np.abs(self.col - other.col)) <= tol)

