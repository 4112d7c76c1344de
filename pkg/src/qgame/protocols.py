"""Playable two-qubit game protocols and their reduction to bimatrix games.

A protocol is an initial state, an optional joint gate applied by the
arbitrator before measurement, and per-outcome payoff weights. Players pick
strategies that are finite mixtures of local unitaries; expected payoffs are
computed exactly by enumerating the mixture supports.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple, Optional, Sequence

import numpy as np

from .games import BimatrixGame, MixedProfile, PayoffParams, PayoffWeights, pd_weights
from .quantum import (
    IDENTITY,
    I_Y,
    I_Z,
    PAULI_X,
    JointUnitary,
    LocalUnitary,
    TwoQubitState,
    apply,
    disentangler,
    outcome_distribution,
    tensor,
)

PROB_TOL = 1e-12
DEFAULT_GRID = 101
DEFAULT_SAMPLES = 10**6


class PayoffPair(NamedTuple):
    alice: float
    bob: float


@dataclass(frozen=True)
class MixedLocalStrategy:
    """A probability distribution over local unitaries."""

    components: tuple  # ((LocalUnitary, probability), ...)
    name: Optional[str] = None

    def __post_init__(self):
        comps = tuple((u, float(p)) for u, p in self.components)
        if not comps:
            raise ValueError("mixed strategy needs at least one component")
        for u, p in comps:
            if not isinstance(u, LocalUnitary):
                raise TypeError(f"expected LocalUnitary, got {type(u).__name__}")
            if not (-PROB_TOL <= p <= 1 + PROB_TOL):
                raise ValueError(f"probability {p} out of [0, 1]")
        total = sum(p for _, p in comps)
        if abs(total - 1.0) >= PROB_TOL:
            raise ValueError(f"probabilities sum to {total!r}, not 1")
        object.__setattr__(self, "components", comps)

    @classmethod
    def pure(cls, u: LocalUnitary, name: Optional[str] = None) -> "MixedLocalStrategy":
        return cls(((u, 1.0),), name or u.name)

    @property
    def is_pure(self) -> bool:
        return len(self.components) == 1

    def support(self) -> Iterator[tuple]:
        return ((u, p) for u, p in self.components if p > 0.0)

    def __repr__(self):
        if self.name:
            return f"MixedLocalStrategy({self.name})"
        return f"MixedLocalStrategy({[(u.name, p) for u, p in self.components]})"


def random_flip(p: float, name: Optional[str] = None) -> MixedLocalStrategy:
    """Identity with probability ``p``, bit flip X with probability ``1 - p``."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability must lie in [0, 1], got {p}")
    return MixedLocalStrategy(((IDENTITY, p), (PAULI_X, 1.0 - p)), name or f"R:{p:g}")


COOPERATE = MixedLocalStrategy.pure(IDENTITY, "C")
DEFECT = MixedLocalStrategy.pure(I_Y, "D")
QUANTUM = MixedLocalStrategy.pure(I_Z, "Q")


class StrategyCatalog:
    """Ordered, labelled collection of mixed local strategies."""

    def __init__(self, entries: Iterable[tuple]):
        self._entries = tuple((str(label), s) for label, s in entries)
        if not self._entries:
            raise ValueError("strategy catalog is empty")
        labels = self.labels
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate strategy labels: {labels}")
        for label, s in self._entries:
            if not isinstance(s, MixedLocalStrategy):
                raise TypeError(f"catalog entry {label!r} is not a MixedLocalStrategy")

    @property
    def labels(self) -> tuple:
        return tuple(label for label, _ in self._entries)

    def __getitem__(self, key) -> MixedLocalStrategy:
        if isinstance(key, int):
            return self._entries[key][1]
        for label, s in self._entries:
            if label == key:
                return s
        raise KeyError(key)

    def __iter__(self):
        return iter(self._entries)

    def __len__(self):
        return len(self._entries)

    def __add__(self, other: "StrategyCatalog") -> "StrategyCatalog":
        return StrategyCatalog(self._entries + tuple(other))

    def __repr__(self):
        return f"StrategyCatalog({list(self.labels)})"


def ewl_catalog() -> StrategyCatalog:
    return StrategyCatalog([("C", COOPERATE), ("D", DEFECT), ("Q", QUANTUM)])


@dataclass(frozen=True)
class ProtocolSpec:
    initial_state: TwoQubitState
    pre_measurement: Optional[JointUnitary]
    weights: PayoffWeights

    def with_phase(self, theta: float) -> "ProtocolSpec":
        return ProtocolSpec(self.initial_state.with_phase(theta), self.pre_measurement, self.weights)


def ewl_state() -> TwoQubitState:
    """(|00> - i|11>)/sqrt(2)."""
    return TwoQubitState(np.array([1, 0, 0, -1j]) / np.sqrt(2))


def bell_state() -> TwoQubitState:
    """(|00> + |11>)/sqrt(2), the shared resource of the random strategy."""
    return TwoQubitState(np.array([1, 0, 0, 1]) / np.sqrt(2))


def ewl_spec(params: PayoffParams = PayoffParams()) -> ProtocolSpec:
    return ProtocolSpec(ewl_state(), disentangler(), pd_weights(params))


def shared_state_spec(params: PayoffParams = PayoffParams()) -> ProtocolSpec:
    return ProtocolSpec(bell_state(), None, pd_weights(params))


def _pure_play(spec: ProtocolSpec, ua: LocalUnitary, ub: LocalUnitary) -> np.ndarray:
    state = apply(tensor(ua, ub), spec.initial_state)
    if spec.pre_measurement is not None:
        state = apply(spec.pre_measurement, state)
    dist = outcome_distribution(state)
    return np.array([dist.expectation(spec.weights.alice), dist.expectation(spec.weights.bob)])


def final_distribution(spec: ProtocolSpec, sa: MixedLocalStrategy, sb: MixedLocalStrategy) -> np.ndarray:
    """Outcome probabilities averaged over both players' mixtures."""
    total = np.zeros(4)
    for (ua, pa), (ub, pb) in itertools.product(sa.support(), sb.support()):
        state = apply(tensor(ua, ub), spec.initial_state)
        if spec.pre_measurement is not None:
            state = apply(spec.pre_measurement, state)
        total += pa * pb * outcome_distribution(state).p
    return total


def play(spec: ProtocolSpec, sa: MixedLocalStrategy, sb: MixedLocalStrategy) -> PayoffPair:
    """Exact expected payoffs when Alice plays ``sa`` and Bob plays ``sb``."""
    total = np.zeros(2)
    for (ua, pa), (ub, pb) in itertools.product(sa.support(), sb.support()):
        total += pa * pb * _pure_play(spec, ua, ub)
    return PayoffPair(float(total[0]), float(total[1]))


def play_sampled(
    spec: ProtocolSpec,
    sa: MixedLocalStrategy,
    sb: MixedLocalStrategy,
    samples: int = DEFAULT_SAMPLES,
    seed: Optional[int] = None,
) -> PayoffPair:
    """Monte Carlo estimate of ``play``: sample the mixtures, then the measurement.

    Demonstration only; every reported value elsewhere comes from ``play``.
    """
    if samples <= 0:
        raise ValueError("samples must be positive")
    rng = np.random.default_rng(seed)
    comps_a, comps_b = list(sa.support()), list(sb.support())
    ia = rng.choice(len(comps_a), size=samples, p=[p for _, p in comps_a])
    ib = rng.choice(len(comps_b), size=samples, p=[p for _, p in comps_b])
    wa, wb = np.array(spec.weights.alice), np.array(spec.weights.bob)
    sum_a = sum_b = 0.0
    for ka, kb in itertools.product(range(len(comps_a)), range(len(comps_b))):
        n = int(np.count_nonzero((ia == ka) & (ib == kb)))
        if n == 0:
            continue
        state = apply(tensor(comps_a[ka][0], comps_b[kb][0]), spec.initial_state)
        if spec.pre_measurement is not None:
            state = apply(spec.pre_measurement, state)
        counts = rng.multinomial(n, outcome_distribution(state).p)
        sum_a += float(counts @ wa)
        sum_b += float(counts @ wb)
    return PayoffPair(sum_a / samples, sum_b / samples)


def vb_payoff_closed_form(p: float, q: float, params: PayoffParams = PayoffParams()) -> PayoffPair:
    """Closed-form payoff of the random flip strategy on the shared Bell state.

    Matching flips leave the state in span{00, 11} and pay (a + c)/2; differing
    flips land in span{01, 10} and pay b/2. With (a, b, c) = (3, 5, 1) this is
    (4 - 2pq + p + q)/2 for both players.
    """
    for v in (p, q):
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"probabilities must lie in [0, 1], got p={p}, q={q}")
    same = p * q + (1 - p) * (1 - q)
    differ = p * (1 - q) + (1 - p) * q
    if params == PayoffParams():
        value = (4 - 2 * p * q + p + q) / 2
    else:
        value = same * (params.a + params.c) / 2 + differ * params.b / 2
    return PayoffPair(value, value)


def grid_axis(grid: int) -> np.ndarray:
    """``grid`` evenly spaced points on [0, 1], each the correctly rounded k/(grid-1)."""
    if grid < 2:
        raise ValueError("grid needs at least 2 points per axis")
    return np.arange(grid) / (grid - 1)


def vb_sweep(grid: int = DEFAULT_GRID, params: PayoffParams = PayoffParams()):
    """Yield ``(p, q, PayoffPair)`` over a ``grid x grid`` lattice on [0, 1]^2."""
    axis = grid_axis(grid)
    for p in axis:
        for q in axis:
            yield float(p), float(q), vb_payoff_closed_form(float(p), float(q), params)


def vb_maximize(
    grid: int = DEFAULT_GRID,
    params: PayoffParams = PayoffParams(),
    *,
    symmetric: bool = False,
    fix_q: Optional[float] = None,
    tol: float = 1e-12,
) -> list:
    """Maximizers of the random-strategy payoff as ``[(p, q, PayoffPair), ...]``.

    Unrestricted, the payoff is bilinear so its maximum sits on a vertex of the
    unit square; the vertices are returned after a grid sweep confirms that no
    grid point beats them. With ``symmetric`` (p = q) or ``fix_q`` the search is
    along a line and the grid sweep itself gives the answer.
    """
    if symmetric or fix_q is not None:
        axis = grid_axis(grid)
        if symmetric:
            line = [(float(p), float(p)) for p in axis]
        else:
            line = [(float(p), float(fix_q)) for p in axis]
        values = [(p, q, vb_payoff_closed_form(p, q, params)) for p, q in line]
        best = max(v.alice for _, _, v in values)
        return [(p, q, v) for p, q, v in values if v.alice >= best - tol]

    vertices = [(p, q, vb_payoff_closed_form(p, q, params)) for p in (0.0, 1.0) for q in (0.0, 1.0)]
    best = max(v.alice for _, _, v in vertices)
    winners = [(p, q, v) for p, q, v in vertices if v.alice >= best - tol]
    swept = max(v.alice for _, _, v in vb_sweep(grid, params))
    if swept > best + tol:
        raise RuntimeError(f"grid sweep found {swept} above the vertex maximum {best}")
    return sorted(winners, key=lambda t: (-t[0], t[1]))


def induced_matrix(
    spec: ProtocolSpec,
    catalog: StrategyCatalog,
    col_catalog: Optional[StrategyCatalog] = None,
) -> BimatrixGame:
    """Bimatrix game whose cell (i, j) is ``play(spec, catalog[i], col_catalog[j])``.

    ``col_catalog`` defaults to ``catalog``; pass a separate one when the
    players' strategy sets differ (e.g. each commits to its own R mixture).
    """
    cols = catalog if col_catalog is None else col_catalog
    grid = [[tuple(play(spec, sa, sb)) for _, sb in cols] for _, sa in catalog]
    return BimatrixGame(catalog.labels, cols.labels, grid)


AS_PUBLISHED = "as-published"
COMMITTED = "committed"


def combined_table(
    mode: str = AS_PUBLISHED,
    r_params: Optional[tuple] = None,
    params: PayoffParams = PayoffParams(),
) -> BimatrixGame:
    """The 4x4 game over C, D, Q and the random strategy R.

    ``as-published`` borders the EWL 3x3 block with an R row and column that
    always pay the unrestricted random-strategy maximum, as if R were
    re-optimized against every opponent. ``committed`` plays all four
    strategies on the shared Bell state with no disentangler, with Alice's R
    fixed to flip probability ``1 - p`` and Bob's to ``1 - q``.
    """
    if mode == AS_PUBLISHED:
        block = induced_matrix(ewl_spec(params), ewl_catalog()).payoffs
        border = vb_maximize(params=params)[0][2]
        pay = np.empty((4, 4, 2))
        pay[:3, :3] = block
        pay[3, :] = tuple(border)
        pay[:, 3] = tuple(border)
        labels = ("C", "D", "Q", "R")
        return BimatrixGame(labels, labels, pay)
    if mode == COMMITTED:
        if r_params is None:
            raise ValueError("committed mode needs r_params=(p, q)")
        p, q = r_params
        rows, cols = committed_catalogs(p, q)
        return induced_matrix(shared_state_spec(params), rows, cols)
    raise ValueError(f"unknown mode {mode!r}; expected {AS_PUBLISHED!r} or {COMMITTED!r}")


def committed_catalogs(p: float, q: float) -> tuple:
    base = ewl_catalog()
    rows = base + StrategyCatalog([("R", random_flip(p, "R"))])
    cols = base + StrategyCatalog([("R", random_flip(q, "R"))])
    return rows, cols


@dataclass(frozen=True)
class ReplicationReport:
    """Outcome of replaying a quantum protocol as an ordinary bimatrix game."""

    max_deviation: float
    cell_deviations: np.ndarray  # (n, m) max over both players
    profile_deviation: float  # worst gap over the mixed profiles checked
    tolerance: float

    @property
    def replicated(self) -> bool:
        return max(self.max_deviation, self.profile_deviation) < self.tolerance

    def worst_cell(self) -> tuple:
        i, j = np.unravel_index(int(np.argmax(self.cell_deviations)), self.cell_deviations.shape)
        return int(i), int(j)

    def as_dict(self) -> dict:
        return {
            "max_deviation": float(max(self.max_deviation, self.profile_deviation)),
            "cell_max_deviation": float(self.max_deviation),
            "profile_max_deviation": float(self.profile_deviation),
            "worst_cell": list(self.worst_cell()),
            "tolerance": self.tolerance,
            "replicated": self.replicated,
        }


def _mix_catalog(catalog: StrategyCatalog, probs: Sequence[float]) -> MixedLocalStrategy:
    comps = []
    for (_, s), w in zip(catalog, probs):
        comps.extend((u, w * p) for u, p in s.components)
    # Merge rounding drift so the mixture sums to exactly 1.
    total = sum(p for _, p in comps)
    return MixedLocalStrategy(tuple((u, p / total) for u, p in comps))


def classical_replication_check(
    game: BimatrixGame,
    spec: ProtocolSpec,
    catalog: StrategyCatalog,
    col_catalog: Optional[StrategyCatalog] = None,
    profiles: Optional[Sequence[MixedProfile]] = None,
    tolerance: float = 1e-9,
) -> ReplicationReport:
    """Check that ``game`` reproduces every quantum expected payoff.

    Each cell is compared against a fresh quantum play. Mixed profiles over the
    catalogs (uniform by default) are also compared: the classical expectation
    under the profile against quantum play of the corresponding mixture.
    """
    cols = catalog if col_catalog is None else col_catalog
    n, m = len(catalog), len(cols)
    if game.shape != (n, m):
        raise ValueError(f"game is {game.shape} but catalogs give {(n, m)}")
    dev = np.zeros((n, m))
    for i, (_, sa) in enumerate(catalog):
        for j, (_, sb) in enumerate(cols):
            quantum = np.array(play(spec, sa, sb))
            dev[i, j] = float(np.max(np.abs(quantum - game.payoffs[i, j])))

    if profiles is None:
        profiles = [MixedProfile(np.full(n, 1 / n), np.full(m, 1 / m))]
    prof_dev = 0.0
    for prof in profiles:
        classical = np.array(game.expected_payoffs(prof))
        quantum = np.array(play(spec, _mix_catalog(catalog, prof.row), _mix_catalog(cols, prof.col)))
        prof_dev = max(prof_dev, float(np.max(np.abs(classical - quantum))))
    return ReplicationReport(float(dev.max()), dev, prof_dev, tolerance)
