"""Exit criteria. One test per criterion; conftest prints a PASS/FAIL line for each."""

import itertools

import numpy as np
import pytest

from qgame import report
from qgame.equilibrium import pure_nash, support_enumeration
from qgame.games import MixedProfile, PayoffParams, PayoffWeights, classical_game, pd_weights
from qgame.protocols import (
    MixedLocalStrategy,
    ProtocolSpec,
    classical_replication_check,
    combined_table,
    committed_catalogs,
    ewl_catalog,
    ewl_spec,
    induced_matrix,
    play,
    random_flip,
    shared_state_spec,
    vb_maximize,
)
from qgame.quantum import JointUnitary, LocalUnitary, TwoQubitState, apply, outcome_distribution, tensor

from conftest import random_game, random_state_vector, random_unitary

PUBLISHED_TOL = 1e-9
IDENTITY_TOL = 1e-12
RANDOM_INSTANCES = 1000

LABELS = ["C", "D", "Q", "R"]

# Values as printed, kept separate from the copies inside qgame.report.
PRINTED_COMBINED = [
    [(3, 3), (0, 5), (1, 1), (2.5, 2.5)],
    [(5, 0), (1, 1), (0, 5), (2.5, 2.5)],
    [(1, 1), (5, 0), (3, 3), (2.5, 2.5)],
    [(2.5, 2.5), (2.5, 2.5), (2.5, 2.5), (2.5, 2.5)],
]
SUBMATRIX = [
    [(2, 2), (2.5, 2.5), (2.5, 2.5)],
    [(2.5, 2.5), (2, 2), (2.5, 2.5)],
    [(2.5, 2.5), (2.5, 2.5), (2, 2)],
]


def scan_pure(game, tol=PUBLISHED_TOL):
    n, m = game.shape
    out = {}
    for i, j in itertools.product(range(n), range(m)):
        devs = [game.payoffs[k, j, 0] - game.payoffs[i, j, 0] for k in range(n) if k != i]
        devs += [game.payoffs[i, k, 1] - game.payoffs[i, j, 1] for k in range(m) if k != j]
        if all(d <= tol for d in devs):
            out[(game.row_labels[i], game.col_labels[j])] = "strict" if devs and all(d < -tol for d in devs) else "weak"
    return out


def labelled(game, eqs):
    return {(game.row_labels[e.row], game.col_labels[e.col]): e.kind for e in eqs}


def test_criterion_1_ewl_matrix():
    a, b, c = 3.0, 5.0, 1.0
    pattern = [[(a, a), (0, b), (c, c)], [(b, 0), (c, c), (0, b)], [(c, c), (b, 0), (a, a)]]
    g = induced_matrix(ewl_spec(PayoffParams(a, b, c)), ewl_catalog())
    assert g.row_labels == g.col_labels == ("C", "D", "Q")
    for i, j in itertools.product(range(3), range(3)):
        assert g.cell(i, j) == pytest.approx(pattern[i][j], abs=PUBLISHED_TOL)
        assert g.cell(i, j) == pytest.approx(PRINTED_COMBINED[i][j], abs=PUBLISHED_TOL)


def test_criterion_2_closed_form_identity():
    spec = shared_state_spec()
    axis = np.arange(101) / 100
    checked = 0
    for p in axis:
        rp = random_flip(float(p))
        for q in axis:
            sim = play(spec, rp, random_flip(float(q)))
            ref = 0.5 * (4 - 2 * p * q + p + q)
            assert abs(sim.alice - ref) < IDENTITY_TOL
            assert abs(sim.bob - ref) < IDENTITY_TOL
            assert abs(sim.alice - sim.bob) < IDENTITY_TOL
            checked += 1
    assert checked == 10_201


def test_criterion_3_maximum():
    best, where = report.grid_maximizers(101)
    assert best == pytest.approx(2.5, abs=IDENTITY_TOL)
    assert sorted(where) == [(0.0, 1.0), (1.0, 0.0)]
    assert [(p, q) for p, q, _ in vb_maximize()] == [(1.0, 0.0), (0.0, 1.0)]
    both_identity = play(shared_state_spec(), random_flip(1.0), random_flip(1.0))
    assert both_identity == pytest.approx((2, 2), abs=PUBLISHED_TOL)


def test_criterion_4_combined_table():
    g = combined_table("as-published")
    assert list(g.row_labels) == list(g.col_labels) == LABELS
    for i, j in itertools.product(range(4), range(4)):
        assert g.cell(i, j) == pytest.approx(PRINTED_COMBINED[i][j], abs=PUBLISHED_TOL)


def test_criterion_5_submatrix_audit():
    g = induced_matrix(shared_state_spec(), ewl_catalog())
    agreeing = ["CC", "DD", "QQ", "CD", "DC", "DQ", "QD"]
    idx = {"C": 0, "D": 1, "Q": 2}
    for r, c in agreeing:
        assert g.cell(r, c) == pytest.approx(SUBMATRIX[idx[r]][idx[c]], abs=PUBLISHED_TOL)

    claims, _ = report.run_claims(grid=11, tol=PUBLISHED_TOL)
    by_id = {cl.claim_id: cl for cl in claims}
    for r, c in agreeing:
        assert by_id[f"submatrix[{r}\\{c}]"].verdict == report.MATCH
    for r, c in ("CQ", "QC"):
        cl = by_id[f"submatrix[{r}\\{c}]"]
        assert cl.verdict == report.FLAGGED
        assert cl.expected == [2.5, 2.5]
        assert cl.computed == pytest.approx(list(g.cell(r, c)), abs=0)
        assert cl.computed == pytest.approx([2, 2], abs=PUBLISHED_TOL)
        assert "diagonal" in cl.note
    assert report.exit_code(claims) == 0


def test_criterion_6_commitment():
    g = combined_table("committed", (0.0, 1.0))
    assert g.cell("C", "R") == pytest.approx((2, 2), abs=PUBLISHED_TOL)
    assert g.cell("R", "R") == pytest.approx((2.5, 2.5), abs=PUBLISHED_TOL)


def test_criterion_7_equilibrium_structure():
    pd = classical_game(pd_weights(PayoffParams(3, 5, 1)))
    assert labelled(pd, pure_nash(pd)) == {("1", "1"): "strict"} == scan_pure(pd)

    ewl = induced_matrix(ewl_spec(), ewl_catalog())
    eqs = pure_nash(ewl)
    assert labelled(ewl, eqs) == {("Q", "Q"): "strict"} == scan_pure(ewl)
    assert eqs[0].payoffs == pytest.approx((3, 3), abs=PUBLISHED_TOL)

    t1 = combined_table("as-published")
    assert labelled(t1, pure_nash(t1)) == {("Q", "Q"): "strict", ("R", "R"): "weak"} == scan_pure(t1)


def test_criterion_8_replication():
    cat = ewl_catalog()
    cases = [
        (induced_matrix(ewl_spec(), cat), ewl_spec(), cat, None),
        (induced_matrix(ewl_spec(PayoffParams(2, 3, 1)), cat), ewl_spec(PayoffParams(2, 3, 1)), cat, None),
        (induced_matrix(shared_state_spec(), cat), shared_state_spec(), cat, None),
    ]
    for pq in [(0.0, 1.0), (1.0, 0.0), (0.5, 0.25)]:
        rows, cols = committed_catalogs(*pq)
        cases.append((combined_table("committed", pq), shared_state_spec(), rows, cols))
    for game, spec, rows, cols in cases:
        n, m = game.shape
        profiles = [MixedProfile(np.full(n, 1 / n), np.full(m, 1 / m)),
                    MixedProfile(np.eye(n)[0] * 0.5 + np.eye(n)[-1] * 0.5, np.eye(m)[-1])]
        rep = classical_replication_check(game, spec, rows, cols, profiles=profiles)
        assert rep.max_deviation < IDENTITY_TOL
        assert rep.profile_deviation < IDENTITY_TOL


def test_criterion_9_properties():
    rng = np.random.default_rng(9)
    for _ in range(RANDOM_INSTANCES):
        a, b = LocalUnitary(random_unitary(2, rng)), LocalUnitary(random_unitary(2, rng))
        u = JointUnitary(random_unitary(4, rng))
        for m in (a.m, b.m, u.m, tensor(a, b).m):
            assert np.max(np.abs(m.conj().T @ m - np.eye(len(m)))) < IDENTITY_TOL

        s = TwoQubitState(random_state_vector(rng))
        assert abs(apply(u, s).norm() - 1.0) < IDENTITY_TOL

        theta = rng.uniform(-np.pi, np.pi)
        diff = outcome_distribution(s.with_phase(theta)).p - outcome_distribution(s).p
        assert np.max(np.abs(diff)) < IDENTITY_TOL

        ops = [LocalUnitary(random_unitary(2, rng)) for _ in range(3)]
        w = rng.dirichlet(np.ones(3))
        spec = ProtocolSpec(TwoQubitState(random_state_vector(rng)), None,
                            PayoffWeights(tuple(rng.normal(size=4)), tuple(rng.normal(size=4))))
        opp = MixedLocalStrategy.pure(LocalUnitary(random_unitary(2, rng)))
        whole = np.array(play(spec, MixedLocalStrategy(tuple(zip(ops, w))), opp))
        parts = sum(wk * np.array(play(spec, MixedLocalStrategy.pure(op), opp)) for op, wk in zip(ops, w))
        assert np.max(np.abs(whole - parts)) < IDENTITY_TOL

        n, m = rng.integers(1, 5, size=2)
        g = random_game(rng, int(n), int(m), integer=True)
        rp, cp = rng.permutation(n), rng.permutation(m)
        h = g.permuted(rp, cp)
        mapped = {(int(rp[e.row]), int(cp[e.col])): (e.kind, e.payoffs) for e in pure_nash(h)}
        assert mapped == {(e.row, e.col): (e.kind, e.payoffs) for e in pure_nash(g)}

        player, scale, shift = int(rng.integers(0, 2)), rng.uniform(0.1, 10), rng.uniform(-10, 10)
        small = random_game(rng, 2, 2, integer=True)
        t = small.transformed(player, scale, shift)
        assert [(e.row, e.col, e.kind) for e in pure_nash(t)] == [(e.row, e.col, e.kind) for e in pure_nash(small)]
        sup = lambda eqs: sorted((e.row_support, e.col_support) for e in eqs)
        assert sup(support_enumeration(t)) == sup(support_enumeration(small))
