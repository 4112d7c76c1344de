import json
import subprocess
import sys

import numpy as np
import pytest

from qgame import report
from qgame.cli import main
from qgame.equilibrium import pure_nash, support_enumeration
from qgame.games import game_from_grid
from qgame.protocols import combined_table, ewl_catalog, ewl_spec, induced_matrix
from qgame.serialize import dumps, game_from_json, game_to_json


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_json_schema_shape():
    data = json.loads(game_to_json(induced_matrix(ewl_spec(), ewl_catalog())))
    assert set(data) == {"labels", "cells"}
    assert data["labels"] == {"row": ["C", "D", "Q"], "col": ["C", "D", "Q"]}
    assert len(data["cells"]) == 3 and all(len(r) == 3 for r in data["cells"])
    assert all(len(pair) == 2 for r in data["cells"] for pair in r)


def test_json_round_trip_is_bit_exact():
    g = induced_matrix(ewl_spec(), ewl_catalog())
    back = game_from_json(game_to_json(g))
    assert back == g
    assert np.array_equal(back.payoffs, g.payoffs)


def test_seventeen_digit_floats():
    assert dumps([0.1]).strip() == "[0.10000000000000001]"
    assert dumps({"x": 3.0}) == '{\n  "x": 3.0\n}\n'
    with pytest.raises(ValueError):
        dumps([float("nan")])


def test_game_from_json_rejects_garbage():
    with pytest.raises(ValueError):
        game_from_json("{not json")
    with pytest.raises(ValueError):
        game_from_json('{"labels": {"row": ["a"]}, "cells": [[[1, 2]]]}')
    with pytest.raises(ValueError):
        game_from_json('{"cells": [[[1, 2]], [[1, 2], [3, 4]]]}')


def test_play_ewl_d_vs_q(capsys):
    code, out, _ = run(capsys, "play", "--spec", "ewl", "--a", "3", "--b", "5", "--c", "1",
                       "--alice", "D", "--bob", "Q")
    assert code == 0
    assert out.strip() == "D vs Q (ewl): (0,5)"


def test_play_json_and_r_strategies(capsys):
    code, out, _ = run(capsys, "play", "--spec", "shared", "--alice", "R:1", "--bob", "R", "--q", "0",
                       "--format", "json")
    assert code == 0
    assert json.loads(out)["payoffs"] == pytest.approx([2.5, 2.5], abs=1e-12)


def test_play_sampled_is_reproducible(capsys):
    argv = ["play", "--spec", "shared", "--alice", "R:0.3", "--bob", "R:0.6",
            "--samples", "20000", "--seed", "11", "--format", "json"]
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second
    data = json.loads(first)
    assert data["sampled"]["payoffs"] == pytest.approx(data["payoffs"], abs=0.05)


def test_play_custom_spec(capsys):
    code, out, _ = run(capsys, "play", "--spec", "custom", "--state", "0.7071067811865476,0,0,-0.7071067811865476j",
                       "--disentangle", "--alice", "Q", "--bob", "Q", "--format", "csv")
    assert code == 0
    rows = out.strip().splitlines()
    assert rows[0] == "kind,alice,bob"
    assert [float(x) for x in rows[1].split(",")[1:]] == pytest.approx([3, 3], abs=1e-9)


def test_play_with_weights(capsys):
    code, out, _ = run(capsys, "play", "--weights", "1,2,3,4,4,3,2,1", "--spec", "shared",
                       "--alice", "C", "--bob", "C", "--format", "json")
    assert code == 0
    assert json.loads(out)["payoffs"] == pytest.approx([2.5, 2.5], abs=1e-12)


@pytest.mark.parametrize("argv", [
    ["play", "--alice", "Z9"],
    ["play", "--a", "1", "--b", "5", "--c", "3"],
    ["play", "--alice", "R"],
    ["play", "--spec", "custom"],
    ["play", "--spec", "custom", "--state", "1,1,0,0"],
    ["play", "--weights", "1,2"],
    ["play", "--samples", "0"],
    ["matrix", "--mode", "committed"],
    ["equilibria", "--game", "/nonexistent/game.json"],
])
def test_invalid_input_exits_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert "error" in err


@pytest.mark.parametrize("argv", [
    ["vbsweep", "--grid", "1"],
    ["play", "--p", "1.5"],
    ["play", "--spec", "quantum"],
    ["nonsense"],
])
def test_argparse_errors_exit_2(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2


def test_vbsweep_csv(capsys):
    code, out, _ = run(capsys, "vbsweep", "--grid", "11")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "p,q,payoff"
    assert len(lines[1:]) == 121
    assert "1,0,2.5" in lines
    assert "0.3,0.7,2.29" in lines


def test_vbsweep_table(capsys):
    _, out, _ = run(capsys, "vbsweep", "--grid", "5", "--format", "table")
    assert "maximum 2.5 at (0,1) (1,0)" in out


def test_matrix_table_layout(capsys):
    code, out, _ = run(capsys, "matrix")
    assert code == 0
    assert "(0,5)" in out and "(3,3)" in out and out.splitlines()[0].split() == ["Alice\\Bob", "C", "D", "Q"]


def test_matrix_committed_csv(capsys):
    code, out, _ = run(capsys, "matrix", "--mode", "committed", "--p", "0", "--q", "1", "--format", "csv")
    assert code == 0
    assert "C,R,2,2" in out.replace("1.9999999999999996", "2")


def test_matrix_round_trip_preserves_equilibria(tmp_path, capsys):
    path = tmp_path / "combined.json"
    assert main(["matrix", "--mode", "as-published", "--format", "json", "--out", str(path)]) == 0
    g = combined_table("as-published")
    back = game_from_json(path.read_text())
    assert back == g
    assert pure_nash(back) == pure_nash(g)
    a, b = support_enumeration(back), support_enumeration(g)
    assert [(e.row_support, e.col_support, e.degenerate) for e in a] == \
        [(e.row_support, e.col_support, e.degenerate) for e in b]
    code, out, _ = run(capsys, "equilibria", "--game", str(path), "--format", "json")
    assert code == 0
    pure = json.loads(out)["equilibria"]["pure"]
    assert [(e["row"], e["col"], e["kind"]) for e in pure] == [("Q", "Q", "strict"), ("R", "R", "weak")]


def test_equilibria_trivial_game(tmp_path, capsys):
    path = tmp_path / "g.json"
    path.write_text(game_to_json(game_from_grid(None, [[(0, 0)]])))
    code, out, _ = run(capsys, "equilibria", "--game", str(path), "--format", "csv")
    assert code == 0
    assert out.strip().splitlines() == ["row,col,alice,bob,kind", "0,0,0,0,weak"]


def test_equilibria_table_mentions_degenerate(capsys):
    code, out, _ = run(capsys, "equilibria", "--mode", "as-published")
    assert code == 0
    assert "R\\R  (2.5,2.5)  weak" in out
    assert "[degenerate family]" in out


def test_json_outputs_are_byte_identical(tmp_path):
    for argv in (["matrix", "--format", "json"], ["equilibria", "--mode", "as-published", "--format", "json"],
                 ["vbsweep", "--grid", "7"], ["reproduce", "--format", "json", "--grid", "11"]):
        outs = []
        for k in range(2):
            path = tmp_path / f"out{k}"
            main(argv + ["--out", str(path)])
            outs.append(path.read_bytes())
        assert outs[0] == outs[1], argv


def test_reproduce_default(capsys, tmp_path):
    path = tmp_path / "report.json"
    code, out, _ = run(capsys, "reproduce", "--out", str(path))
    assert code == 0
    assert "flagged-discrepancy" in out
    data = json.loads(path.read_text())
    claims = {c["id"]: c for c in data["claims"]}
    assert data["summary"] == {"match": len(claims) - 2, "mismatch": 0, "flagged-discrepancy": 2}
    assert data["games"]["ewl"]["cells"][1][2] == pytest.approx([0, 5], abs=1e-9)
    assert claims["rand.max"]["computed"] == pytest.approx(2.5, abs=1e-12)
    assert claims["rand.max.location"]["verdict"] == "match"
    for cid in ("submatrix[C\\Q]", "submatrix[Q\\C]"):
        assert claims[cid]["verdict"] == "flagged-discrepancy"
        assert claims[cid]["expected"] == [2.5, 2.5]
        assert claims[cid]["computed"] == pytest.approx([2, 2], abs=1e-12)
        assert "diagonal" in claims[cid]["note"]


def test_reproduce_mismatch_exits_1(capsys, monkeypatch):
    wrong = [row[:] for row in report.PRINTED_TABLE]
    wrong[0][0] = (3.5, 3)
    monkeypatch.setattr(report, "PRINTED_TABLE", wrong)
    code, out, _ = run(capsys, "reproduce", "--grid", "11")
    assert code == 1
    assert "mismatch" in out


def test_tolerance_env_override(capsys, monkeypatch):
    # A tolerance above the 0.5 gap turns the two flagged cells into matches.
    monkeypatch.setenv("QGAME_TOLERANCE", "0.6")
    code, out, _ = run(capsys, "reproduce", "--format", "json", "--grid", "11")
    assert code == 0
    data = json.loads(out)
    assert data["tolerance"] == 0.6
    assert data["summary"]["flagged-discrepancy"] == 0


def test_tolerance_env_invalid(capsys, monkeypatch):
    monkeypatch.setenv("QGAME_TOLERANCE", "tiny")
    code, _, err = run(capsys, "reproduce")
    assert code == 2 and "QGAME_TOLERANCE" in err


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "qgame", "play", "--alice", "Q", "--bob", "Q"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0
    assert res.stdout.strip() == "Q vs Q (ewl): (3,3)"
