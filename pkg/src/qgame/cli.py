"""qgame command line.

Usage:
    qgame reproduce [--out report.json] [--format table|json]
    qgame play --spec ewl --alice D --bob Q
    qgame play --spec shared --alice R --bob R --p 1 --q 0 --samples 100000 --seed 7
    qgame matrix --spec ewl --strategies C,D,Q --format json --out ewl.json
    qgame matrix --mode committed --p 0 --q 1
    qgame equilibria --game ewl.json
    qgame vbsweep --grid 11

Exit codes: 0 success, 1 a reproduced claim mismatched, 2 invalid input.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional

import numpy as np

from . import equilibrium as eqm
from . import report
from .games import BimatrixGame, PayoffParams, PayoffWeights, pd_weights
from .protocols import (
    AS_PUBLISHED,
    COMMITTED,
    DEFAULT_GRID,
    DEFAULT_SAMPLES,
    MixedLocalStrategy,
    ProtocolSpec,
    StrategyCatalog,
    bell_state,
    combined_table,
    ewl_state,
    induced_matrix,
    play,
    play_sampled,
    random_flip,
    vb_sweep,
)
from .quantum import I_Y, I_Z, IDENTITY, PAULI_X, PAULI_Y, PAULI_Z, TwoQubitState, disentangler
from .serialize import csv_rows, dumps, fmt_num, fmt_pair, game_csv, game_table, game_to_dict, load_game

EXIT_OK, EXIT_MISMATCH, EXIT_INVALID = 0, 1, 2

PURE = {
    "C": IDENTITY,
    "D": I_Y,
    "Q": I_Z,
    "I": IDENTITY,
    "X": PAULI_X,
    "Y": PAULI_Y,
    "Z": PAULI_Z,
    "iY": I_Y,
    "iZ": I_Z,
}


class UsageError(ValueError):
    pass


def parse_strategy(text: str, default_p: Optional[float] = None) -> MixedLocalStrategy:
    """``C``/``D``/``Q`` or a named operator, ``R:p`` for the random flip, or bare ``R``."""
    text = text.strip()
    if text in PURE:
        return MixedLocalStrategy.pure(PURE[text], text)
    if text == "R":
        if default_p is None:
            raise UsageError("strategy R needs a probability: use R:p or pass --p/--q")
        return random_flip(default_p, "R")
    if text.startswith("R:"):
        try:
            p = float(text[2:])
        except ValueError as exc:
            raise UsageError(f"bad probability in {text!r}") from exc
        return random_flip(p, text)
    raise UsageError(f"unknown strategy {text!r}; choose from {', '.join(PURE)}, R or R:p")


def parse_state(text: str) -> TwoQubitState:
    try:
        amps = [complex(x.strip().replace(" ", "")) for x in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"state must be 4 comma-separated complex numbers, got {text!r}") from exc
    if len(amps) != 4:
        raise UsageError(f"state must have 4 amplitudes, got {len(amps)}")
    return TwoQubitState(np.array(amps))


def build_params(args) -> PayoffParams:
    return PayoffParams(args.a, args.b, args.c)


def build_weights(args) -> PayoffWeights:
    if args.weights:
        return PayoffWeights.parse(args.weights)
    return pd_weights(build_params(args))


def build_spec(args) -> ProtocolSpec:
    weights = build_weights(args)
    if args.spec == "ewl":
        return ProtocolSpec(ewl_state(), disentangler(), weights)
    if args.spec == "shared":
        return ProtocolSpec(bell_state(), None, weights)
    if not args.state:
        raise UsageError("--spec custom needs --state")
    return ProtocolSpec(parse_state(args.state), disentangler() if args.disentangle else None, weights)


def build_game(args) -> BimatrixGame:
    if getattr(args, "game", None):
        return load_game(args.game)
    if args.mode == AS_PUBLISHED:
        return combined_table(AS_PUBLISHED, params=build_params(args))
    if args.mode == COMMITTED:
        if args.p is None or args.q is None:
            raise UsageError("--mode committed needs --p and --q")
        return combined_table(COMMITTED, (args.p, args.q), params=build_params(args))
    labels = [s for s in args.strategies.split(",") if s.strip()]
    rows = StrategyCatalog((lab, parse_strategy(lab, args.p)) for lab in labels)
    cols = StrategyCatalog((lab, parse_strategy(lab, args.q)) for lab in labels)
    return induced_matrix(build_spec(args), rows, cols)


def emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_play(args) -> int:
    spec = build_spec(args)
    sa = parse_strategy(args.alice, args.p)
    sb = parse_strategy(args.bob, args.q)
    result = play(spec, sa, sb)
    data = {"alice": args.alice, "bob": args.bob, "spec": args.spec, "payoffs": list(result)}
    if args.samples is not None or args.seed is not None:
        n = args.samples or DEFAULT_SAMPLES
        est = play_sampled(spec, sa, sb, n, args.seed)
        data["sampled"] = {"samples": n, "seed": args.seed, "payoffs": list(est)}
    fmt = args.format or "table"
    if fmt == "json":
        emit(dumps(data), args.out)
    elif fmt == "csv":
        rows = [("exact", result.alice, result.bob)]
        if "sampled" in data:
            rows.append(("sampled", *data["sampled"]["payoffs"]))
        emit(csv_rows(("kind", "alice", "bob"), rows), args.out)
    else:
        lines = [f"{args.alice} vs {args.bob} ({args.spec}): {fmt_pair(round(v, 12) + 0.0 for v in result)}"]
        if "sampled" in data:
            s = data["sampled"]
            lines.append(f"sampled ({s['samples']} shots, seed {s['seed']}): {fmt_pair(s['payoffs'])}")
        emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_matrix(args) -> int:
    game = build_game(args)
    fmt = args.format or "table"
    if fmt == "json":
        emit(dumps(game_to_dict(game)), args.out)
    elif fmt == "csv":
        emit(game_csv(game), args.out)
    else:
        emit(game_table(game) + "\n", args.out)
    return EXIT_OK


def _equilibria_text(game: BimatrixGame, summary: dict) -> str:
    lines = [game_table(game), "", "pure equilibria:"]
    for e in summary["pure"] or []:
        lines.append(f"  {e['row']}\\{e['col']}  {fmt_pair(round(v, 12) + 0.0 for v in e['payoffs'])}  {e['kind']}")
    if not summary["pure"]:
        lines.append("  none")
    if "mixed" in summary:
        lines.append("mixed equilibria (support enumeration):")
        for e in summary["mixed"]:
            flag = "  [degenerate family]" if e["degenerate"] else ""
            row = ",".join(fmt_num(round(v, 9) + 0.0) for v in e["row"])
            col = ",".join(fmt_num(round(v, 9) + 0.0) for v in e["col"])
            lines.append(f"  row=({row}) col=({col})  "
                         f"{fmt_pair(round(v, 9) + 0.0 for v in e['payoffs'])}{flag}")
        if summary.get("mixed_note"):
            lines.append(f"  note: {summary['mixed_note']}")
    lines.append("dominated strategies:")
    for d in summary["dominance"]:
        lines.append(f"  {d['player']} {d['dominated']} {d['kind']}ly dominated by {d['dominator']}")
    if not summary["dominance"]:
        lines.append("  none")
    return "\n".join(lines) + "\n"


def cmd_equilibria(args) -> int:
    game = build_game(args)
    summary = eqm.summarize(game, args.max_support)
    fmt = args.format or "table"
    if fmt == "json":
        emit(dumps({"game": game_to_dict(game), "equilibria": summary}), args.out)
    elif fmt == "csv":
        rows = [(e["row"], e["col"], *e["payoffs"], e["kind"]) for e in summary["pure"]]
        emit(csv_rows(("row", "col", "alice", "bob", "kind"), rows), args.out)
    else:
        emit(_equilibria_text(game, summary), args.out)
    return EXIT_OK


def cmd_vbsweep(args) -> int:
    params = build_params(args)
    points = list(vb_sweep(args.grid, params))
    fmt = args.format or "csv"
    if fmt == "json":
        emit(dumps({"grid": args.grid, "points": [[p, q, v.alice] for p, q, v in points]}), args.out)
    elif fmt == "csv":
        emit(csv_rows(("p", "q", "payoff"), [(p, q, v.alice) for p, q, v in points]), args.out)
    else:
        best = max(v.alice for _, _, v in points)
        at = [f"({fmt_num(p)},{fmt_num(q)})" for p, q, v in points if v.alice >= best - 1e-12]
        emit(f"{len(points)} grid points; maximum {fmt_num(best)} at {' '.join(at)}\n", args.out)
    return EXIT_OK


def cmd_reproduce(args) -> int:
    tol = report.report_tolerance()
    params = build_params(args)
    claims, artifacts = report.run_claims(params, args.grid, tol)
    data = report.bundle(claims, artifacts, params, tol)
    if args.out:
        Path(args.out).write_text(dumps(data))
    if (args.format or "table") == "json":
        sys.stdout.write(dumps(data))
    else:
        sys.stdout.write(report.render(claims, artifacts))
    return report.exit_code(claims)


def _probability(text: str) -> float:
    try:
        v = float(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from exc
    if not 0.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError(f"probability must lie in [0, 1], got {v}")
    return v


def _grid(text: str) -> int:
    try:
        v = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from exc
    if v < 2:
        raise argparse.ArgumentTypeError("grid needs at least 2 points")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--a", type=float, default=3.0, help="reward for mutual cooperation")
    common.add_argument("--b", type=float, default=5.0, help="temptation payoff")
    common.add_argument("--c", type=float, default=1.0, help="punishment for mutual defection")
    common.add_argument("--weights", help="explicit outcome payoffs wA00,wA01,wA10,wA11,wB00,wB01,wB10,wB11")
    common.add_argument("--spec", choices=("ewl", "shared", "custom"), default="ewl")
    common.add_argument("--state", help="custom initial state: 4 complex amplitudes, e.g. '0.5,0.5,0.5,0.5j'")
    common.add_argument("--disentangle", action="store_true", help="custom spec: apply exp(-i pi YY/4)")
    common.add_argument("--p", type=_probability, help="Alice's identity probability for R")
    common.add_argument("--q", type=_probability, help="Bob's identity probability for R")
    common.add_argument("--format", choices=("table", "json", "csv"))
    common.add_argument("--out", help="write output to PATH instead of stdout")

    parser = argparse.ArgumentParser(prog="qgame", description="Two-qubit quantum games and their classical reductions.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("play", parents=[common], help="expected payoffs for one strategy pair")
    p.add_argument("--alice", default="C")
    p.add_argument("--bob", default="C")
    p.add_argument("--samples", type=int, help="also estimate by sampling (demonstration only)")
    p.add_argument("--seed", type=int, help="RNG seed for sampled mode")
    p.set_defaults(func=cmd_play)

    for name, func, hlp in (("matrix", cmd_matrix, "induced or combined payoff matrix"),
                            ("equilibria", cmd_equilibria, "pure/mixed equilibria and dominance")):
        m = sub.add_parser(name, parents=[common], help=hlp)
        m.add_argument("--strategies", default="C,D,Q", help="comma-separated catalog, e.g. C,D,Q,R:0.5")
        m.add_argument("--mode", choices=(AS_PUBLISHED, COMMITTED),
                       help="build the combined 4x4 table over C, D, Q, R instead")
        if name == "equilibria":
            m.add_argument("--game", help="game JSON file to analyse")
            m.add_argument("--max-support", type=int, default=None)
        m.set_defaults(func=func)

    v = sub.add_parser("vbsweep", parents=[common], help="random-strategy payoff over a (p, q) grid")
    v.add_argument("--grid", type=_grid, default=DEFAULT_GRID)
    v.set_defaults(func=cmd_vbsweep)

    r = sub.add_parser("reproduce", parents=[common], help="recompute and audit every published value")
    r.add_argument("--grid", type=_grid, default=DEFAULT_GRID)
    r.set_defaults(func=cmd_reproduce)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "samples", None) is not None and args.samples <= 0:
            raise UsageError("--samples must be positive")
        return args.func(args)
    except (ValueError, KeyError, OSError) as exc:
        print(f"qgame: error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
