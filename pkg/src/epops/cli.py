"""Command-line drivers that emit tradeoff curves as CSV data files.

Every data subcommand writes the file named by ``--out`` plus a sibling
``<base>.manifest.json`` recording the command, its parameters, the
tolerances in force, and the library version, so a curve on disk can
always be traced back to the exact invocation that produced it.  The
``verify`` subcommand runs the independent matrix-oracle suites instead
and reports pass or fail per check.

Exit codes: 0 success, 1 verification failure, 2 invalid arguments,
3 infeasible parameters (domain errors such as disjoint spectra or a
parity mismatch).
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path
from typing import Iterable, Optional

from . import __version__
from .apps.amplification import amplification_tradeoff
from .apps.cloning import cloning_tradeoff
from .apps.correction import correction_tradeoff
from .apps.estimation import estimation_profiles, estimation_tradeoff
from .coarse import tradeoff_curve
from .errors import EpopsError
from .mixedstate import purification_report
from .oracle import run_verification
from .spectra import RATIO_TOLERANCE, EnergyProfile

_MERGE_CHECK = 1e-12
_CLOSED_FORM_ABS = 1e-10
_CLOSED_FORM_REL = 1e-8
_CLOSED_FORM_LOG = 1e-6
_ORACLE_AGREEMENT = 1e-10


def _manifest_path(out: Path) -> Path:
    return out.with_name(out.stem + ".manifest.json")


def _write_manifest(
    out: Path,
    command: str,
    argv: Iterable[str],
    parameters: dict,
    tolerances: dict,
    seed: Optional[int],
) -> None:
    doc = {
        "command": command,
        "argv": list(argv),
        "parameters": parameters,
        "tolerances": tolerances,
        "seed": seed,
        "version": __version__,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
    }
    _manifest_path(out).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _write_curve(args: argparse.Namespace, command: str, curve, parameters: dict,
                 tolerances: dict) -> int:
    out = Path(args.out)
    out.write_text(curve.to_csv())
    _write_manifest(out, command, args.raw_argv, parameters, tolerances, None)
    return 0


def _base_tolerances() -> dict:
    return {"ratio_grouping_rel": RATIO_TOLERANCE, "coarse_merge_abs": _MERGE_CHECK}


def _cmd_tradeoff(args: argparse.Namespace) -> int:
    try:
        p = EnergyProfile.from_json(Path(args.input).read_text())
        q = EnergyProfile.from_json(Path(args.target).read_text())
    except (OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
        print(f"error: cannot load profile: {exc}", file=sys.stderr)
        return 2
    curve = tradeoff_curve(p, q, args.rounds)
    return _write_curve(
        args,
        "tradeoff",
        curve,
        {"input": args.input, "target": args.target, "rounds": args.rounds},
        _base_tolerances(),
    )


def _cmd_estimate(args: argparse.Namespace) -> int:
    p, q = estimation_profiles(args.mode, args.n)
    curve = tradeoff_curve(p, q, args.rounds)
    points = estimation_tradeoff(args.mode, args.n, args.rounds)
    lines = ["T,p_succ,F_recursive,F_coarse,G_recursive,G_coarse"]
    for cp, gp in zip(curve.points, points):
        lines.append(
            "%d,%.6g,%.6g,%.6g,%.6g,%.6g"
            % (cp.T, cp.p_succ, cp.F_recursive, cp.F_coarse,
               gp.gain_recursive, gp.gain_coarse)
        )
    out = Path(args.out)
    out.write_text("\n".join(lines) + "\n")
    _write_manifest(
        out,
        "estimate",
        args.raw_argv,
        {"mode": args.mode, "n": args.n, "rounds": args.rounds},
        _base_tolerances(),
        None,
    )
    return 0


def _cmd_clone(args: argparse.Namespace) -> int:
    curve = cloning_tradeoff(args.n, args.m, args.rounds)
    return _write_curve(
        args,
        "clone",
        curve,
        {"n": args.n, "m": args.m, "rounds": args.rounds},
        _base_tolerances(),
    )


def _cmd_amplify(args: argparse.Namespace) -> int:
    result = amplification_tradeoff(args.r1, args.r2, args.cutoff, args.rounds)
    tolerances = _base_tolerances()
    tolerances["closed_form_rel"] = _CLOSED_FORM_REL
    tolerances["closed_form_log"] = _CLOSED_FORM_LOG
    return _write_curve(
        args,
        "amplify",
        result.curve,
        {
            "r1": args.r1,
            "r2": args.r2,
            "cutoff": args.cutoff,
            "rounds": args.rounds,
            "tail_bound": result.tail_bound,
        },
        tolerances,
    )


def _cmd_correct(args: argparse.Namespace) -> int:
    result = correction_tradeoff(args.d, args.mu, args.rounds)
    tolerances = _base_tolerances()
    tolerances["closed_form_abs"] = _CLOSED_FORM_ABS
    return _write_curve(
        args,
        "correct",
        result.average_curve,
        {"d": args.d, "mu": args.mu, "rounds": args.rounds},
        tolerances,
    )


def _cmd_purify(args: argparse.Namespace) -> int:
    report = purification_report(args.n, args.beta)
    out = Path(args.out)
    lines = [
        "N,beta,F_det,F_prob,p_max",
        "%d,%.6g,%.6g,%.6g,%.6g"
        % (report.N, report.beta, report.F_det, report.F_prob, report.p_max),
    ]
    out.write_text("\n".join(lines) + "\n")
    sidecar = out.with_name(out.stem + ".sectors.json")
    sidecar.write_text(json.dumps(report.to_json_dict(), indent=2, sort_keys=True) + "\n")
    _write_manifest(
        out,
        "purify",
        args.raw_argv,
        {"n": args.n, "beta": args.beta},
        {"fidelity_tie_rel": 1e-12},
        None,
    )
    return 0


def _cmd_verify(args: argparse.Namespace) -> int:
    report = run_verification(args.seed, args.instances)
    for line in report.lines():
        print(line)
    if not report.passed:
        print("verification failed", file=sys.stderr)
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="epops",
        description="Tradeoff curves for energy-preserving state conversion.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    t = sub.add_parser("tradeoff", help="curve for two profiles given as JSON files")
    t.add_argument("--input", required=True, help="input profile JSON file")
    t.add_argument("--target", required=True, help="target profile JSON file")
    t.add_argument("--rounds", type=int, default=32)
    t.add_argument("--out", default="tradeoff.csv")
    t.set_defaults(func=_cmd_tradeoff)

    e = sub.add_parser("estimate", help="phase-estimation gain curve")
    e.add_argument("--mode", choices=["qubits", "maxcoh"], required=True)
    e.add_argument("--n", type=int, required=True)
    e.add_argument("--rounds", type=int, default=32)
    e.add_argument("--out", default="estimate.csv")
    e.set_defaults(func=_cmd_estimate)

    c = sub.add_parser("clone", help="spin-ensemble cloning curve")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--m", type=int, required=True)
    c.add_argument("--rounds", type=int, default=32)
    c.add_argument("--out", default="clone.csv")
    c.set_defaults(func=_cmd_clone)

    a = sub.add_parser("amplify", help="coherent-amplitude amplification curve")
    a.add_argument("--r1", type=float, required=True)
    a.add_argument("--r2", type=float, required=True)
    a.add_argument("--cutoff", type=int, default=80)
    a.add_argument("--rounds", type=int, default=81)
    a.add_argument("--out", default="amplify.csv")
    a.set_defaults(func=_cmd_amplify)

    r = sub.add_parser("correct", help="damped-qudit correction curve")
    r.add_argument("--d", type=int, required=True)
    r.add_argument("--mu", type=float, required=True)
    r.add_argument("--rounds", type=int, default=32)
    r.add_argument("--out", default="correct.csv")
    r.set_defaults(func=_cmd_correct)

    p = sub.add_parser("purify", help="thermal-spin purification summary")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--out", default="purify.csv")
    p.set_defaults(func=_cmd_purify)

    v = sub.add_parser("verify", help="run the matrix-oracle differential suites")
    v.add_argument("--seed", type=int, default=42)
    v.add_argument("--instances", type=int, default=100)
    v.set_defaults(func=_cmd_verify)

    return parser


def main(argv: Optional[list] = None) -> int:
    raw = list(argv) if argv is not None else sys.argv[1:]
    parser = build_parser()
    args = parser.parse_args(raw)
    args.raw_argv = raw
    try:
        return args.func(args)
    except EpopsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
