"""Command-line front end.

Exit codes: 0 success, 1 a verification suite failed, 2 usage error or
malformed input, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from . import harness
from .exceptions import ConvergenceError, DomainError, TwistlabError, UsageError
from .formats import couple_to_dict, dumps_report, load_block_vector, load_couple
from .interpolation import k_constant, omega_n, phi_theta, phi_theta_inverse
from .spaces import fenchel_orlicz_norm, rochberg_quasinorm

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3
DEFAULT_TRIALS = 200
DEFAULT_N = 2
SUITE_NAMES = tuple(harness.SUITES) + ("all",)


def _fmt(x: float) -> str:
    return f"{float(x):.15g}"


def _common(default) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", metavar="PATH", default=default,
                   help="couple configuration (JSON); default is (ess_sup, power(1))")
    p.add_argument("--theta", type=float, default=default,
                   help="override the configured theta")
    return p


def build_parser() -> argparse.ArgumentParser:
    # the options are accepted before or after the command; SUPPRESS keeps a
    # subcommand from resetting a value given before it
    common = _common(argparse.SUPPRESS)
    parser = argparse.ArgumentParser(
        prog="twistlab", parents=[_common(None)],
        description="Orlicz interpolation couples, derived quasinorms and their checks.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("phi-eval", parents=[common],
                       help="evaluate phi_theta or its inverse")
    p.add_argument("value", type=float, help="t (forward) or s (inverse)")
    p.add_argument("--direction", choices=("forward", "inverse"), default="forward")

    for name, helptext in (("norm", "quasinorms of a block vector"),
                           ("omega", "the map Omega^n of a block vector")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("vector", metavar="VECTOR_FILE", help="block vector (JSON)")
        p.add_argument("--n", type=int, help="derived order (default: the file's n)")
        if name == "norm":
            p.add_argument("--which", choices=("rochberg", "fenchel", "both"), default="both")

    p = sub.add_parser(
        "verify", parents=[common], help="run a verification suite",
        description=f"Suites: {', '.join(SUITE_NAMES)}. Defaults: seed 0, "
                    f"{DEFAULT_TRIALS} trials, n = {DEFAULT_N}.")
    p.add_argument("suite", choices=SUITE_NAMES)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
    p.add_argument("--n", type=int, default=DEFAULT_N)
    p.add_argument("--out", metavar="PATH", help="report path (default: standard output)")
    p.add_argument("--timing", action="store_true",
                   help="record wall time (the report is then no longer reproducible)")

    sub.add_parser("couple-info", parents=[common], help="describe the configured couple")
    return parser


def _vector(args):
    v = load_block_vector(args.vector)
    n = v.n if args.n is None else args.n
    if n != v.n:
        raise UsageError(f"--n {n} does not match the file's n = {v.n}")
    return v, n


def cmd_phi_eval(couple, args) -> int:
    if args.value < 0:
        raise UsageError("phi-eval needs a nonnegative value")
    f = phi_theta if args.direction == "forward" else phi_theta_inverse
    print(_fmt(f(couple, args.value)))
    return EXIT_OK


def cmd_norm(couple, args) -> int:
    v, n = _vector(args)
    values = {}
    if args.which in ("rochberg", "both"):
        values["rochberg"] = rochberg_quasinorm(couple, n, v)
    if args.which in ("fenchel", "both"):
        values["fenchel"] = fenchel_orlicz_norm(couple, n, v)
    for key, value in values.items():
        print(f"{key} {_fmt(value)}")
    if args.which == "both":
        den = values["fenchel"]
        print(f"ratio {_fmt(values['rochberg'] / den) if den > 0 else 'undefined'}")
    return EXIT_OK


def cmd_omega(couple, args) -> int:
    v, n = _vector(args)
    out = omega_n(couple, n, v.blocks) if v.indices.size else np.zeros(0, dtype=complex)
    for k, z in zip(v.indices, out):
        print(f"{int(k)} {_fmt(z.real)} {_fmt(z.imag)}")
    return EXIT_OK


def cmd_verify(couple, args) -> int:
    cfg = harness.TrialConfig(couple, seed=args.seed, trials=args.trials, n=args.n)
    start = time.perf_counter()
    entries = harness.run_suite(args.suite, cfg)
    report = {
        "suite": args.suite,
        "couple": couple_to_dict(couple),
        "seed": args.seed,
        "trials": args.trials,
        "n": args.n,
        "entries": entries,
        "pass": all(e["pass"] for e in entries),
        "wall_time": time.perf_counter() - start if args.timing else None,
    }
    text = dumps_report(report)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        status = "pass" if report["pass"] else "FAIL"
        print(f"{args.suite}: {status} ({len(entries)} entries) -> {args.out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK if report["pass"] else EXIT_FAIL


def cmd_couple_info(couple, args) -> int:
    info = couple_to_dict(couple)
    top = max(couple.jet_order or 0, 4)
    info["phi_theta_inverse(1)"] = float(phi_theta_inverse(couple, 1.0))
    info["conformal_derivative"] = couple.conformal.derivative
    info["k"] = {str(m): k_constant(couple, m) for m in range(1, top + 1)}
    sys.stdout.write(dumps_report(info))
    return EXIT_OK


COMMANDS = {
    "phi-eval": cmd_phi_eval,
    "norm": cmd_norm,
    "omega": cmd_omega,
    "verify": cmd_verify,
    "couple-info": cmd_couple_info,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        couple = load_couple(args.config, args.theta)
    except TwistlabError as exc:
        print(f"twistlab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return COMMANDS[args.command](couple, args)
    except UsageError as exc:
        print(f"twistlab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConvergenceError, DomainError, TwistlabError, FloatingPointError) as exc:
        print(f"twistlab: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
