"""Command-line front end: every subcommand prints one JSON document (or a
CSV table for harness sweeps) on stdout and logs to stderr.

Identical argv (including --seed) produce byte-identical stdout across runs
and across --jobs settings; wall-clock timing therefore goes to stderr and
the CommandResult object only.
"""

import argparse
import json
import sys
import time
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from . import bounds, conjugation, counting, cusps, harness, hecke
from .errors import CuspnormError
from .modgroup import Mat2, PointH
from .precision import default_dps


@dataclass
class CommandResult:
    command: str
    inputs: dict
    payload: object  # JSON value, or raw text (csv tables, text reports)
    exit_code: int
    elapsed: float
    fmt: str = "json"

    def rendered(self) -> str:
        if self.fmt == "raw":
            return self.payload
        doc = {"command": self.command, "inputs": self.inputs, "result": self.payload}
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational: {text!r} ({exc})") from exc


def _point(text: str) -> PointH:
    try:
        return PointH.parse(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a point X,Y: {text!r} ({exc})") from exc


def _matrix(text: str) -> Mat2:
    parts = text.split(",")
    if len(parts) != 4:
        raise argparse.ArgumentTypeError(f"matrix needs a,b,c,d, got {text!r}")
    return Mat2(*(int(p) for p in parts))


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="cuspnorm",
        description="Exact cusp arithmetic, width-one reduction, matrix "
        "counting and exponent optimization for Gamma0(N).",
    )
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cusps", help="enumerate the cusps of Gamma0(N)")
    p.add_argument("--level", type=int, required=True)

    p = sub.add_parser("reduce", help="gap-principle reduction of a point")
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--point", type=_point, required=True, metavar="X,Y")

    p = sub.add_parser("count", help="classified matrix counts at a point")
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--delta", type=_fraction, default=Fraction(1))
    p.add_argument("--point", type=_point, required=True, metavar="X,Y")
    p.add_argument("--matrices", action="store_true", help="include matrix lists")

    p = sub.add_parser("harness", help="envelope-ratio sweep for one lemma")
    p.add_argument("--lemma", choices=harness.LEMMAS, required=True)
    p.add_argument("--levels", default="1..60", metavar="A..B")
    p.add_argument("--delta", type=_fraction, default=Fraction(1))
    p.add_argument("--samples", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--l1", type=int, default=1, help="fixed factor for eq3")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=("json", "csv"), default="json")

    p = sub.add_parser("hecke", help="coset table of Delta(l, N; M)")
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--check-conjugation", type=_matrix, default=None,
                   metavar="a,b,c,d")

    p = sub.add_parser("exponent", help="replay an exponent derivation")
    p.add_argument("--case", choices=("main", "case2"), default="main")
    p.add_argument("--nu", type=_fraction, default=None)
    p.add_argument("--format", choices=("json", "text"), default="json")

    p = sub.add_parser("smooth", help="count N-smooth integers up to X")
    p.add_argument("--x", type=int, required=True)
    p.add_argument("--level", type=int, required=True)

    return top


def _levels(text: str) -> tuple[int, int]:
    lo, _, hi = text.partition("..")
    return (int(lo), int(hi or lo))


def _dispatch(args) -> tuple[object, dict, str]:
    """Returns (payload, inputs-echo, format)."""
    cmd = args.command
    if cmd == "cusps":
        return cusps.cusp_table_json(args.level), {"level": args.level}, "json"

    if cmd == "reduce":
        cert = conjugation.gap_reduce(args.point, args.level)
        inputs = {"level": args.level, "point": args.point.serialize()}
        return cert.to_json(), inputs, "json"

    if cmd == "count":
        report = counting.classify_counts(
            args.point, args.l, args.delta, args.level, args.m
        )
        inputs = {
            "level": args.level,
            "m": args.m,
            "l": args.l,
            "delta": str(args.delta),
            "point": args.point.serialize(),
        }
        return report.to_json(include_matrices=args.matrices), inputs, "json"

    if cmd == "harness":
        lo, hi = _levels(args.levels)
        config = harness.HarnessConfig(
            lemma=args.lemma,
            n_lo=lo,
            n_hi=hi,
            delta=args.delta,
            samples=args.samples,
            seed=args.seed,
            jobs=args.jobs,
            l1=args.l1,
        )
        result = harness.lemma_harness(config)
        # jobs is an execution detail, not an input: keeping it out of the
        # payload preserves byte-identical output across --jobs settings
        inputs = {
            "lemma": args.lemma,
            "levels": args.levels,
            "delta": str(args.delta),
            "samples": args.samples,
            "seed": args.seed,
        }
        if args.format == "csv":
            return result.to_csv(), inputs, "raw"
        return result.to_json(), inputs, "json"

    if cmd == "hecke":
        table = hecke.coset_reps_delta(args.l, args.level, args.m)
        payload = table.to_json()
        payload["count_invariance"] = hecke.coset_count_invariance(
            args.l, args.level, args.m
        ).to_json()
        if args.check_conjugation is not None:
            payload["conjugation"] = hecke.conjugation_invariance(
                args.check_conjugation, args.l, args.level, args.m
            ).to_json()
        inputs = {"level": args.level, "m": args.m, "l": args.l}
        return payload, inputs, "json"

    if cmd == "exponent":
        report = bounds.theorem_pipeline(args.case, nu=args.nu)
        inputs = {"case": args.case}
        if args.nu is not None:
            inputs["nu"] = str(args.nu)
        if args.format == "text":
            text = report.render_text()
            if args.nu is not None:
                text += f"exponent at nu = {args.nu}: {report.exponent_at(args.nu)}\n"
            return text, inputs, "raw"
        payload = report.to_json()
        if args.nu is not None:
            payload["exponent_at_nu"] = str(report.exponent_at(args.nu))
        return payload, inputs, "json"

    if cmd == "smooth":
        count = bounds.smooth_count(args.x, args.level)
        return (
            {"x": args.x, "level": args.level, "count": count},
            {"x": args.x, "level": args.level},
            "json",
        )

    raise CuspnormError(f"unhandled command {cmd!r}")


def run(argv: list[str]) -> CommandResult:
    """Parse and execute one invocation; domain errors become exit code 1."""
    parser = build_parser()
    args = parser.parse_args(argv)
    started = time.monotonic()
    mpmath.mp.dps = default_dps() + 10
    try:
        payload, inputs, fmt = _dispatch(args)
        code = 0
    except (CuspnormError, ValueError, ZeroDivisionError) as exc:
        payload = {"error": {"type": type(exc).__name__, "message": str(exc)}}
        inputs = {}
        fmt = "json"
        code = 1
    elapsed = time.monotonic() - started
    return CommandResult(args.command, inputs, payload, code, elapsed, fmt)


def main(argv: list[str] | None = None) -> int:
    result = run(sys.argv[1:] if argv is None else argv)
    text = result.rendered()
    out_path = None
    source = sys.argv[1:] if argv is None else argv
    if "--out" in source:
        out_path = source[source.index("--out") + 1]
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
        print(f"wrote {out_path}", file=sys.stderr)
    else:
        sys.stdout.write(text)
    print(f"[{result.command}] {result.elapsed:.3f}s exit={result.exit_code}",
          file=sys.stderr)
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
