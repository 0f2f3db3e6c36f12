"""Command-line front end (``pwtrains`` / ``python -m pwtrains``).

Exit status: 0 on success, 1 when a verification check fails, 2 on usage
errors (bad flags, unknown family text, malformed range).
"""
from __future__ import annotations

import argparse
import io
import math
import sys
from contextlib import contextmanager
from typing import Sequence

import numpy as np

from ._jsonio import dumps, fmt_float
from .approx import knots_csv, polygonal_approximant
from .errors import ParameterError, PwTrainsError
from .families import FamilySpec, Monomial, make_train, monomial_p_index, p_index_to_monomial
from .metrics import ToleranceConfig, dx_distance, l1_norm, sup_norm_window
from .pwcore import ZERO, evaluate_many
from .verify import SUITES, run_all

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def parse_range(text: str):
    """``a:b:step`` -> (a, b, step) with a >= 0, b >= a, step > 0."""
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"range must look like a:b:step, got {text!r}")
    try:
        a, b, step = (float(p) for p in parts)
    except ValueError:
        raise UsageError(f"range must look like a:b:step, got {text!r}") from None
    if not all(math.isfinite(v) for v in (a, b, step)):
        raise UsageError("range values must be finite")
    if a < 0 or b < a or step <= 0:
        raise UsageError(f"need 0 <= a <= b and step > 0, got {text!r}")
    return a, b, step


def range_points(a, b, step):
    count = int(math.floor((b - a) / step * (1 + 1e-12))) + 1
    return a + step * np.arange(count, dtype=np.float64)


def parse_family(text: str):
    if text.strip() == "zero":
        return ZERO
    try:
        return make_train(FamilySpec.parse(text))
    except ParameterError as exc:
        raise UsageError(str(exc)) from None


def emit_samples(f, xs, fmt: str, sink, family: str = "") -> int:
    """Write (x, f(x)) rows to ``sink`` as CSV (``x,value``) or JSON; returns the row count."""
    xs = np.asarray(xs, dtype=np.float64)
    vals = evaluate_many(f, xs) if xs.size else np.zeros(0)
    if fmt == "csv":
        sink.write("x,value\n")
        for x, v in zip(xs.tolist(), vals.tolist()):
            sink.write(f"{fmt_float(x)},{fmt_float(v)}\n")
    else:
        sink.write(dumps({"family": family, "samples": [[x, v] for x, v in
                                                        zip(xs.tolist(), vals.tolist())]}))
        sink.write("\n")
    return int(xs.size)


def _config(args) -> ToleranceConfig:
    kw = {}
    if getattr(args, "tol", None) is not None:
        kw["metric_tol"] = args.tol
    if getattr(args, "quad_tol", None) is not None:
        kw["quad_tol"] = args.quad_tol
    if getattr(args, "series_tol", None) is not None:
        kw["series_tail_tol"] = args.series_tol
    try:
        return ToleranceConfig(**kw)
    except ParameterError as exc:
        raise UsageError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pwtrains", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, family=True, fmt=("csv", "json"), default_fmt="csv"):
        if family:
            p.add_argument("--family", required=True, help="family text, e.g. triangle:t=0.05:start=3")
        p.add_argument("--format", choices=fmt, default=default_fmt)
        p.add_argument("--out", help="output path (default: standard output)")

    def tolerances(p):
        p.add_argument("--tol", type=float, help="d_X truncation tolerance (metric_tol)")
        p.add_argument("--quad-tol", type=float, help="quadrature tolerance")
        p.add_argument("--series-tol", type=float, help="L1 series tail tolerance")

    p = sub.add_parser("gen", help="sample a family on a range")
    common(p)
    p.add_argument("--range", required=True, help="a:b:step")

    p = sub.add_parser("eval", help="evaluate a family at given points")
    common(p)
    p.add_argument("xs", nargs="+", type=float)

    p = sub.add_parser("norm", help="L1 norm (and sup norm on [0, n] with --n)")
    common(p, fmt=("json",), default_fmt="json")
    p.add_argument("--n", type=int, help="window end for the sup norm")
    tolerances(p)

    p = sub.add_parser("dist", help="d_X distance between two families (second defaults to zero)")
    p.add_argument("--family", action="append", required=True)
    p.add_argument("--format", choices=("json",), default="json")
    p.add_argument("--out")
    tolerances(p)

    p = sub.add_parser("approx", help="certified polygonal approximant")
    common(p, fmt=("json", "csv"), default_fmt="json")
    p.add_argument("--eps", type=float, required=True)
    tolerances(p)

    p = sub.add_parser("factor", help="p-index <-> monomial codec")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--n", type=int, help="p-index to factor")
    group.add_argument("--monomial", help='monomial to encode, e.g. "x1^2 x3"')
    p.add_argument("--out")

    p = sub.add_parser("verify", help="run the verification suite")
    p.add_argument("--suite", default="all", help=f"all or one of: {', '.join(SUITES)}")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out")
    tolerances(p)
    return parser


@contextmanager
def _sink(path):
    if path is None:
        yield sys.stdout
    else:
        buf = io.StringIO()
        yield buf
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(buf.getvalue())


def _run(args) -> int:
    cmd = args.command
    if cmd in ("gen", "eval"):
        f = parse_family(args.family)
        if cmd == "gen":
            xs = range_points(*parse_range(args.range))
        else:
            xs = np.array(args.xs, dtype=np.float64)
            if np.any(xs < 0) or not np.all(np.isfinite(xs)):
                raise UsageError("evaluation points must be finite and >= 0")
        with _sink(args.out) as out:
            emit_samples(f, xs, args.format, out, args.family)
        return EXIT_OK
    if cmd == "norm":
        f = parse_family(args.family)
        cfg = _config(args)
        doc = {"family": args.family, "l1": l1_norm(f, cfg).to_json()}
        if args.n is not None:
            if args.n < 1:
                raise UsageError("--n must be >= 1")
            doc["sup_window"] = {"n": args.n, "value": sup_norm_window(f, args.n)}
        with _sink(args.out) as out:
            out.write(dumps(doc) + "\n")
        return EXIT_OK
    if cmd == "dist":
        if len(args.family) > 2:
            raise UsageError("dist takes at most two --family options")
        f = parse_family(args.family[0])
        g = parse_family(args.family[1]) if len(args.family) > 1 else ZERO
        d = dx_distance(f, g, _config(args))
        doc = {"f": args.family[0], "g": args.family[1] if len(args.family) > 1 else "zero",
               "distance": d.to_json()}
        with _sink(args.out) as out:
            out.write(dumps(doc) + "\n")
        return EXIT_OK
    if cmd == "approx":
        f = parse_family(args.family)
        if not (args.eps > 0 and math.isfinite(args.eps)):
            raise UsageError("--eps must be > 0")
        b, cert = polygonal_approximant(f, args.eps, _config(args))
        with _sink(args.out) as out:
            if args.format == "csv":
                out.write(knots_csv(b))
            else:
                out.write(dumps({"family": args.family, "certificate": cert.to_json()}) + "\n")
        return EXIT_OK
    if cmd == "factor":
        with _sink(args.out) as out:
            if args.n is not None:
                if args.n < 2:
                    raise UsageError("--n must be >= 2")
                out.write(str(p_index_to_monomial(args.n)) + "\n")
            else:
                try:
                    m = Monomial.parse(args.monomial)
                except ParameterError as exc:
                    raise UsageError(str(exc)) from None
                out.write(str(monomial_p_index(m).value) + "\n")
        return EXIT_OK
    if cmd == "verify":
        suites = None if args.suite == "all" else [args.suite]
        if suites and suites[0] not in SUITES:
            raise UsageError(f"unknown suite {args.suite!r}")
        report = run_all(_config(args), args.seed, suites)
        with _sink(args.out) as out:
            if args.format == "json":
                out.write(report.dumps())
            else:
                out.write("name,passed\n")
                for r in report.results:
                    out.write(f"{r.name},{str(r.passed).lower()}\n")
        return EXIT_OK if report.passed else EXIT_FAIL
    raise UsageError(f"unknown command {cmd!r}")  # pragma: no cover


def run(argv: Sequence[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        return _run(args)
    except UsageError as exc:
        print(f"pwtrains: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PwTrainsError as exc:
        print(f"pwtrains: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


def main(argv=None) -> None:
    sys.exit(run(sys.argv[1:] if argv is None else argv))


if __name__ == "__main__":  # pragma: no cover
    main()
