"""Command-line entry point: ``ocrp verify|simulate|converge``.

Exit codes: 0 pass, 1 checked failure or I/O error, 2 usage error.
Reports are JSON documents; bulk samples and tables are CSV.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from fractions import Fraction

from . import chains, montecarlo, semigroup, spectral
from .core import EnumerationCapError, parse_alpha, parse_rational
from .report import SimReport

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

SUBJECTS = ("intertwining", "recurrence", "consistency", "generator", "generator-bernstein",
            "semigroup", "pieri", "bernstein", "h-family", "eta", "boundary", "spectrum")


class UsageError(Exception):
    pass


def _rational_alpha(text: str) -> Fraction:
    try:
        return parse_alpha(text, exact=True)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"alpha must be a rational 'p/q' in (0, 1): {exc}")


def _any_alpha(text: str):
    try:
        return parse_alpha(text, exact=False)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"alpha must lie in (0, 1): {exc}")


def _n_list(text: str) -> list[int]:
    try:
        out = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not out:
        raise argparse.ArgumentTypeError("n-list must be nonempty")
    return out


def _poly(text: str) -> spectral.Polynomial:
    try:
        return spectral.Polynomial([parse_rational(x) for x in text.split(",")])
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"expected rational coefficients 'c0,c1,...': {exc}")


def _nonneg_int(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {text}")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ocrp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=_nonneg_int, default=0)
    common.add_argument("--threads", type=int, default=None,
                        help="worker threads (results do not depend on this)")
    common.add_argument("--out", default=None, help="output file")

    v = sub.add_parser("verify", parents=[common], help="exact identity checks")
    v.add_argument("subject", choices=SUBJECTS)
    v.add_argument("--alpha", type=_rational_alpha, default=Fraction(1, 2))
    v.add_argument("--n", type=_nonneg_int, default=4)
    v.add_argument("--t", type=float, default=0.1)
    v.add_argument("--tol", type=float, default=1e-9)
    v.add_argument("--grid", type=int, default=spectral.GRID_SIZE)
    v.add_argument("--i", type=_nonneg_int, default=None, help="pieri: single index i")
    v.add_argument("--k", type=_nonneg_int, default=None, help="pieri: single degree k")
    v.add_argument("--m", type=_nonneg_int, default=2, help="boundary: test h_m")
    v.add_argument("--poly", type=_poly, default=None,
                   help="boundary: monomial coefficients 'c0,c1,...' instead of h_m")
    v.add_argument("--j-max", type=int, default=50, help="eta: largest power of (1-x)")

    s = sub.add_parser("simulate", parents=[common], help="sample the leftmost column")
    s.add_argument("--alpha", type=_any_alpha, required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--t", type=float, default=0.1)
    s.add_argument("--samples", type=int, default=10_000)
    s.add_argument("--method", choices=("auto", "full_chain", "q_chain"), default="auto")
    s.add_argument("--every", type=int, default=0,
                   help="also record every k-th step (0: final step only)")
    s.add_argument("--tol", type=float, default=montecarlo.KS_THRESHOLD,
                   help="KS pass threshold reported as ks_pass")

    c = sub.add_parser("converge", parents=[common], help="KS distance versus n")
    c.add_argument("--alpha", type=_any_alpha, required=True)
    c.add_argument("--n-list", type=_n_list, required=True)
    c.add_argument("--t", type=float, default=0.1)
    c.add_argument("--samples", type=int, default=10_000)
    c.add_argument("--method", choices=("auto", "full_chain", "q_chain"), default="auto")
    c.add_argument("--tol", type=float, default=montecarlo.MONOTONE_SLACK,
                   help="slack allowed when KS increases with n")
    c.add_argument("--report", default=None,
                   help="write the JSON report here instead of standard error")
    return parser


# -- verify ----------------------------------------------------------------------

def _merge(command: str, params: dict, reports) -> SimReport:
    out = SimReport(command, params)
    for r in reports:
        for name, value in r.metrics:
            out.metric(name, value)
        for msg in r.failures:
            out.fail(msg)
    return out


def _verify_pieri(args) -> SimReport:
    n = args.n
    if args.i is not None or args.k is not None:
        if args.i is None or args.k is None:
            raise UsageError("--i and --k must be given together")
        if not args.i <= args.k <= n:
            raise UsageError("need i <= k <= n")
        cases = [(args.i, args.k)]
    else:
        cases = [(i, k) for k in range(n + 1) for i in range(k + 1)]
    rep = _merge("verify pieri", {"n": n, "i": args.i, "k": args.k},
                 (spectral.verify_pieri(i, k, n) for i, k in cases))
    rep.metric("cases", len(cases))
    return rep


def _verify_boundary(args) -> SimReport:
    f = args.poly if args.poly is not None else spectral.jacobi_h(args.m, args.alpha)
    try:
        return semigroup.boundary_checks(f, args.alpha, args.grid)
    except spectral.NotInHError as exc:
        raise UsageError(str(exc))


def run_verify(args) -> SimReport:
    a, n = args.alpha, args.n
    subject = args.subject
    if subject == "intertwining":
        return chains.verify_intertwining(n, a)
    if subject == "recurrence":
        return chains.verify_transition_recurrence(n, a)
    if subject == "consistency":
        return chains.verify_consistency(n, a)
    if subject == "generator":
        return spectral.verify_generator_relation(n, a)
    if subject == "generator-bernstein":
        return spectral.verify_generator_on_bernstein(n, a)
    if subject == "semigroup":
        return semigroup.verify_semigroup_relation(n, a, args.t, args.grid, args.tol)
    if subject == "pieri":
        return _verify_pieri(args)
    if subject == "bernstein":
        return spectral.verify_bernstein_identities(n)
    if subject == "h-family":
        return spectral.verify_h_family(n, a)
    if subject == "eta":
        return semigroup.verify_eta_unboundedness(a, args.j_max)
    if subject == "boundary":
        return _verify_boundary(args)
    return semigroup.verify_spectrum(n, a)


# -- simulate ----------------------------------------------------------------------

def run_simulate(args) -> tuple[SimReport, str | None]:
    n, a = args.n, args.alpha
    if n < 1 or args.samples < 1 or args.t < 0 or args.every < 0:
        raise UsageError("need n >= 1, samples >= 1, t >= 0 and every >= 0")
    steps = math.floor(n * n * args.t)
    record = list(range(0, steps + 1, args.every)) if args.every else []
    if not record or record[-1] != steps:
        record.append(steps)
    ys = montecarlo.leftmost_batch(n, a, args.samples, steps, args.seed, "stationary",
                                   args.method, record=record, threads=args.threads)
    report = SimReport("simulate", {"n": n, "alpha": a, "t": args.t, "steps": steps,
                                    "samples": args.samples, "seed": args.seed,
                                    "method": montecarlo._resolve_method(n, args.method),
                                    "every": args.every, "threshold": args.tol})
    ks = montecarlo.ks_distance(ys[:, -1] / n, a, args.tol)
    report.metric("ks", ks.statistic)
    report.metric("ks_pass", ks.passed)
    report.metric("reference", [ks.a, ks.b])
    report.metric("mean_fraction", float(ys[:, -1].mean() / n))
    csv_text = None
    if args.out:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["replica", "step", "value"])
        for r in range(args.samples):
            for col, k in enumerate(record):
                w.writerow([r, k, repr(float(ys[r, col]) / n)])
        csv_text = buf.getvalue()
        report.metric("rows", args.samples * len(record))
    return report, csv_text


# -- converge ----------------------------------------------------------------------

def run_converge(args) -> tuple[SimReport, str]:
    if args.t <= 0 or args.samples < 1 or any(n < 2 for n in args.n_list):
        raise UsageError("need t > 0, samples >= 1 and every n >= 2")
    rows, report = montecarlo.scaling_limit_diagnostic(
        args.alpha, args.n_list, args.t, args.samples, args.seed, args.method,
        args.threads, slack=args.tol)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "steps", "samples", "ks", "exact"])
    for row in rows:
        w.writerow([row["n"], row["steps"], row["samples"], repr(float(row["ks"])),
                    row["exact"]])
    return report, buf.getvalue()


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with status 2 on bad flags
    try:
        if args.command == "verify":
            report = run_verify(args)
            sys.stdout.write(report.to_json())
            if args.out:
                _write(args.out, report.to_json())
        elif args.command == "simulate":
            report, text = run_simulate(args)
            if text is not None:
                _write(args.out, text)
            sys.stdout.write(report.to_json())
        else:
            report, table = run_converge(args)
            sys.stdout.write(table)
            if args.out:
                _write(args.out, table)
            if args.report:
                _write(args.report, report.to_json())
            else:
                sys.stderr.write(report.to_json())
    except (UsageError, EnumerationCapError) as exc:
        parser.error(str(exc))
    except OSError as exc:
        sys.stderr.write(f"ocrp: {exc}\n")
        return EXIT_FAIL
    except (ValueError, TypeError) as exc:
        parser.error(str(exc))
    return EXIT_OK if report.ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
