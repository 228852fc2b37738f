"""Command-line entry point: ``python3 -m invbeta <command> ...``.

Exit codes: 0 success, 1 a verification check failed, 2 bad arguments or
parameters outside the domain, 3 a numeric routine did not converge, 4 the
output could not be written.
"""

import argparse
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_TOL
from .errors import ConvergenceError, DomainError
from .incbeta import BetaParams
from .qframework import family_from_config, quantile_monotonicity_check
from .quantile import quantile
from .series import psi_prime_series, q_prime_series
from .suites import SUITES, GridSpec, run_suite

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_CONVERGENCE = 3
EXIT_IO = 4

CSV_HEADER = ("a", "q", "log_q", "phi", "psi_prime_series", "psi_second_fd")


@dataclass(frozen=True)
class SweepSpec:
    b: float
    p: float
    a_min: float
    a_max: float
    points: int = 200
    scale: str = "log"

    def __post_init__(self):
        if not (self.b > 0 and math.isfinite(self.b)):
            raise DomainError(f"b must be positive and finite, got {self.b!r}")
        if not 0 < self.p < 1:
            raise DomainError(f"p must lie in (0, 1), got {self.p!r}")
        if not 0 < self.a_min < self.a_max < math.inf:
            raise DomainError("need 0 < a_min < a_max")
        if self.points < 2:
            raise DomainError("points must be at least 2")
        if self.scale not in ("linear", "log"):
            raise DomainError(f"scale must be linear or log, got {self.scale!r}")

    def a_values(self):
        if self.scale == "log":
            return np.logspace(math.log10(self.a_min), math.log10(self.a_max), self.points)
        return np.linspace(self.a_min, self.a_max, self.points)


def _fmt(x):
    return format(float(x), ".17g")


def sweep_rows(spec, tol=DEFAULT_TOL):
    """Rows of the sweep CSV in grid order."""
    rows = []
    for a in spec.a_values():
        res = quantile(BetaParams(a, spec.b, spec.p), tol)
        h = tol.fd_rel_step * a
        lo = quantile(BetaParams(a - h, spec.b, spec.p), tol).psi
        hi = quantile(BetaParams(a + h, spec.b, spec.p), tol).psi
        d1, _ = psi_prime_series(a, spec.b, spec.p, tol)
        d2 = (lo - 2.0 * res.psi + hi) / h**2
        rows.append((a, res.q, res.log_q, a * res.psi, d1, d2))
    return rows


def sweep_csv(spec, tol=DEFAULT_TOL):
    lines = [",".join(CSV_HEADER)]
    lines += [",".join(_fmt(x) for x in row) for row in sweep_rows(spec, tol)]
    return "\n".join(lines) + "\n"


def derivative_record(a, b, p, tol=DEFAULT_TOL):
    """psi' by series and by central differences, q' by two routes."""
    params = BetaParams(a, b, p)
    res = quantile(params, tol)
    h = tol.fd_rel_step * a
    lo = quantile(BetaParams(a - h, b, p), tol).psi
    hi = quantile(BetaParams(a + h, b, p), tol).psi
    series, diag = psi_prime_series(a, b, p, tol)
    fd = (hi - lo) / (2.0 * h)
    q_direct = q_prime_series(a, b, p, tol)
    q_chain = -res.q * series

    def gap(x, y):
        scale = max(abs(x), abs(y))
        return abs(x - y) / scale if scale > 0 else 0.0

    return {
        "a": a,
        "b": b,
        "p": p,
        "q": res.q,
        "psi": res.psi,
        "psi_prime_series": series,
        "psi_prime_fd": fd,
        "q_prime_series": q_direct,
        "q_prime_chain": q_chain,
        "gap_psi_series_fd": gap(series, fd),
        "gap_q_series_chain": gap(q_direct, q_chain),
        "gap_q_series_fd": gap(q_direct, -res.q * fd),
        "series_terms": diag.terms_used,
        "series_converged": diag.converged,
    }


# ---------------------------------------------------------------------------


def _global_flags(parser, suppress):
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument("--tol-quantile", type=float, default=default,
                        help="absolute tolerance on the defining equation")
    parser.add_argument("--tol-series", type=float, default=default,
                        help="relative truncation tolerance of the derivative series")
    parser.add_argument("--out", default=default, help="write output to this path")
    parser.add_argument("--json", action="store_true", default=argparse.SUPPRESS if suppress else False,
                        help="print records as JSON")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="invbeta",
        description="Inverse incomplete beta function as a function of its first parameter.",
    )
    _global_flags(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("quantile", parents=[common], help="solve I(q; a, b) = p")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--p", type=float, required=True)

    p = sub.add_parser("sweep", parents=[common], help="CSV of q, phi and derivatives along a")
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--a-min", type=float, default=1e-2)
    p.add_argument("--a-max", type=float, default=1e2)
    p.add_argument("--points", type=int, default=200)
    p.add_argument("--scale", choices=("linear", "log"), default="log")

    p = sub.add_parser("verify", parents=[common], help="run verification suites, JSON report")
    p.add_argument("suite", choices=SUITES + ("all",))
    p.add_argument("--family", help="extra density family for the framework suite, "
                   'as JSON such as \'{"family": "beta", "b": 2}\' or a path to a JSON file')
    p.add_argument("--level", type=float, default=0.5,
                   help="quantile level used with --family")
    p.add_argument("--family-grid", nargs=3, type=float, metavar=("A_MIN", "A_MAX", "POINTS"),
                   help="linear a-grid for --family (default: the standard log grid)")

    p = sub.add_parser("derivative", parents=[common], help="series derivative vs finite differences")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--p", type=float, required=True)
    return parser


def _tolerances(args):
    changes = {}
    if args.tol_quantile is not None:
        changes["quantile_abs_tol"] = args.tol_quantile
    if args.tol_series is not None:
        changes["series_tail_tol"] = args.tol_series
    return DEFAULT_TOL.replace(**changes)


def _record_text(record):
    return " ".join(f"{k}={_fmt(v) if isinstance(v, float) else v}" for k, v in record.items())


def _load_family(text):
    text = text.strip()
    if not text.startswith("{"):
        with open(text) as fh:
            text = fh.read()
    try:
        return family_from_config(text)
    except json.JSONDecodeError as exc:
        raise DomainError(f"family config is not valid JSON: {exc}") from None


def _emit(text, args):
    if args.out:
        with open(args.out, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _run(args):
    tol = _tolerances(args)
    if args.command == "quantile":
        res = quantile(BetaParams(args.a, args.b, args.p), tol)
        record = {"q": res.q, "psi": res.psi, "phi": args.a * res.psi,
                  "residual": res.residual, "iterations": res.iterations}
        text = json.dumps(record, sort_keys=True) if args.json else _record_text(record)
        _emit(text + "\n", args)
        return EXIT_OK

    if args.command == "sweep":
        spec = SweepSpec(args.b, args.p, args.a_min, args.a_max, args.points, args.scale)
        _emit(sweep_csv(spec, tol), args)
        return EXIT_OK

    if args.command == "derivative":
        record = derivative_record(args.a, args.b, args.p, tol)
        text = json.dumps(record, sort_keys=True) if args.json else _record_text(record)
        _emit(text + "\n", args)
        return EXIT_OK

    report = run_suite(args.suite, GridSpec(), tol)
    if args.family:
        family = _load_family(args.family)
        if not 0 < args.level < 1:
            raise DomainError(f"level must lie in (0, 1), got {args.level!r}")
        if args.family_grid:
            a_min, a_max, points = args.family_grid
            if not (a_min < a_max and points >= 2):
                raise DomainError("--family-grid needs A_MIN < A_MAX and POINTS >= 2")
            a_grid = np.linspace(a_min, a_max, int(points))
        else:
            a_grid = GridSpec().a_values
        report.extend(quantile_monotonicity_check(family, args.level, a_grid))
    _emit(report.to_json(), args)
    return EXIT_OK if report.overall_pass else EXIT_FAILED


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _run(args)
    except (DomainError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConvergenceError as exc:
        print(f"convergence failure: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
