"""Command-line front end.

    faltings-gap hmin [--digits D]
    faltings-gap height (--poly TEXT | --coeffs LIST) [--digits D] [--json]
    faltings-gap gap [--digits D] [--pmin X] [--pmax X] [--tolp X] [--json]
    faltings-gap certify --lemma ID [--grid NxM] [--ymax Y] [--delta D] [--digits D] [--json]
    faltings-gap construct --n N [--p P] [--json]
    faltings-gap scan --corpus PATH [--digits D] [--json]

Exit codes: 0 success, 1 usage error, 2 numerical failure, 3 violated
precondition, 4 certification found violations.  JSON reports carry every
number as a decimal string.
"""

from __future__ import annotations

import argparse
import json
import logging
import re
import sys

from .errors import FaltingsGapError, NumericError, PreconditionError, UsageError
from .numctx import PrecisionContext

SCHEMA = 1
EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_PRECONDITION, EXIT_CERT = 0, 1, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _digits(text):
    try:
        d = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid digits {text!r}") from None
    if d < 15:
        raise argparse.ArgumentTypeError("digits must be >= 15")
    return d


def _grid(text):
    m = re.fullmatch(r"(\d+)[xX](\d+)", text.strip())
    if not m:
        raise argparse.ArgumentTypeError(f"grid must look like 100x100, got {text!r}")
    return int(m.group(1)), int(m.group(2))


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="faltings-gap", description="Stable Faltings heights and the height gap at j = 0.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    p = sub.add_parser("hmin", help="the minimal stable Faltings height")
    p.add_argument("--digits", type=_digits, default=40)

    p = sub.add_parser("height", help="stable Faltings height from the minimal polynomial of j")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--poly", help='expression in x, e.g. "x^2 - x - 1"')
    src.add_argument("--coeffs", help='coefficients low to high, e.g. "-1728,1"')
    p.add_argument("--digits", type=_digits, default=40)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("gap", help="maximize the gap function")
    p.add_argument("--digits", type=_digits, default=60)
    p.add_argument("--pmin", default="0.5")
    p.add_argument("--pmax", default="0.9999")
    p.add_argument("--tolp", default="1e-6")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("certify", help="grid-check one of the height lemmas")
    p.add_argument("--lemma", required=True, help="fp_i fp_ii fp_iii l53 l54 bilu e2id vmono l64 r61 constants")
    p.add_argument("--grid", type=_grid, default=(100, 100), metavar="NxM")
    p.add_argument("--ymax", default="5")
    p.add_argument("--delta", default="0", help="exclusion radius for l64")
    p.add_argument("--digits", type=_digits, default=40)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("construct", help="Eisenstein polynomial for the j = 0 family")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=int, default=None)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("scan", help="heights for every polynomial in a corpus file")
    p.add_argument("--corpus", required=True)
    p.add_argument("--digits", type=_digits, default=40)
    p.add_argument("--json", action="store_true")
    return parser


def _emit(obj):
    print(json.dumps(obj, indent=2))


# -- verbs ---------------------------------------------------------------------

def cmd_hmin(args):
    from .heights import hmin_closed, hmin_modular

    ctx = PrecisionContext(digits=args.digits)
    closed = hmin_closed(ctx)
    modular = hmin_modular(ctx)
    print(f"h_min = {ctx.fmt(closed)}")
    print(f"V(rho) + log(pi)/2 = {ctx.fmt(modular)}")
    print(f"difference = {ctx.mp.nstr(abs(closed - modular), 3)}")
    return EXIT_OK


def height_json(report, text, ctx):
    f = ctx.fmt
    return {
        "schema": SCHEMA,
        "input": text,
        "degree": report.degree,
        "digits": ctx.digits,
        "weil": {"total": f(report.weil_total), "finite": f(report.weil_finite), "arch": f(report.weil_arch)},
        "faltings_stable": f(report.faltings_stable),
        "hmin": f(report.hmin),
        "gap_to_hmin": f(report.hmin_gap),
        "roots": [
            {"re": f(d.root.real), "im": f(d.root.imag), "tau_re": f(d.tau.x), "tau_im": f(d.tau.y), "v": f(d.v)}
            for d in report.per_root
        ],
    }


def cmd_height(args):
    from .heights import faltings_stable
    from .poly import parse_coeffs, parse_poly

    poly = parse_poly(args.poly) if args.poly is not None else parse_coeffs(args.coeffs)
    ctx = PrecisionContext(digits=args.digits)
    report = faltings_stable(poly, ctx)
    if args.json:
        _emit(height_json(report, str(poly), ctx))
        return EXIT_OK
    f = ctx.fmt
    print(f"polynomial      {poly}")
    print(f"degree          {report.degree}")
    print(f"h(j)            {f(report.weil_total)}")
    print(f"  finite        {f(report.weil_finite)}")
    print(f"  archimedean   {f(report.weil_arch)}")
    print(f"h_stab          {f(report.faltings_stable)}")
    print(f"h_stab - h_min  {f(report.hmin_gap)}")
    for d in report.per_root:
        print(f"  j = {ctx.mp.nstr(d.root, 15)}  tau = {ctx.mp.nstr(d.tau.tau(ctx), 15)}  V = {f(d.v, 15)}")
    return EXIT_OK


def cmd_gap(args):
    from .gap import maximize_gap

    ctx = PrecisionContext(digits=args.digits)
    r = maximize_gap(ctx, args.pmin, args.pmax, args.tolp)
    f = ctx.fmt
    fields = [("p_star", r.p_star), ("eps", r.eps), ("delta", r.delta), ("delta_prime", r.delta_prime),
              ("c_value", r.c_value), ("gap", r.gap), ("final_gap", r.final_gap)]
    if args.json:
        out = {"schema": SCHEMA}
        out.update((k, f(v)) for k, v in fields)
        out["digits"] = r.digits_used
        _emit(out)
    else:
        for k, v in fields:
            print(f"{k:12s} {f(v, 20)}")
    return EXIT_OK


def _point_text(pt, ctx):
    if isinstance(pt, str):
        return pt
    return ctx.mp.nstr(pt, 20)


def cmd_certify(args):
    from .certify import GridSpec, certify, derived_constants_check

    ctx = PrecisionContext(digits=args.digits)
    if args.lemma == "constants":
        res = derived_constants_check(ctx)
    else:
        nx, ny = args.grid
        grid = GridSpec(nx=nx, ny=ny, y_max=ctx.mp.mpf(args.ymax), exclusion_delta=ctx.mp.mpf(args.delta))
        res = certify(args.lemma, grid, ctx)
    if args.json:
        _emit({
            "schema": SCHEMA,
            "lemma": res.lemma_id,
            "points": res.points_checked,
            "min_margin": ctx.fmt(res.min_margin),
            "violations": [
                {"point": _point_text(p, ctx), "lhs": ctx.fmt(lhs), "rhs": ctx.fmt(rhs)}
                for p, lhs, rhs in res.violations
            ],
        })
    else:
        status = "passed" if res.passed else "FAILED"
        print(f"{res.lemma_id}: {status}, {res.points_checked} points, "
              f"{len(res.violations)} violations, min margin {ctx.mp.nstr(res.min_margin, 8)}")
        for name, value, bound, margin in res.details:
            print(f"  {name} = {ctx.mp.nstr(value, 12)} < {ctx.mp.nstr(bound, 8)}  (margin {ctx.mp.nstr(margin, 6)})")
        for p, lhs, rhs in res.violations[:20]:
            print(f"  violation at {_point_text(p, ctx)}: {ctx.mp.nstr(lhs, 12)} vs {ctx.mp.nstr(rhs, 12)}")
    return EXIT_OK if res.passed else EXIT_CERT


def cmd_construct(args):
    from .construct import EisensteinSpec, auto_p, build_eisenstein, verify_eisenstein
    from .poly import format_poly

    p = auto_p(args.n) if args.p is None else args.p
    ctx = PrecisionContext()
    res = build_eisenstein(EisensteinSpec(args.n, p), ctx)
    if not verify_eisenstein(res):
        raise AssertionError("constructed polynomial failed verification")
    f_text = format_poly(res.f_coeffs)
    if args.json:
        _emit({
            "schema": SCHEMA,
            "n": args.n,
            "p": p,
            "b": [str(b) for b in res.b],
            "f": f_text,
            "h0": ctx.fmt(res.h0),
            "height": ctx.fmt(res.height),
        })
    else:
        print(f"n = {args.n}, p = {p}, m = {res.spec.m}")
        print(f"b = {list(res.b)}")
        print(f"f = {f_text}")
        print(f"h0 = log(p)/(3n) = {ctx.fmt(res.h0, 15)}")
        print(f"height = h_min + h0 = {ctx.fmt(res.height, 15)}")
    return EXIT_OK


def cmd_scan(args):
    from .heights import read_corpus, scan_corpus, silverman_sandwich_check

    ctx = PrecisionContext(digits=args.digits)
    result = scan_corpus(read_corpus(args.corpus), ctx)
    f = ctx.fmt
    if args.json:
        _emit({
            "schema": SCHEMA,
            "corpus": args.corpus,
            "digits": ctx.digits,
            "entries": [
                {
                    "input": str(r.poly),
                    "degree": r.degree,
                    "weil_total": f(r.weil_total),
                    "faltings_stable": f(r.faltings_stable),
                    "gap_to_hmin": f(r.hmin_gap),
                    "sandwich": silverman_sandwich_check(r, ctx),
                }
                for r in result.reports
            ],
            "failures": [{"input": str(p), "error": str(e)} for p, e in result.failures],
        })
    else:
        for r in result.reports:
            print(f"{f(r.faltings_stable, 15):>22s}  {f(r.hmin_gap, 6):>14s}  {r.poly}")
        for p, e in result.failures:
            print(f"failed: {p}: {e}")
    return EXIT_OK if not result.failures else EXIT_PRECONDITION


_VERBS = {"hmin": cmd_hmin, "height": cmd_height, "gap": cmd_gap, "certify": cmd_certify,
          "construct": cmd_construct, "scan": cmd_scan}


def exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, UsageError):
        return EXIT_USAGE
    if isinstance(exc, NumericError):
        return EXIT_NUMERIC
    if isinstance(exc, PreconditionError):
        return EXIT_PRECONDITION
    return EXIT_NUMERIC


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return _VERBS[args.verb](args)
    except FaltingsGapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exit_code_for(exc)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
