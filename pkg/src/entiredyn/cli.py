"""Command-line front end.

Complex flag values are written "re,im" (e.g. ``--z 1,0``) or as a bare
real number (``--a -1``).
"""

from __future__ import annotations

import argparse
import logging
import sys


from .dsl import ExprFunction, ParseError, parse, to_source
from .dynamics import ClassifierConfig, CommutingPair, classify_point
from .raster import (
    GridSpec,
    classify_grid,
    classify_pair,
    compare_rasters,
    extract_boundary,
    write_mask_ppm,
    write_ppm,
    write_report_json,
)
from .theorems import (
    PolynomialQ,
    check_commutativity,
    check_functional_equation,
    check_iterate_identity,
    check_q_hypothesis,
    check_q_recurrence,
    check_unimodular,
    geometric_sum_bound_check,
    sample_square,
    write_reports_json,
)

log = logging.getLogger("entiredyn")

HYPOTHESIS = "g = a*f^p + b requires a != 0, 1"
_VALUE_FLAGS = ("--a", "--b", "--z", "--poly")


class UsageError(Exception):
    pass


def parse_complex(text: str) -> complex:
    parts = [p.strip() for p in text.split(",")]
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise argparse.ArgumentTypeError(f"expected 're,im' or a real number, got {text!r}")


def parse_poly(text: str) -> PolynomialQ:
    """Semicolon-separated coefficients, lowest degree first: "-1;1" is z - 1."""
    try:
        return PolynomialQ(tuple(parse_complex(c) for c in text.split(";")))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _add_function(p):
    p.add_argument("--f", required=True, default=argparse.SUPPRESS, help="DSL expression for f, e.g. '1+sin(z-1)'")


def _add_pair(p):
    p.add_argument("--a", type=parse_complex, default="-1", help="multiplier a of g = a*f^p + b")
    p.add_argument("--b", type=parse_complex, default="0", help="translation b of g = a*f^p + b")
    p.add_argument("--p", type=int, default=1, help="iterate exponent p of g = a*f^p + b")


def _add_classifier(p):
    d = ClassifierConfig()
    p.add_argument("--max-iter", type=int, default=d.max_iter, help="iteration budget")
    p.add_argument("--escape-radius", type=float, default=d.escape_radius, help="escape radius")
    p.add_argument("--bounded-radius", type=float, default=d.bounded_radius, help="bounded radius")
    p.add_argument("--overflow-cap", type=float, default=d.overflow_cap, help="overflow cap")
    p.add_argument("--confirm-steps", type=int, default=d.confirm_steps, help="escape confirmation steps")
    p.add_argument(
        "--bungee-alternations",
        type=int,
        default=d.bungee_min_alternations,
        help="minimum alternations for a bungee orbit",
    )


def _add_grid(p):
    d = GridSpec()
    p.add_argument("--re-min", type=float, default=d.re_min, help="left edge")
    p.add_argument("--re-max", type=float, default=d.re_max, help="right edge")
    p.add_argument("--im-min", type=float, default=d.im_min, help="bottom edge")
    p.add_argument("--im-max", type=float, default=d.im_max, help="top edge")
    p.add_argument("--width", type=int, default=d.width, help="pixels per row")
    p.add_argument("--height", type=int, default=d.height, help="pixel rows")
    p.add_argument("--workers", type=int, default=1, help="worker processes")


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentDefaultsHelpFormatter
    parser = argparse.ArgumentParser(
        prog="entiredyn",
        description="Iterate entire functions and compare the dynamics of commuting pairs.",
        epilog="Complex values: 're,im' or a bare real; use --a=-1,0 for negative pairs.",
        formatter_class=fmt,
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("render", help="write the escape-class image of f or g", formatter_class=fmt)
    _add_function(p)
    _add_pair(p)
    p.add_argument("--which", choices=("f", "g"), default="f", help="render f or its partner g")
    _add_grid(p)
    _add_classifier(p)
    p.add_argument("--out", default="render.ppm", help="output PPM path")
    p.add_argument("--boundary-out", default=None, help="optional PPM path for the escape boundary")

    p = sub.add_parser("verify", help="check the functional identities for a pair", formatter_class=fmt)
    _add_function(p)
    _add_pair(p)
    p.add_argument("--g", default=None, help="explicit g for the Q-relation checks (needs --poly)")
    p.add_argument("--poly", type=parse_poly, default=None, help="Q coefficients lowest first, ';'-separated")
    p.add_argument("--n-max", type=int, default=6, help="largest iterate index checked")
    p.add_argument("--samples", type=int, default=200, help="number of sample points in [-2,2]^2")
    p.add_argument("--seed", type=int, default=42, help="sample seed")
    p.add_argument("--tol", type=float, default=1e-8, help="relative error tolerance")
    p.add_argument("--out", default="verify_report.json", help="JSON report path")

    p = sub.add_parser("compare", help="classify a grid under f and g and compare", formatter_class=fmt)
    _add_function(p)
    _add_pair(p)
    _add_grid(p)
    _add_classifier(p)
    p.add_argument("--threshold", type=float, default=0.99, help="minimum decided agreement rate")
    p.add_argument("--out-f", default="f.ppm", help="PPM path for f")
    p.add_argument("--out-g", default="g.ppm", help="PPM path for g")
    p.add_argument("--report", default="agreement.json", help="JSON agreement report path")

    p = sub.add_parser("classify-point", help="print the class of a single point", formatter_class=fmt)
    _add_function(p)
    _add_pair(p)
    p.add_argument("--which", choices=("f", "g"), default="f", help="iterate f or its partner g")
    p.add_argument("--z", type=parse_complex, required=True, help="starting point 're,im'")
    _add_classifier(p)
    return parser


def _normalise_argv(argv):
    # let "--a -1,0" through argparse, which would otherwise read -1,0 as a flag
    out = []
    it = iter(argv)
    for tok in it:
        if tok in _VALUE_FLAGS:
            nxt = next(it, None)
            if nxt is None:
                out.append(tok)
            else:
                out.append(f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def _config(args) -> ClassifierConfig:
    try:
        return ClassifierConfig(
            args.max_iter,
            args.escape_radius,
            args.bounded_radius,
            args.overflow_cap,
            args.confirm_steps,
            args.bungee_alternations,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _grid(args) -> GridSpec:
    try:
        return GridSpec(args.re_min, args.re_max, args.im_min, args.im_max, args.width, args.height)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _fmt(c: complex) -> str:
    return f"{c.real:g}" if c.imag == 0 else f"{c.real:g},{c.imag:g}"


def _pair(args) -> CommutingPair:
    if args.a == 0 or args.a == 1:
        raise UsageError(f"a = {_fmt(args.a)} rejected: {HYPOTHESIS}")
    if args.p < 1:
        raise UsageError("p must be a positive integer")
    return CommutingPair(parse(args.f), args.a, args.b, args.p)


def _cmd_render(args) -> int:
    config = _config(args)
    spec = _grid(args)
    if args.which == "g":
        pair = _pair(args)
        raster = classify_grid(pair.g_function, spec, config, args.workers)
    else:
        raster = classify_grid(ExprFunction(parse(args.f)), spec, config, args.workers)
    write_ppm(raster, args.out)
    log.info("wrote %s %s", args.out, raster.counts())
    if args.boundary_out:
        write_mask_ppm(extract_boundary(raster), args.boundary_out)
    return 0


def _cmd_verify(args) -> int:
    f_expr = parse(args.f)
    samples = sample_square(args.samples, args.seed)
    tol, seed = args.tol, args.seed
    reports = []
    if args.g is not None:
        if args.poly is None:
            raise UsageError("--g is only accepted together with --poly")
        if args.a == 0:
            raise UsageError("a = 0 rejected: Q(g) = aQ(f) + b requires a != 0")
        f = ExprFunction(f_expr)
        g = ExprFunction(parse(args.g))
        a, b = args.a, args.b
        pair_text = {"f": to_source(f_expr), "g": to_source(g.expr)}
    else:
        pair = _pair(args)
        f, g = pair.f_function, pair.g_function
        a, b = pair.a, pair.b
        pair_text = {"f": to_source(f_expr), "p": pair.p}
        reports.append(check_commutativity(f, g, samples, tol, seed))
        reports.append(check_functional_equation(f, a, b, samples, tol, seed))
        reports.append(check_iterate_identity(pair, args.n_max, samples, tol, seed))
    if args.poly is not None:
        if args.g is not None:
            reports.append(check_commutativity(f, g, samples, tol, seed))
        reports.append(check_q_hypothesis(f, g, args.poly, a, b, samples, tol, seed))
        reports.append(check_q_recurrence(f, g, args.poly, a, b, args.n_max, samples, tol, seed))
    unimodular = check_unimodular(a)
    extra = {
        **pair_text,
        "a": [a.real, a.imag],
        "b": [b.real, b.imag],
        "unimodular": unimodular,
    }
    if unimodular:
        extra["geometric_sum_bound"] = geometric_sum_bound_check(a, max(args.n_max, 200))
    write_reports_json(reports, args.out, **extra)
    ok = all(r.passed for r in reports) and extra.get("geometric_sum_bound", True)
    for r in reports:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status} {r.identity}: max rel err {r.max_relative_error:.3e}, "
              f"{len(r.failures)} failures, {r.skipped_overflow} skipped")
    return 0 if ok else 1


def _cmd_compare(args) -> int:
    config = _config(args)
    spec = _grid(args)
    pair = _pair(args)
    rf, rg = classify_pair(pair, spec, config, args.workers)
    report = compare_rasters(rf, rg)
    write_ppm(rf, args.out_f)
    write_ppm(rg, args.out_g)
    write_report_json(report, args.report, threshold=args.threshold)
    print(f"decided agreement rate {report.decided_agreement_rate:.6f}")
    return 0 if report.decided_agreement_rate >= args.threshold else 1


def _cmd_classify_point(args) -> int:
    config = _config(args)
    if args.which == "g":
        fn = _pair(args).g_function
    else:
        fn = ExprFunction(parse(args.f))
    print(classify_point(fn, args.z, config).name)
    return 0


_COMMANDS = {
    "render": _cmd_render,
    "verify": _cmd_verify,
    "compare": _cmd_compare,
    "classify-point": _cmd_classify_point,
}


def run(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_normalise_argv(argv))
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        return _COMMANDS[args.command](args)
    except ParseError as exc:
        print(f"error: cannot parse expression: {exc.message} at position {exc.position}", file=sys.stderr)
        return 2
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main():
    sys.exit(run())
