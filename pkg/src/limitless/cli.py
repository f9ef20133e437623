"""Command-line front end.

Every verification and computation is a subcommand producing a
deterministic text, JSON, or csv-plot report.  Exit codes: 0 certified /
nothing found, 1 certified violation or refutation, 2 inconclusive or
premise not certified, 64 parse or configuration error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from typing import Optional

from . import control, integral, lipschitz
from .control import (
    ControlClaim,
    ControlFact,
    DisjointDomains,
    PremiseNotCertified,
    Status,
    check_bracket,
    falsify_control,
    glue_claims,
)
from .expr import EvalDomainError, FunctionSpec, ParseError, format_expr, parse, to_json
from .integral import PiecewisePlan, integrate_enclosure, integrate_piecewise
from .lipschitz import (
    LinqunCounterexample,
    NotLipschitz,
    SearchInconclusive,
    check_linqun,
    lipschitz_bound,
)
from .numeric import Interval, Precision, decimal_display
from .sampling import verification_pairs

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_INCONCLUSIVE = 2
EXIT_USAGE = 64

_PRECISION_ENV = "LIMITLESS_PRECISION_BITS"


class ConfigError(ValueError):
    pass


def _default_precision_bits() -> int:
    raw = os.environ.get(_PRECISION_ENV)
    if raw is None:
        return 64
    try:
        bits = int(raw)
    except ValueError:
        raise ConfigError(f"{_PRECISION_ENV} must be an integer, got {raw!r}")
    if bits < 8:
        raise ConfigError(f"{_PRECISION_ENV} must be >= 8, got {bits}")
    return bits


def _parse_fraction(text: str, what: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"{what} must be a rational like 3, -1/2; got {text!r}")


def _parse_domain(text: str, what: str = "domain") -> Interval:
    parts = text.split(",")
    if len(parts) != 2:
        raise ConfigError(f"{what} must be 'lo,hi'; got {text!r}")
    lo = _parse_fraction(parts[0], f"{what} lower end")
    hi = _parse_fraction(parts[1], f"{what} upper end")
    if lo >= hi:
        raise ConfigError(f"{what} needs lo < hi; got {text!r}")
    return Interval(lo, hi)


def _parse_breakpoints(text: Optional[str]) -> Optional[PiecewisePlan]:
    if text is None or text.strip() == "":
        return None
    points = tuple(_parse_fraction(part, "breakpoint") for part in text.split(","))
    return PiecewisePlan(tuple(sorted(points)))


def _parse_function(text: str, domain: Interval, what: str) -> FunctionSpec:
    expr = parse(text)
    try:
        return FunctionSpec(expr, domain)
    except EvalDomainError as exc:
        raise ConfigError(f"{what} {text!r} is not evaluable on {domain}: {exc}")


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--precision-bits", type=int, default=None,
                     help="enclosure precision in bits (default 64, env "
                          f"{_PRECISION_ENV} overrides)")
    sub.add_argument("--grid-n", type=int, default=64,
                     help="witness search grid density (default 64)")
    sub.add_argument("--budget", type=int, default=1000,
                     help="subintervals checked / falsification trials (default 1000)")
    sub.add_argument("--seed", type=int, default=0, help="sampling seed (default 0)")
    sub.add_argument("--output", choices=("text", "json", "csv-plot"), default="text")


def _config(args) -> dict:
    bits = args.precision_bits if args.precision_bits is not None else _default_precision_bits()
    if bits < 8:
        raise ConfigError("--precision-bits must be >= 8")
    if args.grid_n < 1 or args.budget < 1:
        raise ConfigError("--grid-n and --budget must be >= 1")
    return {
        "precision_bits": bits,
        "grid_n": args.grid_n,
        "budget": args.budget,
        "seed": args.seed,
        "output": args.output,
    }


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="limitless",
        description="Certified checks for quotient-control claims, Lipschitz slope "
                    "conditions, and integral enclosures over elementary functions.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("verify-control",
                        help="sweep a control claim over seeded subintervals")
    p.add_argument("--F", required=True, help="controlled function expression")
    p.add_argument("--f", required=True, help="claimed control function expression")
    p.add_argument("--domain", required=True, help="claim interval as lo,hi")
    p.add_argument("--window", default=None,
                   help="bounded window standing in for an unbounded claim domain")
    _add_common(p)

    p = subs.add_parser("integrate", help="certified enclosure of a definite integral")
    p.add_argument("--f", required=True)
    p.add_argument("--u", required=True)
    p.add_argument("--v", required=True)
    p.add_argument("--n", type=int, default=1000, help="equal subdivisions (default 1000)")
    p.add_argument("--breakpoints", default=None,
                   help="comma-separated interior breakpoints to split at")
    _add_common(p)

    p = subs.add_parser("approx",
                        help="error-bounded approximation through a monotone control")
    p.add_argument("--F", required=True)
    p.add_argument("--f", required=True)
    p.add_argument("--base", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--assume-monotone", action="store_true",
                   help="skip the monotonicity certification of the control")
    _add_common(p)

    p = subs.add_parser("lipschitz", help="certified Lipschitz constant via derivative range")
    p.add_argument("--f", required=True)
    p.add_argument("--domain", required=True)
    _add_common(p)

    p = subs.add_parser("linqun", help="sample the slope-control inequality")
    p.add_argument("--f", required=True)
    p.add_argument("--g", required=True)
    p.add_argument("--domain", required=True)
    p.add_argument("--M", required=True)
    p.add_argument("--samples", type=int, default=1000)
    _add_common(p)

    p = subs.add_parser("nl-check",
                        help="compare F(v) - F(u) against the integral enclosure of f")
    p.add_argument("--F", required=True)
    p.add_argument("--f", required=True)
    p.add_argument("--u", required=True)
    p.add_argument("--v", required=True)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--breakpoints", default=None)
    _add_common(p)

    p = subs.add_parser("shape", help="shape of the controlled function from a control fact")
    p.add_argument("--F", required=True)
    p.add_argument("--f", required=True)
    p.add_argument("--domain", required=True)
    p.add_argument("--fact", required=True,
                   choices=[fact.value for fact in ControlFact])
    _add_common(p)

    p = subs.add_parser("glue", help="glue two claims on overlapping intervals")
    p.add_argument("--F", required=True)
    p.add_argument("--f", required=True)
    p.add_argument("--domain-a", required=True)
    p.add_argument("--domain-b", required=True)
    _add_common(p)

    p = subs.add_parser("fmt", help="parse and canonically reprint an expression")
    p.add_argument("expression")
    _add_common(p)

    return parser


def _emit(report: dict, cfg: dict, out) -> None:
    if cfg["output"] == "json":
        print(json.dumps(report, sort_keys=True, indent=2), file=out)
        return
    for key, value in sorted(report.items()):
        if key in ("schema", "checks", "rows"):
            continue
        print(f"{key}: {json.dumps(value, sort_keys=True)}", file=out)


def _base_report(command: str, cfg: dict) -> dict:
    return {
        "schema": 1,
        "command": command,
        "config": {k: v for k, v in cfg.items() if k != "output"},
    }


def _cmd_verify_control(args, cfg, out) -> int:
    domain = _parse_domain(args.window if args.window else args.domain)
    claim = ControlClaim(
        controlled=_parse_function(args.F, domain, "--F"),
        control=_parse_function(args.f, domain, "--f"),
        domain=domain,
    )
    prec = Precision(cfg["precision_bits"])
    checks = []
    counts = {"certified": 0, "refuted": 0, "inconclusive": 0}
    violation = None
    stream = verification_pairs(domain, cfg["seed"])
    for _ in range(cfg["budget"]):
        u, v = next(stream)
        verdict = check_bracket(claim, u, v, grid_n=cfg["grid_n"], prec=prec)
        counts[verdict.status.value] += 1
        entry = {"u": str(u), "v": str(v), "status": verdict.status.value}
        if verdict.witness is not None:
            entry.update(verdict.witness.as_json())
        checks.append(entry)
        if verdict.status is Status.REFUTED and violation is None:
            violation = verdict.violation
    if violation is None:
        violation = falsify_control(claim, budget=cfg["budget"], seed=cfg["seed"],
                                    prec=prec)
    witnesses = [c for c in checks if c["status"] == "certified"]
    report = _base_report("verify-control", cfg)
    report.update({
        "claim": claim.as_json(),
        "subintervals_checked": len(checks),
        "certified": counts["certified"],
        "refuted": counts["refuted"],
        "inconclusive": counts["inconclusive"],
        "all_endpoint_witnesses": bool(witnesses) and all(w["endpoint"] for w in witnesses),
        "all_strict": bool(witnesses) and all(w["strict"] for w in witnesses),
        "violation": violation.as_json() if violation is not None else None,
        "checks": checks,
    })
    _emit(report, cfg, out)
    if violation is not None:
        return EXIT_VIOLATION
    if counts["inconclusive"]:
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def _cmd_integrate(args, cfg, out) -> int:
    u = _parse_fraction(args.u, "--u")
    v = _parse_fraction(args.v, "--v")
    if u >= v:
        raise ConfigError("--u must be below --v")
    if args.n < 1:
        raise ConfigError("--n must be >= 1")
    f = _parse_function(args.f, Interval(u, v), "--f")
    plan = _parse_breakpoints(args.breakpoints)
    prec = Precision(cfg["precision_bits"])
    if plan is not None:
        enclosure = integrate_piecewise(f, plan, u, v, args.n, prec)
    else:
        enclosure = integrate_enclosure(f, u, v, args.n, prec)
    if cfg["output"] == "csv-plot":
        print("# decimals are display-only approximations", file=out)
        print("k,x_lo,x_hi,cell_lo,cell_hi", file=out)
        cuts = [u, *(plan.breakpoints if plan else ()), v]
        k = 0
        for a, b in zip(cuts, cuts[1:]):
            piece_step = (b - a) / args.n
            for i in range(args.n):
                c_lo = a + piece_step * i
                c_hi = b if i == args.n - 1 else a + piece_step * (i + 1)
                cell = f.eval_enclosure(Interval(c_lo, c_hi), prec)
                print(",".join((str(k), decimal_display(c_lo), decimal_display(c_hi),
                                decimal_display(cell.lo), decimal_display(cell.hi))),
                      file=out)
                k += 1
        return EXIT_OK
    report = _base_report("integrate", cfg)
    report.update({
        "integrand": format_expr(f.body),
        "enclosure": enclosure.as_json(),
        "breakpoints": [str(b) for b in plan.breakpoints] if plan else [],
    })
    _emit(report, cfg, out)
    return EXIT_OK


def _cmd_approx(args, cfg, out) -> int:
    base = _parse_fraction(args.base, "--base")
    target = _parse_fraction(args.target, "--target")
    lo, hi = (base, target) if base <= target else (target, base)
    span = Interval(lo, hi) if lo < hi else Interval(lo - 1, hi + 1)
    F = _parse_function(args.F, span, "--F")
    f = _parse_function(args.f, span, "--f")
    prec = Precision(cfg["precision_bits"])
    approx, error_bound = control.approximate_with_error(
        F, f, base, target, prec, assume_monotone=args.assume_monotone)
    report = _base_report("approx", cfg)
    report.update({
        "controlled": format_expr(F.body),
        "control": format_expr(f.body),
        "base": str(base),
        "target": str(target),
        "approx": str(approx),
        "approx_decimal": decimal_display(approx),
        "error_bound": str(error_bound),
        "error_bound_decimal": decimal_display(error_bound),
        "monotonicity_assumed": bool(args.assume_monotone),
        "decimals_display_only": True,
    })
    _emit(report, cfg, out)
    return EXIT_OK


def _cmd_lipschitz(args, cfg, out) -> int:
    domain = _parse_domain(args.domain)
    f = _parse_function(args.f, domain, "--f")
    prec = Precision(cfg["precision_bits"])
    result = lipschitz_bound(f, domain, prec)
    report = _base_report("lipschitz", cfg)
    report["function"] = format_expr(f.body)
    if isinstance(result, NotLipschitz):
        report["not_lipschitz"] = result.as_json()
        _emit(report, cfg, out)
        return EXIT_VIOLATION if result.definite else EXIT_INCONCLUSIVE
    report["certificate"] = result.as_json()
    _emit(report, cfg, out)
    return EXIT_OK


def _cmd_linqun(args, cfg, out) -> int:
    domain = _parse_domain(args.domain)
    f = _parse_function(args.f, domain, "--f")
    g = _parse_function(args.g, domain, "--g")
    M = _parse_fraction(args.M, "--M")
    prec = Precision(cfg["precision_bits"])
    try:
        result = check_linqun(f, g, domain, M, sample_n=args.samples, prec=prec,
                              seed=cfg["seed"])
    except SearchInconclusive as exc:
        report = _base_report("linqun", cfg)
        report.update({"passed": None, "detail": str(exc)})
        _emit(report, cfg, out)
        return EXIT_INCONCLUSIVE
    report = _base_report("linqun", cfg)
    if isinstance(result, LinqunCounterexample):
        report.update({"passed": False, "counterexample": result.as_json()})
        _emit(report, cfg, out)
        return EXIT_VIOLATION
    report.update({"passed": True, "report": result.as_json()})
    _emit(report, cfg, out)
    return EXIT_OK


def _cmd_nl_check(args, cfg, out) -> int:
    u = _parse_fraction(args.u, "--u")
    v = _parse_fraction(args.v, "--v")
    if u > v:
        raise ConfigError("--u must not exceed --v")
    if args.n < 1:
        raise ConfigError("--n must be >= 1")
    span = Interval(u, v) if u < v else Interval(u - 1, v + 1)
    F = _parse_function(args.F, span, "--F")
    f = _parse_function(args.f, span, "--f")
    plan = _parse_breakpoints(args.breakpoints)
    prec = Precision(cfg["precision_bits"])
    if u == v:
        enclosure = None
    elif plan is not None:
        enclosure = integrate_piecewise(f, plan, u, v, args.n, prec)
    else:
        enclosure = integrate_enclosure(f, u, v, args.n, prec)
    verdict = integral.newton_leibniz_check(F, f, u, v, args.n, prec,
                                            plan=plan, enclosure=enclosure)
    report = _base_report("nl-check", cfg)
    report.update({
        "antiderivative": format_expr(F.body),
        "integrand": format_expr(f.body),
        "u": str(u),
        "v": str(v),
        "verdict": verdict.as_json(),
        "integral_enclosure": enclosure.as_json() if enclosure is not None else None,
    })
    _emit(report, cfg, out)
    if verdict.status is Status.CERTIFIED:
        return EXIT_OK
    if verdict.status is Status.REFUTED:
        return EXIT_VIOLATION
    return EXIT_INCONCLUSIVE


def _cmd_shape(args, cfg, out) -> int:
    domain = _parse_domain(args.domain)
    claim = ControlClaim(
        controlled=_parse_function(args.F, domain, "--F"),
        control=_parse_function(args.f, domain, "--f"),
        domain=domain,
    )
    prec = Precision(cfg["precision_bits"])
    shape = control.infer_shape(claim, ControlFact(args.fact), prec,
                                grid_points=cfg["grid_n"], claim_status="assumed")
    report = _base_report("shape", cfg)
    report.update({"claim": claim.as_json(), "shape": shape.as_json()})
    _emit(report, cfg, out)
    return EXIT_OK


def _cmd_glue(args, cfg, out) -> int:
    domain_a = _parse_domain(args.domain_a, "--domain-a")
    domain_b = _parse_domain(args.domain_b, "--domain-b")
    claim_a = ControlClaim(
        controlled=_parse_function(args.F, domain_a, "--F"),
        control=_parse_function(args.f, domain_a, "--f"),
        domain=domain_a,
    )
    claim_b = ControlClaim(
        controlled=_parse_function(args.F, domain_b, "--F"),
        control=_parse_function(args.f, domain_b, "--f"),
        domain=domain_b,
    )
    glued = glue_claims(claim_a, claim_b)
    report = _base_report("glue", cfg)
    report["claim"] = glued.as_json()
    _emit(report, cfg, out)
    return EXIT_OK


def _cmd_fmt(args, cfg, out) -> int:
    expr = parse(args.expression)
    report = _base_report("fmt", cfg)
    report.update({
        "input": args.expression,
        "formatted": format_expr(expr),
        "ast": to_json(expr),
    })
    if cfg["output"] == "json":
        _emit(report, cfg, out)
    else:
        print(report["formatted"], file=out)
    return EXIT_OK


_COMMANDS = {
    "verify-control": _cmd_verify_control,
    "integrate": _cmd_integrate,
    "approx": _cmd_approx,
    "lipschitz": _cmd_lipschitz,
    "linqun": _cmd_linqun,
    "nl-check": _cmd_nl_check,
    "shape": _cmd_shape,
    "glue": _cmd_glue,
    "fmt": _cmd_fmt,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; normalize to the config code
        return EXIT_USAGE if exc.code not in (0, None) else 0
    out = sys.stdout
    try:
        cfg = _config(args)
        return _COMMANDS[args.command](args, cfg, out)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConfigError, DisjointDomains, EvalDomainError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PremiseNotCertified as exc:
        print(f"premise not certified: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE


if __name__ == "__main__":
    sys.exit(main())
