"""Acceptance suite: one test per criterion, one printed line per verdict.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the pass lines.
Every tolerance is pinned here as an exact rational comparison.
"""

import json
import random
import time
from fractions import Fraction as F

from limitless.control import (
    ControlClaim,
    ControlFact,
    ShapeProperty,
    Status,
    check_bracket,
    cubic_claim,
    cubic_control_certificate,
    falsify_control,
    infer_shape,
)
from limitless.expr import FunctionSpec, format_expr, parse
from limitless.integral import PiecewisePlan, integrate_enclosure, integrate_piecewise
from limitless.lipschitz import (
    LinqunCounterexample,
    LinqunReport,
    check_linqun,
    control_is_2M_lipschitz,
    find_bracket_by_subdivision,
)
from limitless.numeric import Interval, interval_arith, rat_arith
from limitless.sampling import verification_pairs


def _ok(criterion: int, message: str) -> None:
    print(f"ACCEPTANCE {criterion:02d} PASS - {message}")


def _run_cli(args):
    import contextlib
    import io

    from limitless.cli import main

    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = main(args)
    return code, buf.getvalue()


def test_criterion_01_approximation_of_root_ten():
    start = time.monotonic()
    code, out = _run_cli([
        "approx", "--F", "sqrt(x)", "--f", "1/(2*sqrt(x))",
        "--base", "9", "--target", "10", "--output", "json",
    ])
    elapsed = time.monotonic() - start
    assert code == 0
    rep = json.loads(out)
    assert F(rep["approx"]) == F(19, 6)
    assert F(rep["error_bound"]) <= F(1, 114)
    assert elapsed < 1.0
    _ok(1, f"approx 19/6, certified error <= 1/114, {elapsed:.3f}s")


def test_criterion_02_section_one_families():
    families = [
        ("x^2", "2*x"),
        ("x^3", "3*x^2"),
        ("sqrt(x)", "1/(2*sqrt(x))"),
        ("1/x", "-1/x^2"),
    ]
    start = time.monotonic()
    for F_text, f_text in families:
        code, out = _run_cli([
            "verify-control", "--F", F_text, f"--f={f_text}",
            "--domain", "1/10,100", "--budget", "1000", "--output", "json",
        ])
        assert code == 0, F_text
        rep = json.loads(out)
        assert rep["subintervals_checked"] == 1000
        assert rep["certified"] == 1000
        certified = [c for c in rep["checks"] if c["status"] == "certified"]
        assert all(c["endpoint"] for c in certified), F_text
        assert all(c["strict"] for c in certified), F_text
    elapsed = time.monotonic() - start
    assert elapsed < 10.0
    _ok(2, f"4 families x 1000 subintervals, endpoint witnesses, {elapsed:.2f}s")


def test_criterion_03_falsification():
    domain = Interval(1, 3)
    claim = ControlClaim(
        FunctionSpec(parse("x^2"), domain),
        FunctionSpec(parse("3*x"), domain),
        domain,
    )
    violation = falsify_control(claim, budget=100, seed=0)
    assert violation is not None
    # exact rational re-check of the recorded obligation
    if violation.side == "no_p":
        assert violation.range_lo > violation.dq_hi
    else:
        assert violation.range_hi < violation.dq_lo
    _ok(3, f"certified violation on [{violation.u}, {violation.v}] within budget 100")


def test_criterion_04_quadrature_width_law():
    f = FunctionSpec(parse("x^2"), Interval(0, 1))
    enc = integrate_enclosure(f, F(0), F(1), 1000, M=F(2))
    assert enc.contains(F(1, 3))
    assert enc.width <= F(1, 500)
    doubled = integrate_enclosure(f, F(0), F(1), 2000, M=F(2))
    assert doubled.width * 2 == enc.width
    _ok(4, f"width {enc.width} <= 1/500 at n=1000; doubling n halves it exactly")


def test_criterion_05_newton_leibniz_suite():
    library = [
        ("x^3", "3*x^2", "0", "1", None),
        ("x^2", "2*x", "0", "1", None),
        ("sqrt(x)", "1/(2*sqrt(x))", "1/4", "4", None),
        ("sin(x)", "cos(x)", "0", "1", None),
        ("abs(x)", "sgn(x)", "-1", "2", "0"),
    ]
    for F_text, f_text, u, v, breaks in library:
        args = ["nl-check", "--F", F_text, f"--f={f_text}", f"--u={u}",
                f"--v={v}", "--n", "2000", "--output", "json"]
        if breaks is not None:
            args += ["--breakpoints", breaks]
        code, out = _run_cli(args)
        rep = json.loads(out)
        assert code == 0 and rep["verdict"]["status"] == "certified", F_text
    code, out = _run_cli([
        "nl-check", "--F", "x^3", "--f", "2*x", "--u", "0", "--v", "1/2",
        "--n", "2000", "--output", "json",
    ])
    rep = json.loads(out)
    assert code == 1 and rep["verdict"]["status"] == "refuted"
    _ok(5, "pair library certified at n=2000; negative control refuted")


def test_criterion_06_sign_integration():
    f = FunctionSpec(parse("sgn(x)"), Interval(-1, 2))
    plan = PiecewisePlan((F(0),))
    for n in (100, 300, 2000):
        enc = integrate_piecewise(f, plan, F(-1), F(2), n)
        assert enc.contains(1)
        assert enc.width <= F(6, n)
    _ok(6, "sgn on [-1, 2] encloses 1 with width <= 6/n for n in {100, 300, 2000}")


def test_criterion_07_linqun_suite():
    domain = Interval(0, 1)
    f = FunctionSpec(parse("x^2"), domain)
    g = FunctionSpec(parse("2*x"), domain)
    report = check_linqun(f, g, domain, F(2), sample_n=10000, seed=0)
    assert isinstance(report, LinqunReport)
    assert report.samples_checked >= 10 ** 4
    assert report.worst_slack >= 0
    verdict = control_is_2M_lipschitz(f, g, domain, F(2), sample_n=10000,
                                      report=report, seed=0)
    assert verdict.status is Status.CERTIFIED
    abs_domain = Interval(-1, 1)
    fa = FunctionSpec(parse("abs(x)"), abs_domain)
    ga = FunctionSpec(parse("sgn(x)"), abs_domain)
    for m in (F(1), F(10 ** 3), F(10 ** 6)):
        outcome = check_linqun(fa, ga, abs_domain, m, sample_n=20000, seed=0)
        assert isinstance(outcome, LinqunCounterexample), m
        assert outcome.gap_lower > outcome.bound
    _ok(7, "slope inequality passes on 10^4 samples with slack >= 0; 2M bound "
           "certified; |x|/sgn counterexamples up to M = 10^6")


def test_criterion_08_constructive_bracket_search():
    domain = Interval(-1, 1)
    f = FunctionSpec(parse("x^3"), domain)
    g = FunctionSpec(parse("3*x^2"), domain)
    p, q = find_bracket_by_subdivision(f, g, F(6), F(-1), F(1))
    assert 3 * p * p <= 1
    assert 3 * q * q >= 1
    _ok(8, f"bracket points p={p}, q={q} satisfy 3p^2 <= 1 <= 3q^2 exactly")


def test_criterion_09_cubic_certificates():
    rng = random.Random(99)
    window = Interval(-8, 8)
    for trial in range(100):
        a = F(rng.randrange(-20, 21), rng.randrange(1, 6))
        b = F(rng.randrange(-20, 21), rng.randrange(1, 6))
        c = F(rng.randrange(-20, 21), rng.randrange(1, 6))
        verdict = cubic_control_certificate(a, b, c, window)
        assert verdict.status is Status.CERTIFIED, (a, b, c)
        claim = cubic_claim(a, b, c, window)
        stream = verification_pairs(window, seed=trial)
        for _ in range(100):
            u, v = next(stream)
            check = check_bracket(claim, u, v, grid_n=16)
            assert check.status is Status.CERTIFIED, (a, b, c, str(u), str(v))
    _ok(9, "100 random cubics: coefficient identities exact, 100 bracket "
           "checks each agree")


def test_criterion_10_property_suites():
    # Interval containment soundness over 10^4 random rational probes.
    rng = random.Random(1234)
    ops = ("add", "sub", "mul", "div")
    probes = 0
    while probes < 10 ** 4:
        a_lo = F(rng.randrange(-60, 60), rng.randrange(1, 12))
        a = Interval(a_lo, a_lo + F(rng.randrange(0, 40), rng.randrange(1, 12)))
        b_lo = F(rng.randrange(-60, 60), rng.randrange(1, 12))
        b = Interval(b_lo, b_lo + F(rng.randrange(0, 40), rng.randrange(1, 12)))
        op = ops[rng.randrange(4)]
        if op == "div" and b.lo <= 0 <= b.hi:
            continue
        x = a.lo if a.width == 0 else a.lo + a.width * F(rng.randrange(0, 65), 64)
        y = b.lo if b.width == 0 else b.lo + b.width * F(rng.randrange(0, 65), 64)
        assert interval_arith(a, b, op).contains(rat_arith(x, y, op))
        probes += 1

    # Parser round trip: 50-expression corpus plus 1000 generated trees.
    from test_expr import _CORPUS, random_expr

    for text in _CORPUS:
        e = parse(text)
        assert parse(format_expr(e)) == e
    gen_rng = random.Random(777)
    for _ in range(1000):
        e = random_expr(gen_rng, gen_rng.randrange(1, 5))
        assert parse(format_expr(e)) == e

    # Shape inference spot checks, all six implications.
    shape_cases = [
        ("5", "0", F(0), F(1), ControlFact.IDENTICALLY_ZERO, ShapeProperty.CONSTANT),
        ("3*x + 2", "3", F(0), F(1), ControlFact.IDENTICALLY_CONST, ShapeProperty.LINEAR),
        ("x^2", "2*x", F(1), F(5), ControlFact.POSITIVE, ShapeProperty.INCREASING),
        ("1/x", "-1/x^2", F(1, 2), F(2), ControlFact.NEGATIVE, ShapeProperty.DECREASING),
        ("x^2", "2*x", F(0), F(5), ControlFact.INCREASING, ShapeProperty.CONVEX_DOWN),
        ("sqrt(x)", "1/(2*sqrt(x))", F(1, 4), F(4), ControlFact.DECREASING,
         ShapeProperty.CONVEX_UP),
    ]
    for F_text, f_text, lo, hi, fact, expected in shape_cases:
        domain = Interval(lo, hi)
        claim = ControlClaim(FunctionSpec(parse(F_text), domain),
                             FunctionSpec(parse(f_text), domain), domain)
        assert infer_shape(claim, fact).property is expected

    # Determinism: byte-identical JSON across two runs.
    args = ["verify-control", "--F", "x^3", "--f", "3*x^2", "--domain", "1/10,100",
            "--budget", "50", "--seed", "11", "--output", "json"]
    out1 = _run_cli(args)
    out2 = _run_cli(args)
    assert out1 == out2
    _ok(10, "containment soundness (10^4 probes), parser round trip (50 + 1000), "
            "six shape rules, deterministic reports")
