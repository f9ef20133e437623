import random
from fractions import Fraction as F

import pytest

from limitless.control import (
    ControlClaim,
    ControlFact,
    DisjointDomains,
    PremiseNotCertified,
    ShapeProperty,
    Status,
    approximate_with_error,
    check_bracket,
    cubic_claim,
    cubic_control_certificate,
    difference_quotient,
    falsify_control,
    glue_claims,
    infer_shape,
    reverify_violation,
    reverify_witness,
)
from limitless.expr import FunctionSpec, parse
from limitless.numeric import Interval, Precision
from limitless.sampling import verification_pairs


def claim_of(F_text, f_text, lo, hi, pieces=()):
    domain = Interval(lo, hi)
    return ControlClaim(
        controlled=FunctionSpec(parse(F_text), domain),
        control=FunctionSpec(parse(f_text), domain),
        domain=domain,
        pieces=pieces,
    )


def test_difference_quotient_examples():
    sq = FunctionSpec(parse("x^2"), Interval(0, 10))
    dq = difference_quotient(sq, F(1), F(2))
    assert dq == 3
    assert 2 * 1 < dq < 2 * 2
    cube = FunctionSpec(parse("x^3"), Interval(0, 10))
    assert difference_quotient(cube, F(1), F(2)) == 7
    const = FunctionSpec(parse("5"), Interval(0, 10))
    assert difference_quotient(const, F(2), F(7)) == 0
    with pytest.raises(ValueError):
        difference_quotient(sq, F(1), F(1))


def test_difference_quotient_enclosure():
    root = FunctionSpec(parse("sqrt(x)"), Interval(1, 16))
    dq = difference_quotient(root, F(9), F(10))
    assert isinstance(dq, Interval)
    # true value is sqrt(10) - 3 = 0.1622776...
    assert dq.lo <= F(16228, 100000)
    assert dq.hi >= F(16227, 100000)
    assert dq.width <= F(1, 1 << 32)


def test_check_bracket_certifies_with_endpoints():
    claim = claim_of("x^2", "2*x", 0, 10)
    verdict = check_bracket(claim, F(1), F(2))
    assert verdict.status is Status.CERTIFIED
    w = verdict.witness
    assert (w.p, w.q) == (F(1), F(2))
    assert w.endpoint and w.strict
    assert w.dq == 3


def test_check_bracket_refutes():
    claim = claim_of("x^2", "3*x", 1, 3)
    verdict = check_bracket(claim, F(2), F(3))
    assert verdict.status is Status.REFUTED
    violation = verdict.violation
    assert violation.dq_lo == violation.dq_hi == 5
    assert violation.range_lo == 6 and violation.range_hi == 9
    assert violation.side == "no_p"
    assert reverify_violation(claim, violation)


def test_check_bracket_constant_claim():
    claim = claim_of("7", "0", 0, 5)
    verdict = check_bracket(claim, F(1), F(3))
    assert verdict.status is Status.CERTIFIED
    assert verdict.witness.p == verdict.witness.q == F(1)


def test_check_bracket_validates_inputs():
    claim = claim_of("x^2", "2*x", 0, 10)
    with pytest.raises(ValueError):
        check_bracket(claim, F(2), F(1))
    with pytest.raises(ValueError):
        check_bracket(claim, F(-1), F(2))


def test_falsify_finds_violation():
    claim = claim_of("x^2", "3*x", 1, 3)
    violation = falsify_control(claim, budget=100, seed=0)
    assert violation is not None
    assert reverify_violation(claim, violation)
    # reproducible from its recorded parameters
    direct = check_bracket(claim, violation.u, violation.v,
                           prec=Precision(violation.prec_bits))
    assert direct.status is Status.REFUTED


def test_falsify_not_found_on_valid_claim():
    claim = claim_of("x^2", "2*x", 0, 10)
    assert falsify_control(claim, budget=1000, seed=0) is None


def test_wide_interval_dependency_does_not_crash():
    # 1 / (x^2 - x + 1) is pole free on [0, 1] but a whole-interval
    # evaluation loses the denominator's sign; searches must stay graceful
    # and must never produce a refutation from a failed range evaluation.
    claim = claim_of("x^2", "1 / (x^2 - x + 1)", 0, 1)
    violation = falsify_control(claim, budget=50, seed=0)
    if violation is not None:
        assert reverify_violation(claim, violation)
    verdict = check_bracket(claim, F(0), F(1))
    assert verdict.status in (Status.CERTIFIED, Status.INCONCLUSIVE)


_FAMILIES = [
    ("x^2", "2*x"),
    ("x^3", "3*x^2"),
    ("sqrt(x)", "1/(2*sqrt(x))"),
    ("1/x", "-1/x^2"),
]


def test_families_certify_with_endpoint_witnesses():
    for F_text, f_text in _FAMILIES:
        claim = claim_of(F_text, f_text, F(1, 10), 100)
        stream = verification_pairs(claim.domain, seed=3)
        for _ in range(60):
            u, v = next(stream)
            verdict = check_bracket(claim, u, v)
            assert verdict.status is Status.CERTIFIED, (F_text, str(u), str(v))
            assert verdict.witness.endpoint
            assert verdict.witness.strict


def test_falsify_inexact_claim():
    # 1/sqrt(x) always exceeds the quotient of sqrt(x), so the claim is
    # refutable only through certified enclosure comparisons.
    claim = claim_of("sqrt(x)", "1/sqrt(x)", 1, 9)
    violation = falsify_control(claim, budget=200, seed=0)
    assert violation is not None
    assert violation.side == "no_p"
    assert reverify_violation(claim, violation, factor=4)


def test_witness_soundness_at_doubled_precision():
    for F_text, f_text in _FAMILIES:
        claim = claim_of(F_text, f_text, F(1, 10), 100)
        stream = verification_pairs(claim.domain, seed=9)
        for _ in range(20):
            u, v = next(stream)
            verdict = check_bracket(claim, u, v)
            assert reverify_witness(claim, verdict.witness, Precision(128))


def test_glue_claims():
    B = 5
    left = claim_of("x^3", "3*x^2", -B, 0)
    right = claim_of("x^3", "3*x^2", 0, B)
    glued = glue_claims(left, right)
    assert glued.domain == Interval(-B, B)
    assert glued.pieces == (Interval(-B, 0), Interval(0, B))
    verdict = check_bracket(glued, F(-1), F(2))
    assert verdict.status is Status.CERTIFIED
    assert reverify_witness(glued, verdict.witness, Precision(128))


def test_glue_disjoint_raises():
    a = claim_of("x^2", "2*x", 0, 1)
    b = claim_of("x^2", "2*x", 2, 3)
    with pytest.raises(DisjointDomains):
        glue_claims(a, b)


def test_glue_union_domain():
    a = claim_of("x^2", "2*x", 0, 2)
    b = claim_of("x^2", "2*x", 1, 3)
    assert glue_claims(a, b).domain == Interval(0, 3)


def test_glue_agrees_inside_one_piece():
    left = claim_of("x^3", "3*x^2", -4, 0)
    right = claim_of("x^3", "3*x^2", 0, 4)
    glued = glue_claims(left, right)
    direct = claim_of("x^3", "3*x^2", 0, 4)
    for u, v in ((F(1), F(2)), (F(1, 2), F(3)), (F(0), F(4))):
        a = check_bracket(glued, u, v)
        b = check_bracket(direct, u, v)
        assert a.status == b.status == Status.CERTIFIED


def test_cubic_certificate_examples():
    window = Interval(-10, 10)
    for a, b, c in ((F(0), F(0), F(0)), (F(3), F(1), F(5)), (F(-7, 2), F(2, 3), F(1))):
        verdict = cubic_control_certificate(a, b, c, window)
        assert verdict.status is Status.CERTIFIED
        assert str(-a / 3) in verdict.detail


def test_cubic_certificate_agrees_with_bracket_checks():
    rng = random.Random(21)
    window = Interval(-8, 8)
    for _ in range(10):
        a = F(rng.randrange(-12, 13), rng.randrange(1, 5))
        b = F(rng.randrange(-12, 13), rng.randrange(1, 5))
        c = F(rng.randrange(-12, 13), rng.randrange(1, 5))
        assert cubic_control_certificate(a, b, c, window).status is Status.CERTIFIED
        claim = cubic_claim(a, b, c, window)
        stream = verification_pairs(window, seed=4)
        for _ in range(15):
            u, v = next(stream)
            assert check_bracket(claim, u, v, grid_n=16).status is Status.CERTIFIED


def test_infer_shape_positive_implies_increasing():
    claim = claim_of("x^2", "2*x", 1, 5)
    report = infer_shape(claim, ControlFact.POSITIVE)
    assert report.property is ShapeProperty.INCREASING
    assert report.rule == "positive-control-implies-increasing"


def test_infer_shape_increasing_implies_convex_down():
    claim = claim_of("x^2", "2*x", 0, 5)
    report = infer_shape(claim, ControlFact.INCREASING)
    assert report.property is ShapeProperty.CONVEX_DOWN


def test_infer_shape_premise_failure():
    claim = claim_of("x^3", "3*x^2", -1, 1)
    with pytest.raises(PremiseNotCertified):
        infer_shape(claim, ControlFact.POSITIVE)


def test_infer_shape_all_six_rules():
    cases = [
        ("5", "0", 0, 1, ControlFact.IDENTICALLY_ZERO, ShapeProperty.CONSTANT),
        ("3*x + 2", "3", 0, 1, ControlFact.IDENTICALLY_CONST, ShapeProperty.LINEAR),
        ("x^2", "2*x", 1, 5, ControlFact.POSITIVE, ShapeProperty.INCREASING),
        ("1/x", "-1/x^2", F(1, 2), 2, ControlFact.NEGATIVE, ShapeProperty.DECREASING),
        ("x^2", "2*x", 0, 5, ControlFact.INCREASING, ShapeProperty.CONVEX_DOWN),
        ("sqrt(x)", "1/(2*sqrt(x))", F(1, 4), 4, ControlFact.DECREASING,
         ShapeProperty.CONVEX_UP),
    ]
    for F_text, f_text, lo, hi, fact, expected in cases:
        report = infer_shape(claim_of(F_text, f_text, lo, hi), fact)
        assert report.property is expected, (F_text, fact)


def test_approximate_with_error_root_ten():
    span = Interval(9, 10)
    Fsp = FunctionSpec(parse("sqrt(x)"), span)
    fsp = FunctionSpec(parse("1/(2*sqrt(x))"), span)
    approx, bound = approximate_with_error(Fsp, fsp, F(9), F(10))
    assert approx == F(19, 6)
    assert bound <= F(1, 114)
    # soundness against a high-precision enclosure of the true value
    from limitless.numeric import sqrt_enclosure

    true = sqrt_enclosure(Interval(10, 10), Precision(128))
    assert abs(true.lo - approx) <= bound and abs(true.hi - approx) <= bound


def test_approximate_with_error_square():
    span = Interval(3, F(10, 3))
    approx, bound = approximate_with_error(
        FunctionSpec(parse("x^2"), span), FunctionSpec(parse("2*x"), span),
        F(3), F(10, 3))
    assert approx == 11
    assert bound == F(2, 9)
    assert abs(F(100, 9) - approx) <= bound


def test_root_ten_error_chain_certified():
    # The sharp form of the error: 1/(6*(3*sqrt(10) + 10)) < 1/114,
    # certified by an upper bound built from the sqrt enclosure.
    from limitless.numeric import sqrt_enclosure

    s10 = sqrt_enclosure(Interval(10, 10), Precision(64))
    chain_upper = 1 / (6 * (3 * s10.lo + 10))
    assert chain_upper < F(1, 114)


def test_step_control_brackets_via_grid():
    claim = claim_of("abs(x)", "sgn(x)", -1, 2)
    for u, v in ((F(-1, 2), F(1)), (F(-1), F(2)), (F(-3, 4), F(1, 4))):
        verdict = check_bracket(claim, u, v)
        assert verdict.status is Status.CERTIFIED
        w = verdict.witness
        assert w.u <= w.p <= w.v and w.u <= w.q <= w.v


def test_approximate_degenerate():
    span = Interval(8, 10)
    approx, bound = approximate_with_error(
        FunctionSpec(parse("x^2"), span), FunctionSpec(parse("2*x"), span),
        F(9), F(9))
    assert (approx, bound) == (81, 0)


def test_approximate_requires_monotone_premise():
    span = Interval(-1, 1)
    Fsp = FunctionSpec(parse("x^3"), span)  # wrong pairing on purpose
    fsp = FunctionSpec(parse("sgn(x)"), span)
    with pytest.raises(PremiseNotCertified):
        approximate_with_error(Fsp, fsp, F(0), F(1))


def test_approximate_reverse_direction():
    span = Interval(8, 9)
    Fsp = FunctionSpec(parse("x^2"), span)
    fsp = FunctionSpec(parse("2*x"), span)
    approx, bound = approximate_with_error(Fsp, fsp, F(9), F(8))
    assert approx == 81 + 18 * (8 - 9)
    assert abs(F(64) - approx) <= bound


def test_verdict_json_round_trip_fields():
    claim = claim_of("x^2", "2*x", 0, 10)
    verdict = check_bracket(claim, F(1), F(2))
    doc = verdict.as_json()
    assert doc["status"] == "certified"
    assert doc["witness"]["p"] == "1"
    assert doc["witness"]["dq_lo"] == "3"
    assert doc["precision_bits"] == 64
