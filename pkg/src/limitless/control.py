"""Verification of difference-quotient control claims.

A claim says: for every u < v inside the claim domain there are points
p, q in [u, v] with  f(p) <= (F(v) - F(u)) / (v - u) <= f(q).  The
checker either certifies one subinterval with a concrete witness pair,
refutes it with a certified range bound that excludes the quotient, or
reports that finite precision could not decide.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Optional, Union

from . import sampling
from .expr import (
    EvalDomainError,
    FunctionSpec,
    eval_enclosure,
    eval_exact,
    format_expr,
    symbolic_derivative,
)
from .numeric import DEFAULT_PRECISION, Interval, Precision


class PremiseNotCertified(Exception):
    """A required premise (monotonicity, sign, exactness) was not certified."""


class DisjointDomains(ValueError):
    """Claims cannot be glued because their domains do not touch."""


class Status(str, Enum):
    CERTIFIED = "certified"
    REFUTED = "refuted"
    INCONCLUSIVE = "inconclusive"


Bounds = tuple[Fraction, Fraction]  # certified (lower, upper) of a single value


@dataclass(frozen=True)
class BracketWitness:
    u: Fraction
    v: Fraction
    p: Fraction
    q: Fraction
    dq: Union[Fraction, Interval]
    strict: bool
    endpoint: bool

    def __post_init__(self) -> None:
        if not self.u < self.v:
            raise ValueError("witness needs u < v")
        if not (self.u <= self.p <= self.v and self.u <= self.q <= self.v):
            raise ValueError("witness points must lie inside [u, v]")

    def dq_bounds(self) -> Bounds:
        if isinstance(self.dq, Interval):
            return self.dq.lo, self.dq.hi
        return self.dq, self.dq

    def as_json(self) -> dict:
        lo, hi = self.dq_bounds()
        return {
            "u": str(self.u),
            "v": str(self.v),
            "p": str(self.p),
            "q": str(self.q),
            "dq_lo": str(lo),
            "dq_hi": str(hi),
            "dq_exact": not isinstance(self.dq, Interval),
            "strict": self.strict,
            "endpoint": self.endpoint,
        }


@dataclass(frozen=True)
class Violation:
    u: Fraction
    v: Fraction
    dq_lo: Fraction
    dq_hi: Fraction
    range_lo: Fraction
    range_hi: Fraction
    side: str  # "no_p": inf f > dq, "no_q": sup f < dq
    prec_bits: int

    def __post_init__(self) -> None:
        if not self.u < self.v:
            raise ValueError("violation needs u < v")
        if self.side == "no_p":
            ok = self.range_lo > self.dq_hi
        elif self.side == "no_q":
            ok = self.range_hi < self.dq_lo
        else:
            raise ValueError(f"unknown violation side {self.side!r}")
        if not ok:
            raise ValueError("violation bounds do not meet the proof obligation")

    def as_json(self) -> dict:
        return {
            "u": str(self.u),
            "v": str(self.v),
            "dq_lo": str(self.dq_lo),
            "dq_hi": str(self.dq_hi),
            "control_range_lo": str(self.range_lo),
            "control_range_hi": str(self.range_hi),
            "side": self.side,
            "precision_bits": self.prec_bits,
        }


@dataclass(frozen=True)
class Verdict:
    status: Status
    witness: Optional[BracketWitness] = None
    violation: Optional[Violation] = None
    detail: str = ""
    prec_bits: Optional[int] = None
    grid_n: Optional[int] = None

    def as_json(self) -> dict:
        return {
            "status": self.status.value,
            "witness": self.witness.as_json() if self.witness else None,
            "violation": self.violation.as_json() if self.violation else None,
            "detail": self.detail,
            "precision_bits": self.prec_bits,
            "grid_n": self.grid_n,
        }


class ControlFact(str, Enum):
    IDENTICALLY_ZERO = "identically_zero"
    IDENTICALLY_CONST = "identically_const"
    POSITIVE = "positive"
    NEGATIVE = "negative"
    INCREASING = "increasing"
    DECREASING = "decreasing"


class ShapeProperty(str, Enum):
    CONSTANT = "constant"
    LINEAR = "linear"
    INCREASING = "increasing"
    DECREASING = "decreasing"
    CONVEX_DOWN = "convex_down"
    CONVEX_UP = "convex_up"


_SHAPE_RULES = {
    ControlFact.IDENTICALLY_ZERO: (ShapeProperty.CONSTANT, "zero-control-implies-constant"),
    ControlFact.IDENTICALLY_CONST: (ShapeProperty.LINEAR, "constant-control-implies-linear"),
    ControlFact.POSITIVE: (ShapeProperty.INCREASING, "positive-control-implies-increasing"),
    ControlFact.NEGATIVE: (ShapeProperty.DECREASING, "negative-control-implies-decreasing"),
    ControlFact.INCREASING: (ShapeProperty.CONVEX_DOWN, "increasing-control-implies-convex-down"),
    ControlFact.DECREASING: (ShapeProperty.CONVEX_UP, "decreasing-control-implies-convex-up"),
}


@dataclass(frozen=True)
class ShapeReport:
    property: ShapeProperty
    premise: str
    domain: Interval
    rule: str
    grid_points: int
    claim_status: str = "assumed"

    def as_json(self) -> dict:
        return {
            "property": self.property.value,
            "premise": self.premise,
            "domain": self.domain.as_json(),
            "rule": self.rule,
            "grid_points": self.grid_points,
            "claim_status": self.claim_status,
        }


@dataclass(frozen=True)
class ControlClaim:
    """(controlled F, control f) asserted on a domain interval.

    `pieces` records subdomains on which the claim is directly checkable;
    a bracket check straddling pieces splits at a shared point and
    recombines the sub-witnesses.
    """

    controlled: FunctionSpec
    control: FunctionSpec
    domain: Interval
    pieces: tuple[Interval, ...] = ()

    def __post_init__(self) -> None:
        if not (self.controlled.domain.encloses(self.domain)
                and self.control.domain.encloses(self.domain)):
            raise ValueError("claim domain must lie inside both function domains")
        if self.pieces:
            ordered = tuple(sorted(self.pieces, key=lambda p: (p.lo, p.hi)))
            object.__setattr__(self, "pieces", ordered)
            hull = ordered[0]
            for prev, nxt in zip(ordered, ordered[1:]):
                if nxt.lo > prev.hi:
                    raise ValueError("claim pieces must overlap consecutively")
                hull = hull.hull(nxt)
            if hull != self.domain:
                raise ValueError("claim pieces must cover exactly the claim domain")

    def as_json(self) -> dict:
        return {
            "controlled": format_expr(self.controlled.body),
            "control": format_expr(self.control.body),
            "domain": self.domain.as_json(),
            "pieces": [p.as_json() for p in self.pieces],
        }


# ---------------------------------------------------------------------------
# Certified value bounds


def _value_bounds(fs: FunctionSpec, x: Fraction, prec: Precision) -> tuple[Bounds, bool]:
    exact = fs.eval_exact(x)
    if exact is not None:
        return (exact, exact), True
    iv = fs.eval_enclosure(Interval.point(x), prec)
    return (iv.lo, iv.hi), False


def _dq_bounds(F: FunctionSpec, u: Fraction, v: Fraction,
               prec: Precision) -> tuple[Bounds, bool]:
    (fu_lo, fu_hi), eu = _value_bounds(F, u, prec)
    (fv_lo, fv_hi), ev = _value_bounds(F, v, prec)
    iv = (Interval(fv_lo, fv_hi) - Interval(fu_lo, fu_hi)) / (v - u)
    return (iv.lo, iv.hi), eu and ev


def difference_quotient(F: FunctionSpec, u: Fraction, v: Fraction,
                        prec: Precision = DEFAULT_PRECISION):
    """(F(v) - F(u)) / (v - u): exact when both values are, else an enclosure."""
    if u == v:
        raise ValueError("difference quotient needs two distinct points")
    if u > v:
        u, v = v, u
    (lo, hi), exact = _dq_bounds(F, u, v, prec)
    if exact:
        return lo
    return Interval(lo, hi)


# ---------------------------------------------------------------------------
# Bracket checking


def _witness_candidates(u: Fraction, v: Fraction, grid_n: int):
    yield u
    yield v
    step = (v - u) / (grid_n + 1)
    for i in range(1, grid_n + 1):
        yield u + step * i


def _search_witness(claim: ControlClaim, u: Fraction, v: Fraction,
                    dq: Bounds, grid_n: int, prec: Precision):
    dq_lo, dq_hi = dq
    p = q = None
    p_hi = q_lo = None
    all_exact = True
    for s in _witness_candidates(u, v, grid_n):
        (s_lo, s_hi), exact = _value_bounds(claim.control, s, prec)
        all_exact = all_exact and exact
        if p is None and s_hi <= dq_lo:
            p, p_hi = s, s_hi
        if q is None and s_lo >= dq_hi:
            q, q_lo = s, s_lo
        if p is not None and q is not None:
            break
    return p, q, p_hi, q_lo, all_exact


def _direct_check(claim: ControlClaim, u: Fraction, v: Fraction,
                  grid_n: int, prec: Precision) -> tuple[Verdict, bool]:
    dq, dq_exact = _dq_bounds(claim.controlled, u, v, prec)
    dq_lo, dq_hi = dq
    p, q, p_hi, q_lo, search_exact = _search_witness(claim, u, v, dq, grid_n, prec)
    if p is not None and q is not None:
        witness = BracketWitness(
            u=u, v=v, p=p, q=q,
            dq=dq_lo if dq_exact else Interval(dq_lo, dq_hi),
            strict=(p_hi < dq_lo and dq_hi < q_lo),
            endpoint=(p in (u, v) and q in (u, v)),
        )
        return (
            Verdict(Status.CERTIFIED, witness=witness,
                    prec_bits=prec.bits, grid_n=grid_n),
            dq_exact and search_exact,
        )
    try:
        rng = eval_enclosure(claim.control.body, Interval(u, v), prec)
    except EvalDomainError:
        # Overapproximation can lose a denominator's sign on a wide
        # subinterval; without a certified range there is no refutation.
        detail = f"no witness found and no certified control range over [{u}, {v}]"
        return Verdict(Status.INCONCLUSIVE, detail=detail,
                       prec_bits=prec.bits, grid_n=grid_n), False
    if rng.lo > dq_hi:
        violation = Violation(u, v, dq_lo, dq_hi, rng.lo, rng.hi, "no_p", prec.bits)
        return Verdict(Status.REFUTED, violation=violation,
                       prec_bits=prec.bits, grid_n=grid_n), False
    if rng.hi < dq_lo:
        violation = Violation(u, v, dq_lo, dq_hi, rng.lo, rng.hi, "no_q", prec.bits)
        return Verdict(Status.REFUTED, violation=violation,
                       prec_bits=prec.bits, grid_n=grid_n), False
    detail = (f"no witness found on a {grid_n}-point grid and the control range "
              f"[{rng.lo}, {rng.hi}] does not exclude the quotient")
    return Verdict(Status.INCONCLUSIVE, detail=detail,
                   prec_bits=prec.bits, grid_n=grid_n), dq_exact and search_exact


def _split_point(claim: ControlClaim, u: Fraction, v: Fraction):
    best = None
    for piece in claim.pieces:
        if piece.contains(u) and (best is None or piece.hi > best):
            best = piece.hi
    if best is None or best <= u or best >= v:
        return None
    return best


def _combine_witnesses(claim: ControlClaim, u: Fraction, v: Fraction, dq: Bounds,
                       left: BracketWitness, right: BracketWitness, dq_exact: bool,
                       grid_n: int, prec: Precision) -> Optional[Verdict]:
    dq_lo, dq_hi = dq
    candidates = (left.p, left.q, right.p, right.q)
    p = q = None
    p_hi = q_lo = None
    for s in candidates:
        (s_lo, s_hi), _ = _value_bounds(claim.control, s, prec)
        if p is None and s_hi <= dq_lo:
            p, p_hi = s, s_hi
        if q is None and s_lo >= dq_hi:
            q, q_lo = s, s_lo
    if p is None or q is None:
        return None
    witness = BracketWitness(
        u=u, v=v, p=p, q=q,
        dq=dq_lo if dq_exact else Interval(dq_lo, dq_hi),
        strict=(p_hi < dq_lo and dq_hi < q_lo),
        endpoint=(p in (u, v) and q in (u, v)),
    )
    return Verdict(Status.CERTIFIED, witness=witness, prec_bits=prec.bits, grid_n=grid_n)


def _check_once(claim: ControlClaim, u: Fraction, v: Fraction,
                grid_n: int, prec: Precision) -> tuple[Verdict, bool]:
    if claim.pieces and not any(p.contains(u) and p.contains(v) for p in claim.pieces):
        split = _split_point(claim, u, v)
        if split is not None:
            left, _ = _check_once(claim, u, split, grid_n, prec)
            right, _ = _check_once(claim, split, v, grid_n, prec)
            if left.status is Status.CERTIFIED and right.status is Status.CERTIFIED:
                dq, dq_exact = _dq_bounds(claim.controlled, u, v, prec)
                combined = _combine_witnesses(claim, u, v, dq, left.witness,
                                              right.witness, dq_exact, grid_n, prec)
                if combined is not None:
                    return combined, dq_exact
    return _direct_check(claim, u, v, grid_n, prec)


def check_bracket(claim: ControlClaim, u: Fraction, v: Fraction,
                  grid_n: int = 8, prec: Precision = DEFAULT_PRECISION) -> Verdict:
    """Certify, refute, or give up on the bracket over one subinterval.

    Witness points are tried endpoints-first, then on an equispaced grid.
    Refutation always rests on a certified range bound of the control
    function over the whole [u, v], never on sampling.  An inconclusive
    inexact check is retried twice at doubled precision.
    """
    if u >= v:
        raise ValueError("check_bracket needs u < v")
    if not (claim.domain.contains(u) and claim.domain.contains(v)):
        raise ValueError(f"[{u}, {v}] is not inside the claim domain {claim.domain}")
    if grid_n < 1:
        raise ValueError("grid_n must be >= 1")
    verdict = Verdict(Status.INCONCLUSIVE, detail="not attempted")
    for attempt in range(3):
        attempt_prec = Precision(prec.bits << attempt)
        verdict, all_exact = _check_once(claim, u, v, grid_n, attempt_prec)
        if verdict.status is not Status.INCONCLUSIVE or all_exact:
            return verdict
    return verdict


def falsify_control(claim: ControlClaim, budget: int = 1000, seed: int = 0,
                    prec: Precision = DEFAULT_PRECISION) -> Optional[Violation]:
    """Hunt for a certified violation; None after budget trials proves nothing."""
    if budget < 1:
        raise ValueError("budget must be >= 1")
    trials = 0
    for u, v in sampling.falsification_pairs(claim.domain, seed):
        if trials >= budget:
            break
        trials += 1
        (dq_lo, dq_hi), _ = _dq_bounds(claim.controlled, u, v, prec)
        try:
            rng = eval_enclosure(claim.control.body, Interval(u, v), prec)
        except EvalDomainError:
            continue  # no certified range on this trial interval
        if rng.lo > dq_hi:
            return Violation(u, v, dq_lo, dq_hi, rng.lo, rng.hi, "no_p", prec.bits)
        if rng.hi < dq_lo:
            return Violation(u, v, dq_lo, dq_hi, rng.lo, rng.hi, "no_q", prec.bits)
    return None


def reverify_violation(claim: ControlClaim, violation: Violation,
                       factor: int = 2) -> bool:
    """Recompute a violation's bounds from scratch at scaled precision."""
    prec = Precision(violation.prec_bits * factor)
    (dq_lo, dq_hi), _ = _dq_bounds(claim.controlled, violation.u, violation.v, prec)
    rng = eval_enclosure(claim.control.body, Interval(violation.u, violation.v), prec)
    if violation.side == "no_p":
        return rng.lo > dq_hi
    return rng.hi < dq_lo


def reverify_witness(claim: ControlClaim, witness: BracketWitness,
                     prec: Precision) -> bool:
    """Re-evaluate the certified ordering of a witness from scratch."""
    (dq_lo, dq_hi), _ = _dq_bounds(claim.controlled, witness.u, witness.v, prec)
    (p_lo, p_hi), _ = _value_bounds(claim.control, witness.p, prec)
    (q_lo, q_hi), _ = _value_bounds(claim.control, witness.q, prec)
    return p_hi <= dq_lo and dq_hi <= q_lo


# ---------------------------------------------------------------------------
# Gluing


def glue_claims(a: ControlClaim, b: ControlClaim) -> ControlClaim:
    """Combine two claims for the same pair into one on the union interval."""
    if a.controlled.body != b.controlled.body or a.control.body != b.control.body:
        raise ValueError("glued claims must share the controlled/control pair")
    if not a.domain.intersects(b.domain):
        raise DisjointDomains(f"domains {a.domain} and {b.domain} do not touch")
    union = a.domain.hull(b.domain)
    pieces = (a.pieces or (a.domain,)) + (b.pieces or (b.domain,))
    return ControlClaim(
        controlled=FunctionSpec(a.controlled.body, union),
        control=FunctionSpec(a.control.body, union),
        domain=union,
        pieces=pieces,
    )


# ---------------------------------------------------------------------------
# Cubic certificate

_Poly = dict[tuple[int, int], Fraction]  # (u-degree, v-degree) -> coefficient


def _poly_add(p: _Poly, key: tuple[int, int], coef: Fraction) -> None:
    new = p.get(key, Fraction(0)) + coef
    if new == 0:
        p.pop(key, None)
    else:
        p[key] = new


def _poly_sub(p: _Poly, q: _Poly) -> _Poly:
    out = dict(p)
    for key, coef in q.items():
        _poly_add(out, key, -coef)
    return out


def _cubic_quotient(a: Fraction, b: Fraction, c: Fraction) -> _Poly:
    # (F(v) - F(u)) / (v - u) for F = x^3 + a x^2 + b x + c, expanded via
    # (v^k - u^k) / (v - u) = sum_i u^i v^(k-1-i).
    coeffs = {3: Fraction(1), 2: a, 1: b}
    quotient: _Poly = {}
    for k, coef in coeffs.items():
        if coef == 0:
            continue
        for i in range(k):
            _poly_add(quotient, (i, k - 1 - i), coef)
    return quotient


def _eval_g(at_u: bool, a: Fraction, b: Fraction) -> _Poly:
    # g(x) = 3 x^2 + 2 a x + b evaluated at u or at v, as a polynomial.
    var = (lambda d: (d, 0)) if at_u else (lambda d: (0, d))
    poly: _Poly = {}
    _poly_add(poly, var(2), Fraction(3))
    _poly_add(poly, var(1), 2 * a)
    _poly_add(poly, (0, 0), b)
    return poly


def _expand_product(a: Fraction, swap: bool) -> _Poly:
    # (v - u)(v + 2u + a) when swap is False, (v - u)(2v + u + a) when True.
    first = {(0, 1): Fraction(1), (1, 0): Fraction(-1)}
    if swap:
        second = {(0, 1): Fraction(2), (1, 0): Fraction(1), (0, 0): a}
    else:
        second = {(0, 1): Fraction(1), (1, 0): Fraction(2), (0, 0): a}
    out: _Poly = {}
    for (u1, v1), c1 in first.items():
        for (u2, v2), c2 in second.items():
            _poly_add(out, (u1 + u2, v1 + v2), c1 * c2)
    return out


def cubic_control_certificate(a: Fraction, b: Fraction, c: Fraction,
                              window: Interval) -> Verdict:
    """Unconditional certificate that 3x^2 + 2ax + b controls the cubic.

    Both factorization identities are verified by exact coefficient
    comparison of the fully expanded bivariate polynomials, not by
    sampling.  The certificate records the split point -a/3 separating
    the two monotone branches of the quotient gap.
    """
    a, b, c = Fraction(a), Fraction(b), Fraction(c)
    quotient = _cubic_quotient(a, b, c)
    first_gap = _poly_sub(quotient, _eval_g(True, a, b))
    second_gap = _poly_sub(_eval_g(False, a, b), quotient)
    ok_first = first_gap == _expand_product(a, swap=False)
    ok_second = second_gap == _expand_product(a, swap=True)
    split = -a / 3
    if ok_first and ok_second:
        detail = (f"quotient - g(u) = (v - u)(v + 2u + {a}) and "
                  f"g(v) - quotient = (v - u)(2v + u + {a}) verified by exact "
                  f"coefficient comparison; split point {split}")
        return Verdict(Status.CERTIFIED, detail=detail)
    return Verdict(Status.REFUTED, detail="coefficient comparison failed")


def cubic_claim(a: Fraction, b: Fraction, c: Fraction, window: Interval) -> ControlClaim:
    """The cubic control claim on a bounded window, split at -a/3."""
    from .expr import parse  # local import keeps module load order simple

    a, b, c = Fraction(a), Fraction(b), Fraction(c)
    controlled = parse(f"x^3 + ({a})*x^2 + ({b})*x + ({c})")
    control = parse(f"3*x^2 + ({2 * a})*x + ({b})")
    split = -a / 3
    pieces: tuple[Interval, ...] = ()
    if window.lo < split < window.hi:
        pieces = (Interval(window.lo, split), Interval(split, window.hi))
    return ControlClaim(
        controlled=FunctionSpec(controlled, window),
        control=FunctionSpec(control, window),
        domain=window,
        pieces=pieces,
    )


# ---------------------------------------------------------------------------
# Shape inference


def _grid(domain: Interval, n: int) -> list[Fraction]:
    step = domain.width / n
    return [domain.lo + step * i for i in range(n + 1)]


def _certify_sign(fs: FunctionSpec, domain: Interval, positive: bool,
                  prec: Precision, depth: int = 10) -> None:
    try:
        iv = fs.eval_enclosure(domain, prec)
    except EvalDomainError:
        iv = None  # wide-interval overapproximation; subdividing may recover
    if iv is not None:
        if positive and iv.lo > 0:
            return
        if not positive and iv.hi < 0:
            return
        if positive and iv.hi <= 0:
            raise PremiseNotCertified(f"control is certifiably <= 0 somewhere in {domain}")
        if not positive and iv.lo >= 0:
            raise PremiseNotCertified(f"control is certifiably >= 0 somewhere in {domain}")
    if depth == 0 or domain.width == 0:
        raise PremiseNotCertified(
            f"sign of the control could not be certified over {domain}")
    mid = domain.mid
    _certify_sign(fs, Interval(domain.lo, mid), positive, prec, depth - 1)
    _certify_sign(fs, Interval(mid, domain.hi), positive, prec, depth - 1)


def _certify_constant(fs: FunctionSpec, domain: Interval,
                      prec: Precision) -> Fraction:
    iv = fs.eval_enclosure(domain, prec)
    if iv.lo == iv.hi:
        return iv.lo
    raise PremiseNotCertified(
        f"control enclosure over {domain} has width {iv.width}, not a certified constant")


def _certify_monotone_grid(fs: FunctionSpec, domain: Interval, increasing: bool,
                           prec: Precision, grid_points: int) -> None:
    # Grid certification: the control's own difference quotients over
    # consecutive grid cells must have a certified sign.
    points = _grid(domain, grid_points)
    for lo, hi in zip(points, points[1:]):
        (dq_lo, dq_hi), _ = _dq_bounds(fs, lo, hi, prec)
        if increasing and not dq_lo > 0:
            raise PremiseNotCertified(
                f"control quotient over [{lo}, {hi}] not certifiably positive")
        if not increasing and not dq_hi < 0:
            raise PremiseNotCertified(
                f"control quotient over [{lo}, {hi}] not certifiably negative")


def _certified_le(a: Bounds, b: Bounds) -> bool:
    return a[1] <= b[0]


def _certified_lt(a: Bounds, b: Bounds) -> bool:
    return a[1] < b[0]


def _spot_check(F: FunctionSpec, domain: Interval, prop: ShapeProperty,
                prec: Precision, n: int = 12) -> None:
    points = _grid(domain, n)
    values = [_value_bounds(F, x, prec)[0] for x in points]
    if prop is ShapeProperty.INCREASING:
        ok = all(_certified_lt(a, b) for a, b in zip(values, values[1:]))
    elif prop is ShapeProperty.DECREASING:
        ok = all(_certified_lt(b, a) for a, b in zip(values, values[1:]))
    elif prop is ShapeProperty.CONSTANT:
        ok = all(v == values[0] for v in values)
    elif prop is ShapeProperty.LINEAR:
        x0, x1 = points[0], points[1]
        y0 = F.eval_exact(x0)
        y1 = F.eval_exact(x1)
        if y0 is None or y1 is None:
            raise PremiseNotCertified("linear spot check needs exact endpoint values")
        slope = (y1 - y0) / (x1 - x0)
        ok = all(F.eval_exact(x) == y0 + slope * (x - x0) for x in points)
    else:
        mids = [_value_bounds(F, (a + b) / 2, prec)[0]
                for a, b in zip(points, points[2:])]
        averages = []
        for (a_lo, a_hi), (b_lo, b_hi) in zip(values, values[2:]):
            averages.append(((a_lo + b_lo) / 2, (a_hi + b_hi) / 2))
        if prop is ShapeProperty.CONVEX_DOWN:
            ok = all(_certified_le(m, avg) for m, avg in zip(mids, averages))
        else:
            ok = all(_certified_le(avg, m) for m, avg in zip(mids, averages))
    if not ok:
        raise PremiseNotCertified(
            f"spot check of the {prop.value} conclusion failed on the sample grid")


def infer_shape(claim: ControlClaim, fact: ControlFact,
                prec: Precision = DEFAULT_PRECISION, grid_points: int = 16,
                claim_status: str = "assumed") -> ShapeReport:
    """Certify a premise about the control, then report the implied shape.

    The premise is certified over the whole claim domain (sign facts via
    subdivided enclosures, monotonicity on a refinement grid of the
    control's own quotients); the implied conclusion about the controlled
    function is additionally spot-checked on a sample grid.
    """
    prop, rule = _SHAPE_RULES[fact]
    f = claim.control
    domain = claim.domain
    if fact is ControlFact.IDENTICALLY_ZERO:
        value = _certify_constant(f, domain, prec)
        if value != 0:
            raise PremiseNotCertified(f"control is the constant {value}, not zero")
        premise = "control is identically zero"
    elif fact is ControlFact.IDENTICALLY_CONST:
        value = _certify_constant(f, domain, prec)
        premise = f"control is identically {value}"
    elif fact is ControlFact.POSITIVE:
        _certify_sign(f, domain, positive=True, prec=prec)
        premise = "control is certifiably positive"
    elif fact is ControlFact.NEGATIVE:
        _certify_sign(f, domain, positive=False, prec=prec)
        premise = "control is certifiably negative"
    elif fact is ControlFact.INCREASING:
        _certify_monotone_grid(f, domain, True, prec, grid_points)
        premise = "control is increasing on the refinement grid"
    else:
        _certify_monotone_grid(f, domain, False, prec, grid_points)
        premise = "control is decreasing on the refinement grid"
    _spot_check(claim.controlled, domain, prop, prec)
    return ShapeReport(property=prop, premise=premise, domain=domain,
                       rule=rule, grid_points=grid_points, claim_status=claim_status)


# ---------------------------------------------------------------------------
# Error-bounded approximation


def certify_monotone_by_derivative(f: FunctionSpec, domain: Interval,
                                   prec: Precision = DEFAULT_PRECISION):
    """Direction of a differentiable monotone function, or None."""
    derivative = symbolic_derivative(f.body)
    if derivative is None:
        return None
    for positive, direction in ((True, "increasing"), (False, "decreasing")):
        try:
            _certify_sign(FunctionSpec(derivative, f.domain), domain, positive, prec)
            return direction
        except (PremiseNotCertified, EvalDomainError):
            continue
    return None


def approximate_with_error(F: FunctionSpec, f: FunctionSpec, base: Fraction,
                           target: Fraction, prec: Precision = DEFAULT_PRECISION,
                           assume_monotone: bool = False
                           ) -> tuple[Fraction, Fraction]:
    """Tangent-style approximation of F(target) with a certified error bound.

    Uses the endpoint bracketing that a monotone control provides: the
    quotient over [base, target] lies between the control's values at the
    two endpoints, so the deviation from f(base) is at most the certified
    spread between f(base) and f(target).
    """
    base, target = Fraction(base), Fraction(target)
    f_base = F.eval_exact(base)
    if f_base is None:
        raise PremiseNotCertified(f"controlled function has no exact value at {base}")
    if base == target:
        return f_base, Fraction(0)
    lo, hi = (base, target) if base < target else (target, base)
    span = Interval(lo, hi)
    if not assume_monotone:
        direction = certify_monotone_by_derivative(f, span, prec)
        if direction is None:
            raise PremiseNotCertified(
                f"control is not certifiably monotone on {span}; pass "
                f"assume_monotone to use it anyway")
    (b_lo, b_hi), _ = _value_bounds(f, base, prec)
    (t_lo, t_hi), _ = _value_bounds(f, target, prec)
    slope = (b_lo + b_hi) / 2
    delta = target - base
    approx = f_base + slope * delta
    hull_lo = min(b_lo, t_lo)
    hull_hi = max(b_hi, t_hi)
    deviation = max(hull_hi - slope, slope - hull_lo)
    return approx, deviation * abs(delta)
