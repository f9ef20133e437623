"""Lipschitz certification and the slope-control inequality machinery.

`check_linqun` samples the two-sided inequality
``|(f(v) - f(u))/(v - u) - g(s)| <= M |v - u|`` with certified
comparisons, `control_is_2M_lipschitz` propagates the implied ``2M``
bound on g itself, and `find_bracket_by_subdivision` turns the
inequality into concrete bracket points by scanning equal subdivisions.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from . import sampling
from .control import ControlClaim, Status, Verdict, _dq_bounds, _value_bounds
from .expr import (
    EvalDomainError,
    Expr,
    FunctionSpec,
    Sgn,
    eval_enclosure,
    format_expr,
    symbolic_derivative,
)
from .numeric import DEFAULT_PRECISION, Interval, Precision


class HypothesisViolated(Exception):
    """The final certified bracket check failed; the slope premise was false."""


class SearchInconclusive(Exception):
    """The subdivision budget ran out before a certified decision."""


METHOD_DERIVATIVE_RANGE = "derivative_range"
METHOD_SYNTACTIC_RULE = "syntactic_rule"
METHOD_USER_SUPPLIED = "user_supplied"


@dataclass(frozen=True)
class LipschitzCert:
    fn: FunctionSpec
    domain: Interval
    M: Fraction
    method: str

    def __post_init__(self):
        if self.M < 0:
            raise ValueError("a Lipschitz constant is nonnegative")

    def as_json(self) -> dict:
        return {
            "function": format_expr(self.fn.body),
            "domain": self.domain.as_json(),
            "M": str(self.M),
            "method": self.method,
        }


@dataclass(frozen=True)
class NotLipschitz:
    domain: Interval
    reason: str
    definite: bool  # syntactic determinations are definite, budget ones are not

    def as_json(self) -> dict:
        return {
            "domain": self.domain.as_json(),
            "reason": self.reason,
            "definite": self.definite,
        }


@dataclass(frozen=True)
class LinqunReport:
    f: FunctionSpec
    g: FunctionSpec
    domain: Interval
    M: Fraction
    samples_checked: int
    worst_slack: Fraction

    def as_json(self) -> dict:
        return {
            "f": format_expr(self.f.body),
            "g": format_expr(self.g.body),
            "domain": self.domain.as_json(),
            "M": str(self.M),
            "samples_checked": self.samples_checked,
            "worst_slack": str(self.worst_slack),
        }


@dataclass(frozen=True)
class LinqunCounterexample:
    u: Fraction
    v: Fraction
    s: Fraction
    gap_lower: Fraction  # certified lower bound of |dq - g(s)|
    bound: Fraction      # M |v - u| it had to stay under

    def as_json(self) -> dict:
        return {
            "u": str(self.u),
            "v": str(self.v),
            "s": str(self.s),
            "gap_lower": str(self.gap_lower),
            "bound": str(self.bound),
        }


def _contains_sgn(e: Expr) -> bool:
    if isinstance(e, Sgn):
        return True
    for attr in ("left", "right", "base", "arg"):
        child = getattr(e, attr, None)
        if isinstance(child, Expr) and _contains_sgn(child):
            return True
    return False


_DIVERGENCE_CAP = Fraction(1 << 48)


def lipschitz_bound(fn: FunctionSpec, domain: Interval,
                    prec: Precision = DEFAULT_PRECISION,
                    max_depth: int = 8) -> Union[LipschitzCert, NotLipschitz]:
    """Upper bound on |derivative| over the domain via refined enclosures.

    Presence of sgn in the function body is a definite NotLipschitz; a
    derivative enclosure that stays undefined or above the divergence cap
    through the refinement budget is reported as not certifiable rather
    than as a hard claim.
    """
    if _contains_sgn(fn.body):
        return NotLipschitz(domain, "body contains sgn", definite=True)
    derivative = symbolic_derivative(fn.body)
    if derivative is None:
        return NotLipschitz(domain, "no derivative form available", definite=True)
    best: Optional[Fraction] = None
    previous: Optional[Fraction] = None
    for depth in range(max_depth + 1):
        cells = 1 << depth
        step = domain.width / cells
        bound = Fraction(0)
        failed = False
        for i in range(cells):
            cell = Interval(domain.lo + step * i, domain.lo + step * (i + 1))
            try:
                enc = eval_enclosure(derivative, cell, prec)
            except EvalDomainError:
                failed = True
                break
            bound = max(bound, enc.mag)
        if failed:
            if depth == max_depth:
                return NotLipschitz(
                    domain, "derivative undefined on part of the domain "
                    "through the refinement budget", definite=False)
            continue
        best = bound if best is None else min(best, bound)
        if previous is not None and depth >= 3 and bound * 16 >= previous * 15:
            break  # refinement has stabilized
        previous = bound
    if best is None or best > _DIVERGENCE_CAP:
        return NotLipschitz(domain, "derivative bound exceeds the divergence cap "
                            "within budget", definite=False)
    return LipschitzCert(fn=fn, domain=domain, M=best, method=METHOD_DERIVATIVE_RANGE)


def _grid_weak_monotone(fn: FunctionSpec, piece: Interval, prec: Precision,
                        grid_points: int) -> bool:
    step = piece.width / grid_points
    points = [piece.lo + step * i for i in range(grid_points + 1)]
    up = down = True
    for a, b in zip(points, points[1:]):
        (dq_lo, dq_hi), _ = _dq_bounds(fn, a, b, prec)
        up = up and dq_lo >= 0
        down = down and dq_hi <= 0
        if not (up or down):
            return False
    return up or down


def derivative_uniqueness(claim: ControlClaim, prec: Precision = DEFAULT_PRECISION,
                          cert: Optional[LipschitzCert] = None,
                          grid_points: int = 32) -> Verdict:
    """Flag the claim's control as a certified derivative, or stay undecided.

    A control is a derivative when it belongs to only one function up to a
    constant.  Witness search alone can never decide that; this certifies
    one of the sufficient routes instead: a Lipschitz constant for the
    control over the claim domain, or weak monotonicity of the control on
    a refinement grid per claim piece.
    """
    domain = claim.domain
    if cert is not None:
        if cert.fn.body != claim.control.body or not cert.domain.encloses(domain):
            raise ValueError("certificate does not cover the claim's control")
        return Verdict(Status.CERTIFIED,
                       detail=f"uniqueness-certified: control is Lipschitz with "
                       f"M = {cert.M} ({cert.method})", prec_bits=prec.bits)
    result = lipschitz_bound(claim.control, domain, prec)
    if isinstance(result, LipschitzCert):
        return Verdict(Status.CERTIFIED,
                       detail=f"uniqueness-certified: control is Lipschitz with "
                       f"M = {result.M} (derivative_range)", prec_bits=prec.bits)
    pieces = claim.pieces or (domain,)
    if all(_grid_weak_monotone(claim.control, piece, prec, grid_points)
           for piece in pieces):
        return Verdict(Status.CERTIFIED,
                       detail=f"uniqueness-certified: control is piecewise "
                       f"monotone ({grid_points}-point grid premise per piece)",
                       prec_bits=prec.bits)
    return Verdict(Status.INCONCLUSIVE,
                   detail="uniqueness not certified: control is neither "
                   "certifiably Lipschitz nor piecewise monotone on the "
                   "refinement grid; witness search alone never decides "
                   "uniqueness", prec_bits=prec.bits)


def _abs_bounds(lo: Fraction, hi: Fraction) -> tuple[Fraction, Fraction]:
    if lo <= 0 <= hi:
        return Fraction(0), max(-lo, hi)
    if lo > 0:
        return lo, hi
    return -hi, -lo


def _linqun_sample(f: FunctionSpec, g: FunctionSpec, u: Fraction, v: Fraction,
                   s: Fraction, M: Fraction, prec: Precision):
    """Certified verdict for one triple, via both equivalent forms.

    Returns ("pass", slack), ("fail", gap_lower) or ("unknown", None).
    """
    (dq_lo, dq_hi), _ = _dq_bounds(f, u, v, prec)
    (gs_lo, gs_hi), _ = _value_bounds(g, s, prec)
    h = v - u
    # Quotient form: |dq - g(s)| <= M h.
    d_lo, d_hi = dq_lo - gs_hi, dq_hi - gs_lo
    a_lo, a_hi = _abs_bounds(d_lo, d_hi)
    rhs = M * h
    # Difference form: |f(v) - f(u) - g(s)(v - u)| <= M h^2, which is the
    # quotient form scaled by the exact positive h; both paths are
    # computed and must agree.
    (fu_lo, fu_hi), _ = _value_bounds(f, u, prec)
    (fv_lo, fv_hi), _ = _value_bounds(f, v, prec)
    gs_iv = Interval(gs_lo, gs_hi)
    num = Interval(fv_lo, fv_hi) - Interval(fu_lo, fu_hi) - gs_iv * h
    n_lo, n_hi = _abs_bounds(num.lo, num.hi)
    rhs2 = M * h * h
    first = "pass" if a_hi <= rhs else ("fail" if a_lo > rhs else "unknown")
    second = "pass" if n_hi <= rhs2 else ("fail" if n_lo > rhs2 else "unknown")
    if "unknown" not in (first, second) and first != second:
        raise AssertionError("the two equivalent inequality forms disagreed")
    if first == "pass" and second == "pass":
        return "pass", rhs - a_hi
    if first == "fail" or second == "fail":
        return "fail", a_lo if first == "fail" else n_lo / h
    return "unknown", None


def check_linqun(f: FunctionSpec, g: FunctionSpec, domain: Interval, M: Fraction,
                 sample_n: int = 1000, prec: Precision = DEFAULT_PRECISION,
                 seed: int = 0) -> Union[LinqunReport, LinqunCounterexample]:
    """Sample the slope-control inequality with certified comparisons.

    Every sampled triple must pass for a report; the first certified
    failure is returned as a counterexample.  A triple that stays
    undecidable after two precision doublings raises SearchInconclusive.
    """
    if sample_n < 1:
        raise ValueError("sample_n must be >= 1")
    M = Fraction(M)
    worst: Optional[Fraction] = None
    checked = 0
    for u, v, s in sampling.sample_triples(domain, seed):
        if checked >= sample_n:
            break
        attempt = prec
        verdict, value = _linqun_sample(f, g, u, v, s, M, attempt)
        for _ in range(2):
            if verdict != "unknown":
                break
            attempt = attempt.double()
            verdict, value = _linqun_sample(f, g, u, v, s, M, attempt)
        if verdict == "unknown":
            raise SearchInconclusive(
                f"triple ({u}, {v}, {s}) undecidable at {attempt.bits} bits")
        if verdict == "fail":
            return LinqunCounterexample(u, v, s, gap_lower=value, bound=M * (v - u))
        worst = value if worst is None else min(worst, value)
        checked += 1
    return LinqunReport(f=f, g=g, domain=domain, M=M,
                        samples_checked=checked, worst_slack=worst)


def control_is_2M_lipschitz(f: FunctionSpec, g: FunctionSpec, domain: Interval,
                            M: Fraction, sample_n: int = 1000,
                            report: Optional[LinqunReport] = None,
                            prec: Precision = DEFAULT_PRECISION,
                            seed: int = 0) -> Verdict:
    """Check |g(v) - g(u)| <= 2M |v - u| on sampled pairs.

    Requires a passing slope report as premise (computed here when not
    supplied).  A certified failure refutes, and thereby also impeaches
    the premise.
    """
    M = Fraction(M)
    if report is None:
        outcome = check_linqun(f, g, domain, M, sample_n=sample_n, prec=prec, seed=seed)
        if isinstance(outcome, LinqunCounterexample):
            return Verdict(Status.INCONCLUSIVE,
                           detail="slope premise not established: certified "
                           f"counterexample at ({outcome.u}, {outcome.v}, {outcome.s})",
                           prec_bits=prec.bits)
        report = outcome
    checked = 0
    for u, v in sampling.falsification_pairs(domain, seed):
        if checked >= sample_n:
            break
        checked += 1
        rhs = 2 * M * (v - u)
        attempt = prec
        for retry in range(3):
            (gu_lo, gu_hi), _ = _value_bounds(g, u, attempt)
            (gv_lo, gv_hi), _ = _value_bounds(g, v, attempt)
            d_lo, d_hi = _abs_bounds(gv_lo - gu_hi, gv_hi - gu_lo)
            if d_hi <= rhs:
                break
            if d_lo > rhs:
                return Verdict(Status.REFUTED,
                               detail=f"|g({v}) - g({u})| >= {d_lo} > {rhs}; the "
                               "slope premise is impeached", prec_bits=attempt.bits)
            if retry == 2:
                return Verdict(Status.INCONCLUSIVE,
                               detail=f"pair ({u}, {v}) undecidable at "
                               f"{attempt.bits} bits", prec_bits=attempt.bits)
            attempt = attempt.double()
    return Verdict(Status.CERTIFIED,
                   detail=f"2M bound certified on {checked} sampled pairs",
                   prec_bits=prec.bits)


def _dq_exact_or_bounds(f: FunctionSpec, a: Fraction, b: Fraction,
                        prec: Precision) -> tuple[Fraction, Fraction]:
    (lo, hi), _ = _dq_bounds(f, a, b, prec)
    return lo, hi


def find_bracket_by_subdivision(f: FunctionSpec, g: FunctionSpec, M: Fraction,
                                u: Fraction, v: Fraction,
                                prec: Precision = DEFAULT_PRECISION,
                                max_depth: int = 12) -> tuple[Fraction, Fraction]:
    """Construct bracket points (p, q) with g(p) <= dq(u, v) <= g(q).

    Mirrors the constructive argument: locate a probe subinterval whose
    quotient sits strictly below (resp. above) the reference quotient,
    split it into n equal parts with M (s - r) / n below the gap, and
    take the left endpoint of a part whose quotient is on the right side.
    The returned pair always passes a final certified bracket check;
    failure of that check raises HypothesisViolated.
    """
    if u >= v:
        raise ValueError("find_bracket_by_subdivision needs u < v")
    M = Fraction(M)
    ref_lo, ref_hi = _dq_exact_or_bounds(f, u, v, prec)

    def certified_p(point: Fraction) -> bool:
        (lo_, hi_), _ = _value_bounds(g, point, prec)
        return hi_ <= ref_lo

    def certified_q(point: Fraction) -> bool:
        (lo_, hi_), _ = _value_bounds(g, point, prec)
        return lo_ >= ref_hi

    def scan_side(want_below: bool) -> Fraction:
        # Probe dyadic cells for a certified quotient gap on the wanted side.
        all_equal_exact = True
        for r, s in sampling.dyadic_cells(Interval(u, v), max_depth):
            cell_lo, cell_hi = _dq_exact_or_bounds(f, r, s, prec)
            if cell_lo != cell_hi or cell_lo != ref_lo or ref_lo != ref_hi:
                all_equal_exact = False
            if want_below and cell_hi < ref_lo:
                gap = ref_lo - cell_hi
            elif not want_below and cell_lo > ref_hi:
                gap = cell_lo - ref_hi
            else:
                continue
            n = max(int((M * (s - r)) // gap) + 1, 1) if M > 0 else 1
            h = (s - r) / n
            reference = cell_hi if want_below else cell_lo
            scan_exact = cell_lo == cell_hi and ref_lo == ref_hi
            for i in range(n):
                t = r + h * i
                t_lo, t_hi = _dq_exact_or_bounds(f, t, t + h, prec)
                (g_lo, g_hi), _ = _value_bounds(g, t, prec)
                scan_exact = scan_exact and t_lo == t_hi and g_lo == g_hi
                if want_below and t_hi <= reference and g_hi <= ref_lo:
                    return t
                if not want_below and t_lo >= reference and g_lo >= ref_hi:
                    return t
            if scan_exact:
                # With exact quotients one part must sit on the wanted side,
                # so only a false premise can reach this point.
                raise HypothesisViolated(
                    "no equal-subdivision part produced a certified bracket "
                    "point; the slope premise cannot hold with this M")
        # No gap found: the quotient looked constant, so the control must
        # equal the quotient at the left endpoint under the premise.
        if all_equal_exact:
            ok = certified_p(u) if want_below else certified_q(u)
            if ok:
                return u
            raise HypothesisViolated(
                f"constant quotient {ref_lo} is not certifiably bracketed by g({u})")
        raise SearchInconclusive(
            f"no certified quotient gap found to depth {max_depth} although the "
            "quotients are not certifiably constant")

    p = scan_side(want_below=True)
    q = scan_side(want_below=False)
    if not (certified_p(p) and certified_q(q)):
        raise HypothesisViolated("final certified bracket check failed")
    return p, q
