"""Certified enclosures of definite integrals.

The computable object is the pair of Darboux-style sums over an equal
subdivision: on each cell a certified range of the integrand is
accumulated, so any two-argument function satisfying additivity plus the
intermediate-value property on the integrand must take its value inside
the returned interval.  For discontinuous integrands the enclosure is
sound but may be strictly wider than the tightest value the axioms
allow; piecewise splitting confines that slack to the cells touching a
breakpoint.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .control import Status, Verdict, _value_bounds
from .expr import FunctionSpec
from .numeric import (
    DEFAULT_PRECISION,
    Interval,
    Precision,
    ceil_to_bits,
    decimal_display,
    floor_to_bits,
)


@dataclass(frozen=True)
class IntegralEnclosure:
    u: Fraction
    v: Fraction
    lo: Fraction
    hi: Fraction
    n: int
    width_bound: Optional[Fraction] = None  # a priori M (v - u)^2 / n when M known

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def contains(self, x) -> bool:
        return self.lo <= Fraction(x) <= self.hi

    def as_interval(self) -> Interval:
        return Interval(self.lo, self.hi)

    def as_json(self, decimals: bool = True) -> dict:
        out = {
            "u": str(self.u),
            "v": str(self.v),
            "lo": str(self.lo),
            "hi": str(self.hi),
            "n": self.n,
            "width": str(self.width),
            "width_bound": str(self.width_bound) if self.width_bound is not None else None,
        }
        if decimals:
            out["lo_decimal"] = decimal_display(self.lo)
            out["hi_decimal"] = decimal_display(self.hi)
            out["decimals_display_only"] = True
        return out


@dataclass(frozen=True)
class PiecewisePlan:
    """Interior breakpoints where the integrand changes regime."""

    breakpoints: tuple[Fraction, ...]

    def __post_init__(self):
        pts = tuple(Fraction(b) for b in self.breakpoints)
        object.__setattr__(self, "breakpoints", pts)
        if any(a >= b for a, b in zip(pts, pts[1:])):
            raise ValueError("breakpoints must be strictly increasing")


# Running sums stay exact until their reduced denominator outgrows this
# many bits beyond the precision; then they are rounded outward.  Exact
# integrands (polynomials, sgn) never trigger it, so their sums and the
# exact width-halving law are untouched.
_SUM_GUARD_BITS = 48


def _tame(lo_sum: Fraction, hi_sum: Fraction, bits: int) -> tuple[Fraction, Fraction]:
    if lo_sum.denominator.bit_length() > bits:
        lo_sum = floor_to_bits(lo_sum, bits)
    if hi_sum.denominator.bit_length() > bits:
        hi_sum = ceil_to_bits(hi_sum, bits)
    return lo_sum, hi_sum


def _cell_range(f: FunctionSpec, lo: Fraction, hi: Fraction, prec: Precision,
                monotone: Optional[str]) -> tuple[Fraction, Fraction]:
    if monotone is not None:
        (a_lo, a_hi), _ = _value_bounds(f, lo, prec)
        (b_lo, b_hi), _ = _value_bounds(f, hi, prec)
        if monotone == "increasing":
            return a_lo, b_hi
        return b_lo, a_hi
    iv = f.eval_enclosure(Interval(lo, hi), prec)
    return iv.lo, iv.hi


def integrate_enclosure(f: FunctionSpec, u: Fraction, v: Fraction, n: int,
                        prec: Precision = DEFAULT_PRECISION,
                        M: Optional[Fraction] = None,
                        monotone: Optional[str] = None) -> IntegralEnclosure:
    """Lower/upper sums over n equal cells enclose every integral value.

    With a Lipschitz constant M the a priori width bound M (v - u)^2 / n
    is recorded.  Orientation is signed: integrating from v down to u
    negates the enclosure (forced by additivity).
    """
    u, v = Fraction(u), Fraction(v)
    if n < 1:
        raise ValueError("subdivision count must be >= 1")
    if monotone not in (None, "increasing", "decreasing"):
        raise ValueError("monotone must be 'increasing', 'decreasing', or None")
    if u == v:
        return IntegralEnclosure(u, v, Fraction(0), Fraction(0), n, Fraction(0))
    if u > v:
        flipped = integrate_enclosure(f, v, u, n, prec, M, monotone)
        return IntegralEnclosure(u, v, -flipped.hi, -flipped.lo, n, flipped.width_bound)
    step = (v - u) / n
    guard = prec.bits + _SUM_GUARD_BITS
    lo_sum = Fraction(0)
    hi_sum = Fraction(0)
    for i in range(n):
        a = u + step * i
        b = v if i == n - 1 else u + step * (i + 1)
        m_k, big_m_k = _cell_range(f, a, b, prec, monotone)
        lo_sum += m_k * step
        hi_sum += big_m_k * step
        lo_sum, hi_sum = _tame(lo_sum, hi_sum, guard)
    bound = Fraction(M) * (v - u) ** 2 / n if M is not None else None
    return IntegralEnclosure(u, v, lo_sum, hi_sum, n, bound)


def integrate_piecewise(f: FunctionSpec, plan: PiecewisePlan, u: Fraction,
                        v: Fraction, n_per_piece: int,
                        prec: Precision = DEFAULT_PRECISION) -> IntegralEnclosure:
    """Split at the plan's breakpoints, integrate each piece, sum exactly."""
    u, v = Fraction(u), Fraction(v)
    if u >= v:
        raise ValueError("integrate_piecewise needs u < v")
    for b in plan.breakpoints:
        if not (u < b < v):
            raise ValueError(f"breakpoint {b} is not interior to [{u}, {v}]")
    cuts = [u, *plan.breakpoints, v]
    lo_sum = Fraction(0)
    hi_sum = Fraction(0)
    total_n = 0
    for a, b in zip(cuts, cuts[1:]):
        piece = integrate_enclosure(f, a, b, n_per_piece, prec)
        lo_sum += piece.lo
        hi_sum += piece.hi
        total_n += piece.n
    return IntegralEnclosure(u, v, lo_sum, hi_sum, total_n)


def check_additivity(f: FunctionSpec, u: Fraction, v: Fraction, w: Fraction,
                     n: int, prec: Precision = DEFAULT_PRECISION) -> Verdict:
    """Enclosure(u, w) must meet enclosure(u, v) + enclosure(v, w).

    Certified disjointness would mean the accumulation itself is broken,
    so this doubles as a self test.
    """
    u, v, w = Fraction(u), Fraction(v), Fraction(w)
    if not u < v < w:
        raise ValueError("check_additivity needs u < v < w")
    whole = integrate_enclosure(f, u, w, n, prec).as_interval()
    left = integrate_enclosure(f, u, v, n, prec).as_interval()
    right = integrate_enclosure(f, v, w, n, prec).as_interval()
    summed = left + right
    if whole.intersects(summed):
        return Verdict(Status.CERTIFIED,
                       detail=f"enclosure {whole} meets split sum {summed}",
                       prec_bits=prec.bits)
    return Verdict(Status.REFUTED,
                   detail=f"enclosure {whole} is disjoint from split sum {summed}",
                   prec_bits=prec.bits)


def _delta_bounds(F: FunctionSpec, u: Fraction, v: Fraction,
                  prec: Precision) -> Interval:
    (u_lo, u_hi), _ = _value_bounds(F, u, prec)
    (v_lo, v_hi), _ = _value_bounds(F, v, prec)
    return Interval(v_lo, v_hi) - Interval(u_lo, u_hi)


def newton_leibniz_check(F: FunctionSpec, f: FunctionSpec, u: Fraction, v: Fraction,
                         n: int = 1000, prec: Precision = DEFAULT_PRECISION,
                         plan: Optional[PiecewisePlan] = None,
                         enclosure: Optional[IntegralEnclosure] = None) -> Verdict:
    """Compare F(v) - F(u) with the integral enclosure of f over [u, v].

    Certified when the two intervals intersect; a certified disjointness
    refutes that f reconstructs F on this interval.
    """
    u, v = Fraction(u), Fraction(v)
    if u == v:
        return Verdict(Status.CERTIFIED, detail="degenerate interval, both sides zero",
                       prec_bits=prec.bits)
    if u > v:
        raise ValueError("newton_leibniz_check needs u <= v")
    delta = _delta_bounds(F, u, v, prec)
    if enclosure is None:
        if plan is not None and plan.breakpoints:
            enclosure = integrate_piecewise(f, plan, u, v, n, prec)
        else:
            enclosure = integrate_enclosure(f, u, v, n, prec)
    integral = enclosure.as_interval()
    if delta.intersects(integral):
        return Verdict(Status.CERTIFIED,
                       detail=f"difference {delta} meets integral {integral}",
                       prec_bits=prec.bits)
    return Verdict(Status.REFUTED,
                   detail=f"difference {delta} is disjoint from integral {integral}",
                   prec_bits=prec.bits)


def uniqueness_gap(f: FunctionSpec, u: Fraction, v: Fraction, n: int,
                   M: Fraction) -> Fraction:
    """A priori bound |v - u| M / n on the spread between integral values.

    Halves exactly when n doubles, certifying convergence of the
    enclosures at rate 1/n for integrands with variation constant M.
    """
    if n < 1:
        raise ValueError("subdivision count must be >= 1")
    return abs(Fraction(v) - Fraction(u)) * Fraction(M) / n
