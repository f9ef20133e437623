"""Exact rational arithmetic and outward-rounded interval enclosures.

Every certified comparison in this package bottoms out in exact
`fractions.Fraction` arithmetic.  Field operations on intervals with
rational endpoints need no rounding at all; the irrational primitives
(square root, sine, cosine) return dyadic enclosures whose width is
controlled by a `Precision`.  No floating point is ever used on a
certified path.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from fractions import Fraction

Rational = Fraction

_ZERO = Fraction(0)
_ONE = Fraction(1)


class DivisionByZero(ZeroDivisionError):
    """Exact division of rationals by zero."""


class DivisionByZeroInterval(ZeroDivisionError):
    """Interval division where the divisor contains zero."""


class DomainError(ValueError):
    """Operand outside the mathematical domain of the operation."""


@dataclass(frozen=True)
class Precision:
    """Enclosure width obligation: point inputs yield widths <= 2**(1 - bits)."""

    bits: int = 64

    def __post_init__(self) -> None:
        if self.bits < 1:
            raise ValueError("precision bits must be >= 1")

    def double(self) -> "Precision":
        return Precision(self.bits * 2)


DEFAULT_PRECISION = Precision(64)


def rat_arith(a: Fraction, b: Fraction, op: str) -> Fraction:
    """Exact rational arithmetic; results are canonical by construction."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        if b == 0:
            raise DivisionByZero("rational division by zero")
        return a / b
    raise ValueError(f"unknown rational operation {op!r}")


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


@dataclass(frozen=True)
class Interval:
    """Closed interval with exact rational endpoints, lo <= hi."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "lo", _as_fraction(self.lo))
        object.__setattr__(self, "hi", _as_fraction(self.hi))
        if self.lo > self.hi:
            raise ValueError(f"interval endpoints out of order: {self.lo} > {self.hi}")

    @staticmethod
    def point(x) -> "Interval":
        x = _as_fraction(x)
        return Interval(x, x)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    @property
    def mag(self) -> Fraction:
        """Largest absolute value over the interval."""
        return max(abs(self.lo), abs(self.hi))

    @property
    def mig(self) -> Fraction:
        """Smallest absolute value over the interval."""
        if self.lo <= 0 <= self.hi:
            return _ZERO
        return min(abs(self.lo), abs(self.hi))

    def contains(self, x) -> bool:
        x = _as_fraction(x)
        return self.lo <= x <= self.hi

    def encloses(self, other: "Interval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def intersects(self, other: "Interval") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def intersect(self, other: "Interval"):
        if not self.intersects(other):
            return None
        return Interval(max(self.lo, other.lo), min(self.hi, other.hi))

    def hull(self, other: "Interval") -> "Interval":
        return Interval(min(self.lo, other.lo), max(self.hi, other.hi))

    def abs(self) -> "Interval":
        return Interval(self.mig, self.mag)

    def __neg__(self) -> "Interval":
        return Interval(-self.hi, -self.lo)

    def _coerce(self, other) -> "Interval":
        if isinstance(other, Interval):
            return other
        return Interval.point(other)

    def __add__(self, other) -> "Interval":
        o = self._coerce(other)
        return Interval(self.lo + o.lo, self.hi + o.hi)

    def __sub__(self, other) -> "Interval":
        o = self._coerce(other)
        return Interval(self.lo - o.hi, self.hi - o.lo)

    def __mul__(self, other) -> "Interval":
        o = self._coerce(other)
        products = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return Interval(min(products), max(products))

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Interval":
        o = self._coerce(other)
        if o.lo <= 0 <= o.hi:
            raise DivisionByZeroInterval(f"interval divisor [{o.lo}, {o.hi}] contains zero")
        return self * Interval(1 / o.hi, 1 / o.lo)

    def as_json(self) -> dict:
        return {"lo": str(self.lo), "hi": str(self.hi)}

    def __str__(self) -> str:
        return f"[{self.lo}, {self.hi}]"


UNIT = Interval(-1, 1)


def interval_arith(a: Interval, b: Interval, op: str) -> Interval:
    """Outward-sound interval arithmetic; endpoints stay exact rationals."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown interval operation {op!r}")


def decimal_display(x: Fraction, places: int = 12) -> str:
    """Truncated decimal rendering for display only; never certified."""
    sign = "-" if x < 0 else ""
    ax = abs(x)
    whole = ax.numerator // ax.denominator
    rem = ax - whole
    digits = rem.numerator * 10 ** places // rem.denominator
    return f"{sign}{whole}.{digits:0{places}d}"


def floor_to_bits(x: Fraction, bits: int) -> Fraction:
    scale = 1 << bits
    return Fraction(x.numerator * scale // x.denominator, scale)


def ceil_to_bits(x: Fraction, bits: int) -> Fraction:
    return -floor_to_bits(-x, bits)


def round_out(iv: Interval, bits: int) -> Interval:
    """Round endpoints away from the interior onto the dyadic grid 2**-bits."""
    return Interval(floor_to_bits(iv.lo, bits), ceil_to_bits(iv.hi, bits))


def _sqrt_floor(a: Fraction, bits: int) -> Fraction:
    scaled = (a.numerator << (2 * bits)) // a.denominator
    return Fraction(math.isqrt(scaled), 1 << bits)


def _sqrt_ceil(a: Fraction, bits: int) -> Fraction:
    num = a.numerator << (2 * bits)
    n = math.isqrt(num // a.denominator)
    if n * n * a.denominator == num:
        return Fraction(n, 1 << bits)
    return Fraction(n + 1, 1 << bits)


def sqrt_enclosure(x: Interval, prec: Precision = DEFAULT_PRECISION) -> Interval:
    """Dyadic enclosure of the square root over `x`.

    Endpoints come from the integer square root of the scaled inequality
    n*n <= a * 4**bits, so containment holds by construction and perfect
    squares collapse to points.
    """
    if x.lo < 0:
        raise DomainError(f"square root of interval reaching below zero: {x}")
    return Interval(_sqrt_floor(x.lo, prec.bits), _sqrt_ceil(x.hi, prec.bits))


def _arctan_recip(m: int, tol_bits: int) -> Interval:
    # Alternating series for arctan(1/m); consecutive partial sums bracket
    # the true value because the terms strictly decrease for m >= 2.
    tol = Fraction(1, 1 << tol_bits)
    mm = m * m
    power = m
    total = _ZERO
    prev = _ZERO
    j = 0
    while True:
        term = Fraction(1, (2 * j + 1) * power)
        prev = total
        total = total - term if j % 2 else total + term
        if term <= tol:
            return Interval(min(prev, total), max(prev, total))
        power *= mm
        j += 1


@functools.lru_cache(maxsize=64)
def pi_enclosure(bits: int) -> Interval:
    """Rational enclosure of pi with width <= 2**-bits (Machin's formula)."""
    tol = bits + 8
    enclosure = _arctan_recip(5, tol) * 16 - _arctan_recip(239, tol) * 4
    return round_out(enclosure, bits + 2)


# Size estimate for the range-reduction quotient; never used in a certified
# comparison, only to pick how many pi bits to request.
_HALF_PI_APPROX = Fraction(355, 226)


def _taylor_sincos(fn: str, r: Interval, bits: int) -> Interval:
    """Series enclosure of sin/cos on a small interval |r| <= 1.

    Partial sums are evaluated in interval arithmetic; the tail is bounded
    by the first omitted term (valid since |r| <= 1 makes the terms
    strictly decrease).
    """
    t = ceil_to_bits(max(abs(r.lo), abs(r.hi)), bits + 16)
    if t > 1:
        return UNIT
    tol = Fraction(1, 1 << (bits + 4))
    if fn == "sin":
        deg = 1
        pow_iv = r
        t_pow = t
    else:
        deg = 0
        pow_iv = Interval.point(_ONE)
        t_pow = _ONE
    fact = math.factorial(deg)
    total = Interval.point(_ZERO)
    sign = 1
    for _ in range(300):
        term = pow_iv * Fraction(1, fact)
        total = total + term if sign > 0 else total - term
        fact *= (deg + 1) * (deg + 2)
        deg += 2
        sign = -sign
        t_pow = ceil_to_bits(t_pow * t * t, 2 * bits + 16)
        tail = Fraction(t_pow, fact)
        if tail <= tol:
            return total + Interval(-tail, tail)
        pow_iv = round_out(pow_iv * r * r, 2 * bits + 16)
    return total + Interval(-tail, tail)


@functools.lru_cache(maxsize=65536)
def _sincos_point(x: Fraction, fn: str, bits: int) -> Interval:
    if x == 0:
        return Interval.point(_ZERO if fn == "sin" else _ONE)
    k_est = int(x / _HALF_PI_APPROX)
    pi_bits = 2 * bits + max(abs(k_est).bit_length(), 1) + 8
    half_pi = pi_enclosure(pi_bits) * Fraction(1, 2)
    k = round(x / half_pi.mid)
    r = round_out(Interval.point(x) - half_pi * k, 2 * bits + 8)
    q = k % 4
    if fn == "sin":
        effective, sign = (("sin", 1), ("cos", 1), ("sin", -1), ("cos", -1))[q]
    else:
        effective, sign = (("cos", 1), ("sin", -1), ("cos", -1), ("sin", 1))[q]
    result = _taylor_sincos(effective, r, bits)
    if sign < 0:
        result = -result
    clipped = result.intersect(UNIT)
    if clipped is None:  # cannot happen for a sound enclosure; stay sound anyway
        return UNIT
    return round_out(clipped, bits + 2)


def sincos_enclosure(x: Interval, fn: str, prec: Precision = DEFAULT_PRECISION) -> Interval:
    """Enclosure of sin or cos over `x`, always a subset of [-1, 1].

    Endpoint evaluations are hulled and the result is widened to +-1
    whenever an extremum point (an appropriate multiple of pi/2) may lie
    inside `x` according to the pi enclosure.
    """
    if fn not in ("sin", "cos"):
        raise ValueError(f"unknown function {fn!r}, expected 'sin' or 'cos'")
    bits = prec.bits
    if x.width >= 7:  # full period covered
        return UNIT
    base = _sincos_point(x.lo, fn, bits)
    if x.hi != x.lo:
        base = base.hull(_sincos_point(x.hi, fn, bits))
    half_pi = pi_enclosure(2 * bits + 8) * Fraction(1, 2)
    j_lo = math.floor(x.lo / half_pi.mid) - 2
    j_hi = math.ceil(x.hi / half_pi.mid) + 2
    lo, hi = base.lo, base.hi
    for j in range(j_lo, j_hi + 1):
        crit = half_pi * j
        if crit.hi < x.lo or crit.lo > x.hi:
            continue
        jm = j % 4
        if fn == "sin":
            if jm == 1:
                hi = max(hi, _ONE)
            elif jm == 3:
                lo = min(lo, -_ONE)
        else:
            if jm == 0:
                hi = max(hi, _ONE)
            elif jm == 2:
                lo = min(lo, -_ONE)
    clipped = Interval(lo, hi).intersect(UNIT)
    return clipped if clipped is not None else UNIT
