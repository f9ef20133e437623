"""Single-variable elementary-function expressions.

Provides the AST, a text grammar with parser and canonical printer, exact
and enclosure evaluation, and symbolic differentiation.

Grammar (usual precedence, loosest to tightest: ``+ -``, ``* /``, unary
minus, ``^``)::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := '-' unary | power
    power   := atom ('^' ['-'] INT)?
    atom    := NUM | 'x' | FUNC '(' expr ')' | '(' expr ')'
    FUNC    := 'sqrt' | 'sin' | 'cos' | 'abs' | 'sgn'

``NUM`` is an integer or a fraction literal ``p/q`` written without
whitespace; ``a / b`` with spacing is division.  Exponents are integer
literals only.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt

from .numeric import (
    DEFAULT_PRECISION,
    DivisionByZeroInterval,
    Interval,
    Precision,
    sincos_enclosure,
    sqrt_enclosure,
)


class EvalDomainError(ArithmeticError):
    """Evaluation point or interval touches a pole or leaves a function's domain."""


class ParseError(ValueError):
    def __init__(self, message: str, offset: int, expected=()):
        self.offset = offset
        self.expected = frozenset(expected)
        suffix = f" (expected one of: {', '.join(sorted(self.expected))})" if expected else ""
        super().__init__(f"{message} at offset {offset}{suffix}")


class Expr:
    __slots__ = ()


@dataclass(frozen=True)
class Const(Expr):
    value: Fraction

    def __post_init__(self):
        if isinstance(self.value, int):
            object.__setattr__(self, "value", Fraction(self.value))


@dataclass(frozen=True)
class Var(Expr):
    pass


@dataclass(frozen=True)
class Add(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Sub(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Mul(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Div(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class PowInt(Expr):
    base: Expr
    exponent: int


@dataclass(frozen=True)
class Sqrt(Expr):
    arg: Expr


@dataclass(frozen=True)
class Sin(Expr):
    arg: Expr


@dataclass(frozen=True)
class Cos(Expr):
    arg: Expr


@dataclass(frozen=True)
class Abs(Expr):
    arg: Expr


@dataclass(frozen=True)
class Sgn(Expr):
    arg: Expr


_FUNCTIONS = {"sqrt": Sqrt, "sin": Sin, "cos": Cos, "abs": Abs, "sgn": Sgn}

X = Var()


# ---------------------------------------------------------------------------
# Lexer / parser


_ATOM_EXPECTED = ("number", "x", "function", "(")


class _Lexer:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.tokens: list[tuple[str, object, int]] = []
        self._scan()

    def _scan(self) -> None:
        text = self.text
        n = len(text)
        i = 0
        while i < n:
            ch = text[i]
            if ch in " \t\r\n":
                i += 1
                continue
            if ch.isdigit():
                start = i
                while i < n and text[i].isdigit():
                    i += 1
                num = int(text[start:i])
                # Adjacent p/q (no whitespace) is a fraction literal, not division.
                if i + 1 < n and text[i] == "/" and text[i + 1].isdigit():
                    i += 1
                    dstart = i
                    while i < n and text[i].isdigit():
                        i += 1
                    den = int(text[dstart:i])
                    if den == 0:
                        raise ParseError("fraction literal with zero denominator", dstart)
                    self.tokens.append(("num", Fraction(num, den), start))
                else:
                    self.tokens.append(("num", Fraction(num), start))
                continue
            if ch.isalpha():
                start = i
                while i < n and text[i].isalpha():
                    i += 1
                name = text[start:i]
                if name == "x":
                    self.tokens.append(("var", name, start))
                elif name in _FUNCTIONS:
                    self.tokens.append(("func", name, start))
                else:
                    raise ParseError(
                        f"unknown name {name!r}", start, expected=("x",) + tuple(_FUNCTIONS)
                    )
                continue
            if ch in "+-*/^()":
                self.tokens.append((ch, ch, i))
                i += 1
                continue
            raise ParseError(f"unexpected character {ch!r}", i)
        self.tokens.append(("end", None, n))


class _Parser:
    def __init__(self, text: str):
        self.tokens = _Lexer(text).tokens
        self.pos = 0

    def peek(self) -> tuple[str, object, int]:
        return self.tokens[self.pos]

    def take(self) -> tuple[str, object, int]:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str) -> tuple[str, object, int]:
        tok = self.peek()
        if tok[0] != kind:
            raise ParseError(f"unexpected token {tok[1]!r}", tok[2], expected=(kind,))
        return self.take()

    def parse(self) -> Expr:
        e = self.expr()
        kind, value, offset = self.peek()
        if kind != "end":
            raise ParseError(
                f"unexpected trailing input {value!r}", offset,
                expected=("+", "-", "*", "/", "^", "end of input"),
            )
        return e

    def expr(self) -> Expr:
        e = self.term()
        while self.peek()[0] in ("+", "-"):
            op = self.take()[0]
            rhs = self.term()
            e = Add(e, rhs) if op == "+" else Sub(e, rhs)
        return e

    def term(self) -> Expr:
        e = self.unary()
        while self.peek()[0] in ("*", "/"):
            op = self.take()[0]
            rhs = self.unary()
            e = Mul(e, rhs) if op == "*" else Div(e, rhs)
        return e

    def unary(self) -> Expr:
        if self.peek()[0] == "-":
            self.take()
            inner = self.unary()
            if isinstance(inner, Const):
                return Const(-inner.value)
            return Sub(Const(Fraction(0)), inner)
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.peek()[0] == "^":
            self.take()
            negative = False
            if self.peek()[0] == "-":
                self.take()
                negative = True
            kind, value, offset = self.peek()
            if kind != "num" or value.denominator != 1:
                raise ParseError("exponent must be an integer literal", offset,
                                 expected=("integer",))
            self.take()
            exponent = int(value)
            return PowInt(base, -exponent if negative else exponent)
        return base

    def atom(self) -> Expr:
        kind, value, offset = self.peek()
        if kind == "num":
            self.take()
            return Const(value)
        if kind == "var":
            self.take()
            return X
        if kind == "func":
            self.take()
            self.expect("(")
            inner = self.expr()
            self.expect(")")
            return _FUNCTIONS[value](inner)
        if kind == "(":
            self.take()
            inner = self.expr()
            self.expect(")")
            return inner
        raise ParseError(f"expected an operand, found {value!r}", offset,
                         expected=_ATOM_EXPECTED)


def parse(text: str) -> Expr:
    """Parse `text` into an AST; raises ParseError with a byte offset."""
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# Printer

_LEVEL_ADD = 1
_LEVEL_MUL = 2
_LEVEL_POW = 3
_LEVEL_ATOM = 4

_FUNC_NAMES = {Sqrt: "sqrt", Sin: "sin", Cos: "cos", Abs: "abs", Sgn: "sgn"}


def _fmt(e: Expr, min_level: int) -> str:
    if isinstance(e, Const):
        text = str(e.value)
        level = _LEVEL_ATOM if e.value >= 0 else _LEVEL_ADD
    elif isinstance(e, Var):
        text, level = "x", _LEVEL_ATOM
    elif isinstance(e, Add):
        text, level = f"{_fmt(e.left, _LEVEL_ADD)} + {_fmt(e.right, _LEVEL_MUL)}", _LEVEL_ADD
    elif isinstance(e, Sub):
        text, level = f"{_fmt(e.left, _LEVEL_ADD)} - {_fmt(e.right, _LEVEL_MUL)}", _LEVEL_ADD
    elif isinstance(e, Mul):
        text, level = f"{_fmt(e.left, _LEVEL_MUL)}*{_fmt(e.right, _LEVEL_POW)}", _LEVEL_MUL
    elif isinstance(e, Div):
        # Spaced so it never lexes as a fraction literal.
        text, level = f"{_fmt(e.left, _LEVEL_MUL)} / {_fmt(e.right, _LEVEL_POW)}", _LEVEL_MUL
    elif isinstance(e, PowInt):
        text, level = f"{_fmt(e.base, _LEVEL_ATOM)}^{e.exponent}", _LEVEL_POW
    else:
        name = _FUNC_NAMES[type(e)]
        text, level = f"{name}({_fmt(e.arg, _LEVEL_ADD)})", _LEVEL_ATOM
    if level < min_level:
        return f"({text})"
    return text


def format_expr(e: Expr) -> str:
    """Canonical text form; parse(format_expr(e)) is structurally e."""
    return _fmt(e, 0)


def to_json(e: Expr):
    """Node-tagged canonical JSON form of the AST."""
    if isinstance(e, Const):
        return {"node": "const", "value": str(e.value)}
    if isinstance(e, Var):
        return {"node": "var"}
    if isinstance(e, (Add, Sub, Mul, Div)):
        tag = {Add: "add", Sub: "sub", Mul: "mul", Div: "div"}[type(e)]
        return {"node": tag, "left": to_json(e.left), "right": to_json(e.right)}
    if isinstance(e, PowInt):
        return {"node": "pow_int", "base": to_json(e.base), "exponent": e.exponent}
    return {"node": _FUNC_NAMES[type(e)], "arg": to_json(e.arg)}


# ---------------------------------------------------------------------------
# Evaluation

_SIGN_RESOLUTION = Precision(96)


def _exact_sqrt(v: Fraction):
    if v < 0:
        raise EvalDomainError("square root of a negative value")
    n = isqrt(v.numerator)
    d = isqrt(v.denominator)
    if n * n == v.numerator and d * d == v.denominator:
        return Fraction(n, d)
    return None


def eval_exact(e: Expr, x: Fraction):
    """Exact rational value of `e` at `x`, or None when irrational.

    Poles raise EvalDomainError.  A None result (NotExact) is not an
    error; it signals that an enclosure evaluation is required.
    """
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Var):
        return x
    if isinstance(e, (Add, Sub, Mul, Div)):
        a = eval_exact(e.left, x)
        b = eval_exact(e.right, x)
        if isinstance(e, Div) and b == 0:
            raise EvalDomainError(f"division by zero at x = {x}")
        if a is None or b is None:
            return None
        if isinstance(e, Add):
            return a + b
        if isinstance(e, Sub):
            return a - b
        if isinstance(e, Mul):
            return a * b
        return a / b
    if isinstance(e, PowInt):
        a = eval_exact(e.base, x)
        if e.exponent < 0 and a == 0:
            raise EvalDomainError(f"zero raised to a negative power at x = {x}")
        if a is None:
            return None
        return a ** e.exponent
    if isinstance(e, Sqrt):
        a = eval_exact(e.arg, x)
        if a is None:
            return None
        return _exact_sqrt(a)
    if isinstance(e, (Sin, Cos)):
        a = eval_exact(e.arg, x)
        if a == 0:
            return Fraction(0) if isinstance(e, Sin) else Fraction(1)
        return None
    if isinstance(e, Abs):
        a = eval_exact(e.arg, x)
        return None if a is None else abs(a)
    if isinstance(e, Sgn):
        a = eval_exact(e.arg, x)
        if a is not None:
            return Fraction((a > 0) - (a < 0))
        # The sign is still exact whenever an enclosure resolves it.
        iv = eval_enclosure(e.arg, Interval.point(x), _SIGN_RESOLUTION)
        if iv.lo > 0:
            return Fraction(1)
        if iv.hi < 0:
            return Fraction(-1)
        return None
    raise TypeError(f"unknown expression node {type(e).__name__}")


def _sgn_range(iv: Interval) -> Interval:
    if iv.lo > 0:
        return Interval.point(1)
    if iv.hi < 0:
        return Interval.point(-1)
    if iv.lo == 0 and iv.hi == 0:
        return Interval.point(0)
    if iv.lo == 0:
        return Interval(0, 1)
    if iv.hi == 0:
        return Interval(-1, 0)
    return Interval(-1, 1)


def _int_pow(iv: Interval, n: int) -> Interval:
    if n == 0:
        return Interval.point(1)
    if n < 0:
        try:
            return Interval.point(1) / _int_pow(iv, -n)
        except DivisionByZeroInterval:
            raise EvalDomainError(f"negative power of an interval containing zero: {iv}")
    if n % 2 == 1:
        return Interval(iv.lo ** n, iv.hi ** n)
    return Interval(iv.mig ** n, iv.mag ** n)


def eval_enclosure(e: Expr, x: Interval, prec: Precision = DEFAULT_PRECISION) -> Interval:
    """Interval containing the range of `e` over `x`."""
    if isinstance(e, Const):
        return Interval.point(e.value)
    if isinstance(e, Var):
        return x
    if isinstance(e, Add):
        return eval_enclosure(e.left, x, prec) + eval_enclosure(e.right, x, prec)
    if isinstance(e, Sub):
        return eval_enclosure(e.left, x, prec) - eval_enclosure(e.right, x, prec)
    if isinstance(e, Mul):
        return eval_enclosure(e.left, x, prec) * eval_enclosure(e.right, x, prec)
    if isinstance(e, Div):
        num = eval_enclosure(e.left, x, prec)
        den = eval_enclosure(e.right, x, prec)
        try:
            return num / den
        except DivisionByZeroInterval:
            raise EvalDomainError(f"possible pole inside {x}")
    if isinstance(e, PowInt):
        return _int_pow(eval_enclosure(e.base, x, prec), e.exponent)
    if isinstance(e, Sqrt):
        inner = eval_enclosure(e.arg, x, prec)
        if inner.lo < 0:
            raise EvalDomainError(f"square root argument may be negative over {x}")
        return sqrt_enclosure(inner, prec)
    if isinstance(e, Sin):
        return sincos_enclosure(eval_enclosure(e.arg, x, prec), "sin", prec)
    if isinstance(e, Cos):
        return sincos_enclosure(eval_enclosure(e.arg, x, prec), "cos", prec)
    if isinstance(e, Abs):
        return eval_enclosure(e.arg, x, prec).abs()
    if isinstance(e, Sgn):
        return _sgn_range(eval_enclosure(e.arg, x, prec))
    raise TypeError(f"unknown expression node {type(e).__name__}")


# ---------------------------------------------------------------------------
# Symbolic differentiation

_ZERO_C = Const(Fraction(0))
_ONE_C = Const(Fraction(1))


def _add(a: Expr, b: Expr) -> Expr:
    if a == _ZERO_C:
        return b
    if b == _ZERO_C:
        return a
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value + b.value)
    return Add(a, b)


def _sub(a: Expr, b: Expr) -> Expr:
    if b == _ZERO_C:
        return a
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value - b.value)
    return Sub(a, b)


def _neg(a: Expr) -> Expr:
    if isinstance(a, Const):
        return Const(-a.value)
    return Sub(_ZERO_C, a)


def _mul(a: Expr, b: Expr) -> Expr:
    if a == _ZERO_C or b == _ZERO_C:
        return _ZERO_C
    if a == _ONE_C:
        return b
    if b == _ONE_C:
        return a
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value * b.value)
    return Mul(a, b)


def _div(a: Expr, b: Expr) -> Expr:
    if a == _ZERO_C:
        return _ZERO_C
    if b == _ONE_C:
        return a
    if isinstance(a, Const) and isinstance(b, Const) and b.value != 0:
        return Const(a.value / b.value)
    return Div(a, b)


def symbolic_derivative(e: Expr):
    """Derivative expression, or None where no derivative form is assigned.

    abs differentiates to sgn(arg) * arg'; sgn itself has no derivative
    here and yields None, which propagates.
    """
    if isinstance(e, Const):
        return _ZERO_C
    if isinstance(e, Var):
        return _ONE_C
    if isinstance(e, (Add, Sub)):
        da = symbolic_derivative(e.left)
        db = symbolic_derivative(e.right)
        if da is None or db is None:
            return None
        return _add(da, db) if isinstance(e, Add) else _sub(da, db)
    if isinstance(e, Mul):
        da = symbolic_derivative(e.left)
        db = symbolic_derivative(e.right)
        if da is None or db is None:
            return None
        return _add(_mul(da, e.right), _mul(e.left, db))
    if isinstance(e, Div):
        da = symbolic_derivative(e.left)
        db = symbolic_derivative(e.right)
        if da is None or db is None:
            return None
        return _div(_sub(_mul(da, e.right), _mul(e.left, db)), PowInt(e.right, 2))
    if isinstance(e, PowInt):
        db = symbolic_derivative(e.base)
        if db is None:
            return None
        if e.exponent == 0:
            return _ZERO_C
        inner = PowInt(e.base, e.exponent - 1) if e.exponent != 1 else _ONE_C
        if isinstance(e.base, (Var, Const)) and e.exponent == 1:
            inner = _ONE_C
        return _mul(_mul(Const(Fraction(e.exponent)), inner), db)
    if isinstance(e, Sqrt):
        da = symbolic_derivative(e.arg)
        if da is None:
            return None
        return _div(da, _mul(Const(Fraction(2)), Sqrt(e.arg)))
    if isinstance(e, Sin):
        da = symbolic_derivative(e.arg)
        if da is None:
            return None
        return _mul(Cos(e.arg), da)
    if isinstance(e, Cos):
        da = symbolic_derivative(e.arg)
        if da is None:
            return None
        return _mul(_neg(Sin(e.arg)), da)
    if isinstance(e, Abs):
        da = symbolic_derivative(e.arg)
        if da is None:
            return None
        return _mul(Sgn(e.arg), da)
    if isinstance(e, Sgn):
        return None
    raise TypeError(f"unknown expression node {type(e).__name__}")


# ---------------------------------------------------------------------------
# Function specifications

_POLE_SCAN_PRECISION = Precision(24)
_POLE_SCAN_DEPTH = 9


def _scan_for_poles(body: Expr, domain: Interval, depth: int) -> None:
    try:
        eval_enclosure(body, domain, _POLE_SCAN_PRECISION)
        return
    except EvalDomainError:
        if depth == 0 or domain.lo == domain.hi:
            raise
    mid = domain.mid
    _scan_for_poles(body, Interval(domain.lo, mid), depth - 1)
    _scan_for_poles(body, Interval(mid, domain.hi), depth - 1)


@dataclass(frozen=True)
class FunctionSpec:
    """An expression together with the interval it is claimed on.

    Construction rejects domains where a pole or a square root of a
    negative value survives a subdivision scan.
    """

    body: Expr
    domain: Interval

    def __post_init__(self) -> None:
        _scan_for_poles(self.body, self.domain, _POLE_SCAN_DEPTH)

    @staticmethod
    def from_text(text: str, domain: Interval) -> "FunctionSpec":
        return FunctionSpec(parse(text), domain)

    def eval_exact(self, x: Fraction):
        return eval_exact(self.body, x)

    def eval_enclosure(self, x: Interval, prec: Precision = DEFAULT_PRECISION) -> Interval:
        return eval_enclosure(self.body, x, prec)

    def __str__(self) -> str:
        return f"{format_expr(self.body)} on {self.domain}"
