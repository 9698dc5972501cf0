"""Closed expression language for index-dependent sequence terms.

Expressions are built from rational constants, one index variable (written
``i`` for block terms and ``n`` for family rules), ``+ - * /``, ``abs``,
geometric atoms ``q^i`` with ``0 < q < 1``, and the order isomorphism
``theta`` together with its inverse.

Every node is constructed through the smart constructors below, which keep
expressions in a canonical form (flattened, constant-folded, sorted), so
structural equality is a useful proxy for equality of the sequences.

:func:`analyze` certifies monotonicity structurally: an expression is accepted
only if simple composition rules prove it is constant or strictly monotone on
``{0, 1, 2, ...}``, and the same rules deliver its exact limit.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Union

from ..errors import ExpressionError

Number = Union[Fraction, float]  # float only for +-inf limits
INF = math.inf


def theta(q: Fraction) -> Fraction:
    """Order isomorphism from the rationals onto (0, 1)."""
    q = Fraction(q)
    return Fraction(1, 2) + q / (2 * (1 + abs(q)))


def theta_inv(y: Fraction) -> Fraction:
    y = Fraction(y)
    if not 0 < y < 1:
        raise ValueError(f"theta_inv is defined on (0, 1), got {y}")
    s = 2 * y - 1
    return s / (1 - abs(s))


def _theta_ext(v: Number) -> Number:
    if v == INF:
        return Fraction(1)
    if v == -INF:
        return Fraction(0)
    return theta(v)


def _theta_inv_ext(v: Number) -> Number:
    if v == 1:
        return INF
    if v == 0:
        return -INF
    return theta_inv(v)


class Expr:
    """Base class; instances are immutable and hashable."""

    __slots__ = ()

    def eval(self, k: int) -> Fraction:
        return _eval_cached(self, k)

    def format(self, var: str = "i") -> str:
        return _fmt(self, var, 0)

    def __str__(self) -> str:
        return self.format()

    def __repr__(self) -> str:
        return f"Expr({self.format()!r})"

    def is_const(self) -> bool:
        return isinstance(self, Const)


@dataclass(frozen=True, repr=False)
class Const(Expr):
    value: Fraction


@dataclass(frozen=True, repr=False)
class Var(Expr):
    pass


@dataclass(frozen=True, repr=False)
class Geo(Expr):
    q: Fraction


@dataclass(frozen=True, repr=False)
class Sum(Expr):
    terms: tuple


@dataclass(frozen=True, repr=False)
class Prod(Expr):
    factors: tuple


@dataclass(frozen=True, repr=False)
class Recip(Expr):
    arg: Expr


@dataclass(frozen=True, repr=False)
class Abs(Expr):
    arg: Expr


@dataclass(frozen=True, repr=False)
class Theta(Expr):
    arg: Expr


@dataclass(frozen=True, repr=False)
class ThetaInv(Expr):
    arg: Expr


VAR = Var()
ZERO = Const(Fraction(0))
ONE = Const(Fraction(1))


def _key(e: Expr) -> str:
    return _canon_str(e)


@lru_cache(maxsize=65536)
def _canon_str(e: Expr) -> str:
    return _fmt(e, "i", 0)


def const(v) -> Const:
    return Const(Fraction(v))


def _as_expr(x) -> Expr:
    if isinstance(x, Expr):
        return x
    return const(x)


def _split_coef(t: Expr) -> tuple[Fraction, Expr | None]:
    if isinstance(t, Const):
        return t.value, None
    if isinstance(t, Prod) and isinstance(t.factors[0], Const):
        rest = t.factors[1:]
        return t.factors[0].value, rest[0] if len(rest) == 1 else Prod(rest)
    return Fraction(1), t


def add(*xs) -> Expr:
    flat: list[Expr] = []
    for x in xs:
        x = _as_expr(x)
        if isinstance(x, Sum):
            flat.extend(x.terms)
        else:
            flat.append(x)
    c = Fraction(0)
    coefs: dict[str, list] = {}
    for t in flat:
        k, rest = _split_coef(t)
        if rest is None:
            c += k
            continue
        slot = coefs.setdefault(_key(rest), [Fraction(0), rest])
        slot[0] += k
    terms = [mul(k, rest) for k, rest in coefs.values() if k != 0]
    terms.sort(key=_key)
    if c != 0:
        terms.append(Const(c))
    if not terms:
        return ZERO
    if len(terms) == 1:
        return terms[0]
    return Sum(tuple(terms))


def neg(x) -> Expr:
    return mul(-1, x)


def sub(a, b) -> Expr:
    return add(a, neg(b))


def mul(*xs) -> Expr:
    flat: list[Expr] = []
    for x in xs:
        x = _as_expr(x)
        if isinstance(x, Prod):
            flat.extend(x.factors)
        else:
            flat.append(x)
    c = Fraction(1)
    geo = Fraction(1)
    has_geo = False
    rest: list[Expr] = []
    for f in flat:
        if isinstance(f, Const):
            c *= f.value
        elif isinstance(f, Geo):
            geo *= f.q
            has_geo = True
        else:
            rest.append(f)
    if c == 0:
        return ZERO
    if has_geo:
        rest.append(Geo(geo))
    rest.sort(key=_key)
    if not rest:
        return Const(c)
    if c == 1 and len(rest) == 1:
        return rest[0]
    if len(rest) == 1 and isinstance(rest[0], Sum) and c != 1:
        # distribute a constant over a sum so c*(a+b) and c*a+c*b coincide
        return add(*(mul(c, t) for t in rest[0].terms))
    if c != 1:
        rest.insert(0, Const(c))
    return Prod(tuple(rest))


def recip(x) -> Expr:
    x = _as_expr(x)
    if isinstance(x, Const):
        if x.value == 0:
            raise ExpressionError("division by zero")
        return Const(1 / x.value)
    if isinstance(x, Recip):
        return x.arg
    k, rest = _split_coef(x)
    if k != 1 and rest is not None:
        return mul(1 / k, recip(rest))
    if isinstance(x, Prod):
        return mul(*(recip(f) for f in x.factors))
    return Recip(x)


def div(a, b) -> Expr:
    return mul(a, recip(b))


def absval(x) -> Expr:
    x = _as_expr(x)
    if isinstance(x, Const):
        return Const(abs(x.value))
    if isinstance(x, Abs):
        return x
    return Abs(x)


def theta_of(x) -> Expr:
    x = _as_expr(x)
    if isinstance(x, Const):
        return Const(theta(x.value))
    if isinstance(x, ThetaInv):
        return x.arg
    return Theta(x)


def theta_inv_of(x) -> Expr:
    x = _as_expr(x)
    if isinstance(x, Const):
        return Const(theta_inv(x.value))
    if isinstance(x, Theta):
        return x.arg
    return ThetaInv(x)


def geo(q) -> Expr:
    q = Fraction(q)
    if not 0 < q < 1:
        raise ExpressionError(f"geometric base must lie in (0, 1), got {q}")
    return Geo(q)


# -- evaluation and substitution ------------------------------------------


@lru_cache(maxsize=1 << 17)
def _eval_cached(e: Expr, k: int) -> Fraction:
    return _eval(e, k)


def _eval(e: Expr, k: int) -> Fraction:
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Var):
        return Fraction(k)
    if isinstance(e, Geo):
        return e.q ** k
    if isinstance(e, Sum):
        return sum((_eval(t, k) for t in e.terms), Fraction(0))
    if isinstance(e, Prod):
        out = Fraction(1)
        for f in e.factors:
            out *= _eval(f, k)
        return out
    if isinstance(e, Recip):
        v = _eval(e.arg, k)
        if v == 0:
            raise ExpressionError(f"division by zero in {e} at {k}")
        return 1 / v
    if isinstance(e, Abs):
        return abs(_eval(e.arg, k))
    if isinstance(e, Theta):
        return theta(_eval(e.arg, k))
    if isinstance(e, ThetaInv):
        return theta_inv(_eval(e.arg, k))
    raise TypeError(e)


@lru_cache(maxsize=65536)
def shift(e: Expr, k: int) -> Expr:
    """Substitute ``var -> var + k``."""
    if k == 0 or isinstance(e, Const):
        return e
    if isinstance(e, Var):
        return add(VAR, k)
    if isinstance(e, Geo):
        return mul(Fraction(e.q) ** k, e)
    if isinstance(e, Sum):
        return add(*(shift(t, k) for t in e.terms))
    if isinstance(e, Prod):
        return mul(*(shift(f, k) for f in e.factors))
    if isinstance(e, Recip):
        return recip(shift(e.arg, k))
    if isinstance(e, Abs):
        return absval(shift(e.arg, k))
    if isinstance(e, Theta):
        return theta_of(shift(e.arg, k))
    if isinstance(e, ThetaInv):
        return theta_inv_of(shift(e.arg, k))
    raise TypeError(e)


# -- structural monotonicity ------------------------------------------------


@dataclass(frozen=True)
class Mono:
    """Certified behaviour on ``k = 0, 1, 2, ...``.

    ``direction`` is +1 (strictly increasing), -1 (strictly decreasing) or 0
    (constant). ``start`` is the value at 0 and ``limit`` the exact limit,
    possibly ``+-inf``.
    """

    direction: int
    start: Fraction
    limit: Number

    @property
    def lower(self) -> Number:
        return self.start if self.direction >= 0 else self.limit

    @property
    def upper(self) -> Number:
        return self.start if self.direction <= 0 else self.limit

    @property
    def lower_attained(self) -> bool:
        return self.direction >= 0

    @property
    def upper_attained(self) -> bool:
        return self.direction <= 0

    def nonneg(self) -> bool:
        return self.lower >= 0

    def nonpos(self) -> bool:
        return self.upper <= 0

    def positive(self) -> bool:
        return self.lower > 0 or (self.lower == 0 and not self.lower_attained)

    def negative(self) -> bool:
        return self.upper < 0 or (self.upper == 0 and not self.upper_attained)

    def negated(self) -> Mono:
        return Mono(-self.direction, -self.start, -self.limit)


def _mul_num(a: Number, b: Number) -> Number:
    if (a == 0 and math.isinf(b)) or (b == 0 and math.isinf(a)):
        raise ExpressionError("limit of the form 0 * inf")
    if math.isinf(a) or math.isinf(b):
        return math.copysign(INF, float(a) * float(b))
    return a * b


def _reject(e: Expr, why: str):
    raise ExpressionError(f"{e.format()} lies outside the monotone rule set: {why}")


@lru_cache(maxsize=65536)
def analyze(e: Expr) -> Mono:
    if isinstance(e, Const):
        return Mono(0, e.value, e.value)
    if isinstance(e, Var):
        return Mono(1, Fraction(0), INF)
    if isinstance(e, Geo):
        return Mono(-1, Fraction(1), Fraction(0))
    if isinstance(e, Sum):
        parts = [analyze(t) for t in e.terms]
        dirs = {p.direction for p in parts} - {0}
        if len(dirs) > 1:
            _reject(e, "summands move in opposite directions")
        d = dirs.pop() if dirs else 0
        start = sum((p.start for p in parts), Fraction(0))
        limit: Number = Fraction(0)
        for p in parts:
            limit = limit + p.limit
        return Mono(d, start, limit)
    if isinstance(e, Prod):
        sign = 1
        coef = Fraction(1)
        norm: list[Mono] = []
        for f in e.factors:
            m = analyze(f)
            if m.direction == 0:
                coef *= m.start
                continue
            if m.nonneg():
                norm.append(m)
            elif m.nonpos():
                norm.append(m.negated())
                sign = -sign
            else:
                _reject(e, f"factor {f.format()} changes sign")
        if not norm:
            return Mono(0, coef, coef)
        dirs = {m.direction for m in norm}
        if len(dirs) > 1:
            _reject(e, "factors move in opposite directions")
        d = dirs.pop()
        start: Number = Fraction(1)
        limit = Fraction(1)
        for m in norm:
            start = start * m.start
            limit = _mul_num(limit, m.limit)
        out = Mono(d, start, limit)
        total = coef * sign
        if total == 0:
            return Mono(0, Fraction(0), Fraction(0))
        if total < 0:
            out = out.negated()
            total = -total
        return Mono(out.direction, out.start * total, _mul_num(out.limit, total))
    if isinstance(e, Recip):
        m = analyze(e.arg)
        if m.positive():
            inf_sign = 1
        elif m.negative():
            inf_sign = -1
        else:
            _reject(e, "denominator can vanish")
        if m.direction == 0:
            return Mono(0, 1 / m.start, 1 / m.start)
        if math.isinf(m.limit):
            lim: Number = Fraction(0)
        elif m.limit == 0:
            lim = math.copysign(INF, inf_sign)
        else:
            lim = 1 / m.limit
        return Mono(-m.direction, 1 / m.start, lim)
    if isinstance(e, Abs):
        m = analyze(e.arg)
        if m.nonneg():
            return m
        if m.nonpos():
            return m.negated()
        _reject(e, "argument of abs changes sign")
    if isinstance(e, Theta):
        m = analyze(e.arg)
        return Mono(m.direction, theta(m.start), _theta_ext(m.limit))
    if isinstance(e, ThetaInv):
        m = analyze(e.arg)
        lo_ok = m.lower > 0 or (m.lower == 0 and not m.lower_attained)
        hi_ok = m.upper < 1 or (m.upper == 1 and not m.upper_attained)
        if not (lo_ok and hi_ok):
            _reject(e, "argument of thetainv leaves (0, 1)")
        return Mono(m.direction, theta_inv(m.start), _theta_inv_ext(m.limit))
    raise TypeError(e)


def analyze_from(e: Expr, start: int) -> Mono:
    """Behaviour on ``k = start, start + 1, ...``."""
    return analyze(shift(e, start))


# -- formatting ------------------------------------------------------------

# precedence: 0 sum context, 1 product context, 2 atom context


def _fmt_frac(v: Fraction) -> str:
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def _fmt(e: Expr, var: str, prec: int) -> str:
    if isinstance(e, Const):
        s = _fmt_frac(e.value)
        if (e.value < 0 and prec >= 1) or ("/" in s and prec >= 1):
            return f"({s})"
        return s
    if isinstance(e, Var):
        return var
    if isinstance(e, Geo):
        return f"({_fmt_frac(e.q)})^{var}"
    if isinstance(e, Sum):
        out = _fmt(e.terms[0], var, 0)
        for t in e.terms[1:]:
            k, rest = _split_coef(t)
            if k < 0:
                out += "-" + _fmt(mul(-k, rest) if rest is not None else Const(-k), var, 1)
            else:
                out += "+" + _fmt(t, var, 0)
        return f"({out})" if prec >= 1 else out
    if isinstance(e, Prod):
        fs = list(e.factors)
        lead = ""
        if isinstance(fs[0], Const):
            c = fs[0].value
            fs = fs[1:]
            if c == -1:
                lead = "-"
            elif c.denominator == 1:
                lead = _fmt_frac(c) + "*"
            else:
                lead = f"({_fmt_frac(c)})*"
        num = [f for f in fs if not isinstance(f, Recip)]
        den = [f.arg for f in fs if isinstance(f, Recip)]
        s = "*".join(_fmt(f, var, 2) for f in num) if num else "1"
        for d in den:
            s += "/" + _fmt(d, var, 2)
        s = lead + s
        return f"({s})" if prec >= 1 and lead == "-" or prec >= 2 else s
    if isinstance(e, Recip):
        s = "1/" + _fmt(e.arg, var, 2)
        return f"({s})" if prec >= 1 else s
    if isinstance(e, Abs):
        return f"abs({_fmt(e.arg, var, 0)})"
    if isinstance(e, Theta):
        return f"theta({_fmt(e.arg, var, 0)})"
    if isinstance(e, ThetaInv):
        return f"thetainv({_fmt(e.arg, var, 0)})"
    raise TypeError(e)


# -- parsing ---------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+(?:\.\d+)?)|([A-Za-z_][A-Za-z_0-9]*)|(.))")
_FUNCS = {"abs": absval, "theta": theta_of, "thetainv": theta_inv_of}


class _Parser:
    def __init__(self, text: str, variables: tuple[str, ...]):
        self.text = text
        self.variables = variables
        self.toks: list[tuple[str, str]] = []
        for m in _TOKEN.finditer(text):
            if m.group(1):
                self.toks.append(("num", m.group(1)))
            elif m.group(2):
                self.toks.append(("name", m.group(2)))
            elif m.group(3) and not m.group(3).isspace():
                self.toks.append(("op", m.group(3)))
        self.pos = 0

    def error(self, msg: str):
        raise ExpressionError(f"cannot parse {self.text!r}: {msg}")

    def peek(self):
        return self.toks[self.pos] if self.pos < len(self.toks) else (None, None)

    def take(self, value=None):
        tok = self.peek()
        if tok[0] is None or (value is not None and tok[1] != value):
            self.error(f"expected {value or 'token'}")
        self.pos += 1
        return tok

    def parse(self) -> Expr:
        e = self.sum()
        if self.pos != len(self.toks):
            self.error(f"unexpected {self.peek()[1]!r}")
        return e

    def sum(self) -> Expr:
        e = self.product()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            rhs = self.product()
            e = add(e, rhs) if op == "+" else sub(e, rhs)
        return e

    def product(self) -> Expr:
        e = self.unary()
        while self.peek()[1] in ("*", "/"):
            op = self.take()[1]
            rhs = self.unary()
            e = mul(e, rhs) if op == "*" else div(e, rhs)
        return e

    def unary(self) -> Expr:
        if self.peek()[1] == "-":
            self.take()
            return neg(self.unary())
        if self.peek()[1] == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.peek()[1] != "^":
            return base
        self.take("^")
        if not isinstance(base, Const):
            self.error("only constant bases may be raised to the index")
        expo = self.exponent()
        return mul(Fraction(base.value) ** expo, geo(base.value)) if expo else geo(base.value)

    def exponent(self) -> int:
        # var, (var), (var + k), (var - k)
        if self.peek()[0] == "name" and self.peek()[1] in self.variables:
            self.take()
            return 0
        self.take("(")
        kind, name = self.take()
        if kind != "name" or name not in self.variables:
            self.error("exponent must be the index variable")
        off = 0
        if self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            kind, num = self.take()
            if kind != "num" or "." in num:
                self.error("exponent offset must be an integer")
            off = int(num) if op == "+" else -int(num)
        self.take(")")
        return off

    def atom(self) -> Expr:
        kind, val = self.peek()
        if kind == "num":
            self.take()
            return const(Fraction(val))
        if kind == "name":
            self.take()
            if val in self.variables:
                return VAR
            if val in _FUNCS:
                self.take("(")
                arg = self.sum()
                self.take(")")
                return _FUNCS[val](arg)
            self.error(f"unknown name {val!r}")
        if val == "(":
            self.take()
            e = self.sum()
            self.take(")")
            return e
        if val == "|":
            self.take()
            e = self.sum()
            self.take("|")
            return absval(e)
        self.error(f"unexpected {val!r}")


def parse_expr(text: str, variables: tuple[str, ...] = ("i", "n")) -> Expr:
    return _Parser(str(text), variables).parse()
