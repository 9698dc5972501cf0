"""Ordinals below w^w in Cantor normal form.

An ordinal is a tuple of ``(exponent, coefficient)`` terms with strictly
decreasing exponents and positive coefficients; the empty tuple is 0.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from functools import total_ordering
from typing import Iterable

from .errors import EmptyInput, ParseError


class Cmp(Enum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


@total_ordering
@dataclass(frozen=True)
class Ordinal:
    terms: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        terms = tuple((int(e), int(c)) for e, c in self.terms)
        last = None
        for e, c in terms:
            if e < 0 or c <= 0:
                raise ValueError(f"bad CNF term {(e, c)}")
            if last is not None and e >= last:
                raise ValueError("CNF exponents must strictly decrease")
            last = e
        object.__setattr__(self, "terms", terms)

    @classmethod
    def of(cls, n: int | Ordinal) -> Ordinal:
        if isinstance(n, Ordinal):
            return n
        if n < 0:
            raise ValueError("ordinals are non-negative")
        return cls(((0, n),)) if n else cls()

    @classmethod
    def omega_times(cls, k: int, n: int = 0) -> Ordinal:
        """``w*k + n``."""
        terms = []
        if k:
            terms.append((1, k))
        if n:
            terms.append((0, n))
        return cls(tuple(terms))

    # -- structure -------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_finite(self) -> bool:
        return not self.terms or self.terms[0][0] == 0

    def is_limit(self) -> bool:
        return bool(self.terms) and self.terms[-1][0] >= 1

    def is_successor(self) -> bool:
        return bool(self.terms) and self.terms[-1][0] == 0

    @property
    def finite_part(self) -> int:
        if self.terms and self.terms[-1][0] == 0:
            return self.terms[-1][1]
        return 0

    @property
    def limit_part(self) -> Ordinal:
        """The largest limit ordinal (or 0) not exceeding ``self``."""
        if self.is_successor():
            return Ordinal(self.terms[:-1])
        return self

    def omega_coefficient(self) -> int:
        """Coefficient of ``w^1``; meaningful for ordinals below ``w^2``."""
        for e, c in self.terms:
            if e == 1:
                return c
        return 0

    def __int__(self) -> int:
        if not self.is_finite():
            raise ValueError(f"{self} is infinite")
        return self.finite_part

    # -- arithmetic ------------------------------------------------------

    def __add__(self, other: int | Ordinal) -> Ordinal:
        other = Ordinal.of(other)
        if not other.terms:
            return self
        lead = other.terms[0][0]
        kept = [t for t in self.terms if t[0] > lead]
        same = [c for e, c in self.terms if e == lead]
        head_coef = other.terms[0][1] + (same[0] if same else 0)
        return Ordinal(tuple(kept) + ((lead, head_coef),) + other.terms[1:])

    def __radd__(self, other: int) -> Ordinal:
        return Ordinal.of(other) + self

    def successor(self) -> Ordinal:
        return self + 1

    def predecessor(self) -> Ordinal:
        if not self.is_successor():
            raise ValueError(f"{self} has no predecessor")
        e, c = self.terms[-1]
        return Ordinal(self.terms[:-1] + (((0, c - 1),) if c > 1 else ()))

    # -- order -----------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, int):
            other = Ordinal.of(other) if other >= 0 else None
        if not isinstance(other, Ordinal):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(self.terms)

    def __lt__(self, other):
        if isinstance(other, int):
            other = Ordinal.of(other)
        if not isinstance(other, Ordinal):
            return NotImplemented
        return ord_compare(self, other) is Cmp.LESS

    def __str__(self) -> str:
        return format_ordinal(self)

    def __repr__(self) -> str:
        return f"Ordinal({format_ordinal(self)!r})"


def ord_compare(a: Ordinal, b: Ordinal) -> Cmp:
    for (ea, ca), (eb, cb) in zip(a.terms, b.terms):
        if ea != eb:
            return Cmp.GREATER if ea > eb else Cmp.LESS
        if ca != cb:
            return Cmp.GREATER if ca > cb else Cmp.LESS
    if len(a.terms) == len(b.terms):
        return Cmp.EQUAL
    return Cmp.LESS if len(a.terms) < len(b.terms) else Cmp.GREATER


@dataclass(frozen=True)
class Classification:
    kind: str  # "zero" | "successor" | "limit"
    pred: Ordinal | None = None


def ord_classify(a: Ordinal) -> Classification:
    if a.is_zero():
        return Classification("zero")
    if a.is_successor():
        return Classification("successor", a.predecessor())
    return Classification("limit")


def ord_sup(items: Iterable[Ordinal]) -> Ordinal:
    items = list(items)
    if not items:
        raise EmptyInput("sup of an empty list")
    best = items[0]
    for x in items[1:]:
        if ord_compare(x, best) is Cmp.GREATER:
            best = x
    return best


def format_ordinal(a: Ordinal) -> str:
    if not a.terms:
        return "0"
    parts = []
    for e, c in a.terms:
        if e == 0:
            parts.append(str(c))
        elif e == 1:
            parts.append(f"w*{c}")
        else:
            parts.append(f"w^{e}*{c}")
    return "+".join(parts)


_TERM = re.compile(r"^(?:w(?:\^(\d+))?(?:\*(\d+))?|(\d+))$")


def parse_ordinal(text: str) -> Ordinal:
    """Parse ``"w^2*3+w*1+4"``-style CNF; ``w``, ``w^2`` and ``w*2`` are accepted."""
    s = text.replace(" ", "").replace("ω", "w")
    if not s:
        raise ParseError("empty ordinal")
    total = Ordinal()
    for part in s.split("+"):
        m = _TERM.match(part)
        if not m:
            raise ParseError(f"bad ordinal term {part!r} in {text!r}")
        if m.group(3) is not None:
            term = Ordinal.of(int(m.group(3)))
        else:
            e = int(m.group(1)) if m.group(1) else 1
            c = int(m.group(2)) if m.group(2) else 1
            term = Ordinal(((e, c),)) if c else Ordinal()
        total = total + term
    return total


OMEGA = Ordinal(((1, 1),))
