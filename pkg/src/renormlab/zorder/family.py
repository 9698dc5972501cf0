"""Countable families of sequences: convergence from above, separation, and sup in Z0.

A :class:`ZFamily` is a finite list of explicit members plus an optional
:class:`ZRule` producing members ``z^n`` for ``n >= start``. A rule copies an
initial segment of a base sequence up to a position ``alpha(n)`` and then
appends values given by expressions in ``n``. Rules whose shape is supported
are order-monotone, so their infimum and supremum are computed symbolically.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

from ..errors import MalformedFamily, NotInZ0, NotSeparable
from ..ordinals import Cmp, Ordinal
from . import expr as E
from .seq import ZSeq, in_Z0, z_compare, z_first_difference, z_validate

SAMPLE = 64  # members checked exactly for validity and position


@dataclass(frozen=True)
class ZRule:
    """``z^n = base|alpha(n) ++ (deviation(n), extras(n)...)`` for ``n >= start``.

    ``alpha(n) = position`` (or ``position + n`` when ``grows``). Without a
    deviation the base value at ``alpha(n)`` is kept, so members are prefixes
    of ``base``. Beyond the end of ``base`` the ``deviation`` simply appends.
    """

    base: ZSeq
    position: Ordinal
    deviation: E.Expr | None = None
    extras: tuple = ()
    grows: bool = False
    start: int = 0

    def alpha(self, n: int) -> Ordinal:
        return self.position + n if self.grows else self.position

    def value_exprs(self) -> list[E.Expr]:
        """Expressions for the appended values (constant rules only)."""
        if self.deviation is None:
            first = [E.const(self.base.value(self.position))]
        else:
            first = [self.deviation]
        return first + list(self.extras)

    def member(self, n: int) -> ZSeq:
        if n < self.start:
            raise IndexError(n)
        pos = self.alpha(n)
        blocks, vals = self.base.truncated(pos)
        if self.deviation is None:
            vals.append(self.base.value(pos))
        else:
            vals.append(self.deviation.eval(n))
        vals.extend(e.eval(n) for e in self.extras)
        return ZSeq.of(*vals, blocks=blocks)


@dataclass(frozen=True)
class Shape:
    """Order behaviour of a rule: members move "down", "up" or stay "constant"."""

    motion: str
    inf: ZSeq
    inf_attained: bool
    sup: ZSeq
    sup_attained: bool
    beta: Ordinal | None = None  # index where the members stop agreeing


@dataclass(frozen=True)
class ZFamily:
    members: tuple = ()
    rule: ZRule | None = None
    _shape: list = field(default_factory=list, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(self.members))

    def is_empty(self) -> bool:
        return not self.members and self.rule is None

    def iter_members(self, count: int = SAMPLE) -> Iterator[ZSeq]:
        yield from self.members
        if self.rule is not None:
            for n in range(self.rule.start, self.rule.start + count):
                yield self.rule.member(n)

    def shape(self) -> Shape | None:
        if self.rule is None:
            return None
        if not self._shape:
            self._shape.append(rule_shape(self.rule))
        return self._shape[0]


def _check_members(rule: ZRule):
    prev = None
    for n in range(rule.start, rule.start + SAMPLE):
        z = rule.member(n)
        rep = z_validate(z)
        if not rep.ok:
            raise MalformedFamily(f"member {n} is not in Z: {rep.detail}", witness={"n": n})
        prev = z
    return prev


def rule_shape(rule: ZRule) -> Shape:
    _check_members(rule)
    if rule.grows:
        return _growing_shape(rule)
    blocks, prefix = rule.base.truncated(rule.position)
    exprs = rule.value_exprs()
    monos = []
    for e in exprs:
        try:
            monos.append(E.analyze_from(e, rule.start))
        except Exception as exc:
            raise MalformedFamily(f"family value {e} is not certified monotone: {exc}")
    k = next((i for i, m in enumerate(monos) if m.direction != 0), None)
    first = rule.member(rule.start)
    if k is None:
        return Shape("constant", first, True, first, True)
    fixed = prefix + [m.start for m in monos[:k]]
    m = monos[k]
    beta = Ordinal.omega_times(len(blocks), len(fixed))
    if m.direction == 1:
        # values grow with n, so members decrease in the order
        if m.limit == E.INF and not (fixed or blocks):
            raise MalformedFamily("members decrease without a lower bound in Z")
        if m.limit == E.INF:
            lim = ZSeq.of(*fixed, blocks=blocks)
        else:
            lim = ZSeq.of(*(fixed + [m.limit, m.limit]), blocks=blocks)
        return Shape("down", lim, False, first, True, beta)
    last = fixed[-1] if fixed else (blocks[-1].limit if blocks else None)
    if m.limit == -E.INF or (last is not None and m.limit < last):
        raise MalformedFamily(
            f"values {e_fmt(exprs[k])} fall below the preceding value {last}",
            witness={"position": str(beta)},
        )
    lim = ZSeq.of(*(fixed + [m.limit]), blocks=blocks)
    return Shape("up", first, True, lim, False, beta)


def e_fmt(e: E.Expr) -> str:
    return e.format("n")


def _growing_shape(rule: ZRule) -> Shape:
    if rule.extras:
        raise MalformedFamily("moving positions with trailing values are not supported")
    j = rule.position.omega_coefficient()
    if rule.position != Ordinal.omega_times(j, rule.position.finite_part) or j >= rule.base.n_blocks:
        raise MalformedFamily("a moving position must run through a block of the base sequence")
    base = rule.base
    limit_seq = ZSeq.of(base.blocks[j].limit, blocks=base.blocks[: j + 1])
    first = rule.member(rule.start)
    beta = Ordinal.omega_times(j + 1)
    if rule.deviation is None:
        # members are longer and longer prefixes: increasing
        return Shape("up", first, True, limit_seq, False, beta)
    for n in range(rule.start, rule.start + SAMPLE):
        if not rule.deviation.eval(n) < base.value(rule.alpha(n)):
            raise MalformedFamily(
                f"deviation at member {n} does not drop below the base value", witness={"n": n}
            )
    below = ZSeq.of(base.blocks[j].limit, base.blocks[j].limit, blocks=base.blocks[: j + 1])
    return Shape("down", below, False, first, True, beta)


# -- convergence -----------------------------------------------------------


@dataclass(frozen=True)
class Convergence:
    converges: bool
    case: int | None = None
    infimum: ZSeq | None = None
    reason: str = ""

    def __bool__(self):
        return self.converges


def convergence_case(x: ZSeq) -> int:
    """1 for x in Y; 2 if the repeated index is 0 or a successor; 3 if it is a limit."""
    beta = x.repeat_index()
    if beta is None:
        return 1
    return 3 if beta.is_limit() else 2


def _require_above(x: ZSeq, fam: ZFamily):
    for z in fam.members:
        if z_compare(z, x) is not Cmp.GREATER:
            raise MalformedFamily(f"member {z} is not above {x}", witness={"member": str(z)})
    if fam.rule is not None:
        for n in range(fam.rule.start, fam.rule.start + SAMPLE):
            z = fam.rule.member(n)
            if z_compare(z, x) is not Cmp.GREATER:
                raise MalformedFamily(f"member {n} = {z} is not above {x}", witness={"n": n})
        sh = fam.shape()
        if sh.motion == "down" and z_compare(sh.inf, x) is Cmp.LESS:
            raise MalformedFamily(f"members eventually drop below {x}")


def z_converges(x: ZSeq, fam: ZFamily) -> Convergence:
    """Whether ``fam`` (all members above ``x``) converges to ``x`` from above."""
    _require_above(x, fam)
    if fam.rule is None:
        return Convergence(False, reason="finite families have no limit points")
    sh = fam.shape()
    if sh.motion != "down":
        return Convergence(False, infimum=sh.inf, reason="the members do not decrease")
    if z_compare(sh.inf, x) is Cmp.EQUAL:
        return Convergence(True, convergence_case(x), sh.inf)
    return Convergence(False, infimum=sh.inf, reason=f"members decrease to {sh.inf}")


def family_infimum(fam: ZFamily) -> tuple[ZSeq, bool]:
    """(inf, attained) over all members."""
    cands: list[tuple[ZSeq, bool]] = [(z, True) for z in fam.members]
    if fam.rule is not None:
        sh = fam.shape()
        cands.append((sh.inf, sh.inf_attained))
    if not cands:
        raise MalformedFamily("empty family")
    best, att = cands[0]
    for z, a in cands[1:]:
        c = z_compare(z, best)
        if c is Cmp.LESS or (c is Cmp.EQUAL and a):
            best, att = z, a
    return best, att


def witness_between(x: ZSeq, top: ZSeq) -> ZSeq:
    """A member ``w`` of Y with ``x < w <= top`` (requires ``x < top``)."""
    d = z_first_difference(x, top)
    if d.kind == "extension" and d.shorter == "x":
        v = top.value(d.position)
        if v > x.last:
            return x.extended(v)
        return x.extended(v + 1)
    if d.kind == "diverge" and d.smaller == "y":
        blocks, vals = top.truncated(d.position)
        mid = (top.value(d.position) + x.value(d.position)) / 2
        return ZSeq.of(*(vals + [mid]), blocks=blocks)
    raise ValueError(f"{top} is not above {x}")


def some_above(x: ZSeq) -> ZSeq:
    """An element of Y strictly above ``x``."""
    if x.in_Y():
        return x.extended(x.last + 1)
    beta = x.repeat_index()
    if beta.is_limit():
        # lower a value inside the last block instead
        beta = Ordinal.omega_times(beta.omega_coefficient() - 1, 1)
    blocks, vals = x.truncated(beta)
    prev = vals[-1] if vals else (blocks[-1].limit if blocks else None)
    v = x.value(beta)
    new = v - 1 if prev is None else (prev + v) / 2
    return ZSeq.of(*(vals + [new]), blocks=blocks)


def z_separate(x: ZSeq, fam: ZFamily) -> ZSeq:
    """``w`` in Y with ``x < w <= z`` for every member ``z``; raises NotSeparable on convergence."""
    conv = z_converges(x, fam)
    if conv.converges:
        raise NotSeparable(f"family converges to {x} (case {conv.case})", witness={"case": conv.case})
    inf, _ = family_infimum(fam)
    w = witness_between(x, inf)
    assert w.in_Y()
    return w


# -- sup in Z0 -------------------------------------------------------------


@dataclass(frozen=True)
class SupResult:
    sup: ZSeq
    attained: bool
    fixed_until: Ordinal | None = None  # least index that is not fixed, for rule families


def _check_z0(z: ZSeq, label: str):
    rep = z_validate(z)
    if not rep.ok:
        raise NotInZ0(f"{label} is not in Z: {rep.detail}")
    why = in_Z0(z)
    if why:
        raise NotInZ0(f"{label} = {z}: {why}", witness={"member": str(z)})


def _greatest(items: list[ZSeq]) -> ZSeq:
    best = items[0]
    for z in items[1:]:
        if z_compare(z, best) is Cmp.GREATER:
            best = z
    return best


def fixed_pair_sup(items: list[ZSeq]) -> ZSeq:
    """Literal fixed-pair construction for a finite family.

    ``(alpha, x)`` is fixed when every ``y >= x`` in the family is defined and
    agrees with ``x`` up to ``alpha``. The result copies the fixed values; for
    a finite family the construction ends at the greatest member.
    """
    out_vals: dict[Ordinal, Fraction] = {}
    for x in items:
        above = [y for y in items if z_compare(y, x) is not Cmp.LESS]
        for pos, v in x.iter_positions(1):
            if all(y.defined_at(pos) and y.value(pos) == v for y in above):
                out_vals.setdefault(pos, v)
    top = _greatest(items)
    # the fixed values form exactly the greatest member
    for pos, v in top.iter_positions(1):
        assert out_vals.get(pos) == v
    return top


def z0_sup(fam: ZFamily) -> SupResult:
    if fam.is_empty():
        return SupResult(ZSeq.of(0), False)
    for k, z in enumerate(fam.iter_members()):
        _check_z0(z, f"member {k}")
    explicit = list(fam.members)
    best = fixed_pair_sup(explicit) if explicit else None
    if fam.rule is None:
        return SupResult(best, True)
    sh = fam.shape()
    cand, attained = sh.sup, sh.sup_attained
    if best is not None and z_compare(best, cand) is not Cmp.LESS:
        return SupResult(best, True)
    if not attained:
        _check_z0(cand, "supremum")
    return SupResult(cand, attained, None if attained else sh.beta)
