"""Transfinite rational sequences of length below w^2 and their order.

A :class:`ZSeq` is stored as a list of :class:`OmegaBlock` objects (each an
increasing w-sequence with a declared limit), followed by a non-empty finite
``tail``. The value at the limit position ``w*(j+1)`` is the first tail entry
(or the first entry of the next block) and must agree with the limit of block
``j``. ``terminal_repeat`` appends one copy of the final tail value.

The order: ``x < y`` iff ``y`` strictly extends ``x``, or at the first index
where both are defined and differ, ``y`` has the smaller value.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Sequence

from ..errors import OrderUndecidable, ValidationError
from ..ordinals import Cmp, Ordinal
from . import expr as E
from .expr import Expr, theta, theta_inv

EXACT_CHECK = 64  # values of each block checked exactly on validation, after the structural proof


def scan_cap() -> int:
    return int(os.environ.get("RENORMLAB_SCAN_CAP", 10**6))


def _frac(v) -> Fraction:
    if isinstance(v, float):
        return Fraction(v)
    return Fraction(v)


@dataclass(frozen=True)
class OmegaBlock:
    """Increasing w-sequence: explicit ``head`` values, then ``term(i - len(head))``."""

    term: Expr
    limit: Fraction
    head: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "limit", _frac(self.limit))
        object.__setattr__(self, "head", tuple(_frac(v) for v in self.head))
        if not isinstance(self.term, Expr):
            object.__setattr__(self, "term", E.parse_expr(self.term))

    def value(self, i: int) -> Fraction:
        h = len(self.head)
        return self.head[i] if i < h else self.term.eval(i - h)

    def values(self, count: int) -> list[Fraction]:
        return [self.value(i) for i in range(count)]

    def dropped(self, k: int) -> tuple[tuple, Expr]:
        """(head, term) describing the block with its first ``k`` values removed."""
        h = len(self.head)
        if k <= h:
            return self.head[k:], self.term
        return (), E.shift(self.term, k - h)

    def problem(self) -> str | None:
        """None if the block is a valid increasing w-sequence, else a reason."""
        return _block_problem(self)

    def _problem(self) -> str | None:
        try:
            m = E.analyze(self.term)
        except Exception as exc:  # ExpressionError, division by zero
            return str(exc)
        if m.direction != 1:
            return f"term {self.term} is not strictly increasing"
        if m.limit != self.limit:
            return f"term {self.term} tends to {m.limit}, declared limit is {self.limit}"
        seq = list(self.head) + [m.start]
        for a, b in zip(seq, seq[1:]):
            if not a < b:
                return f"head values {list(map(str, self.head))} do not increase into the term"
        prev = None
        for i in range(EXACT_CHECK):
            v = self.term.eval(i)
            if (prev is not None and v <= prev) or v >= self.limit:
                return f"term {self.term} fails exact check at index {i}"
            prev = v
        return None

    def normalized(self) -> OmegaBlock:
        """Absorb head values that the term already produces one step earlier."""
        head, term = list(self.head), self.term
        while head:
            back = E.shift(term, -1)
            try:
                ok = back.eval(0) == head[-1]
            except Exception:
                ok = False
            if not ok:
                break
            head.pop()
            term = back
        return OmegaBlock(term, self.limit, tuple(head))

    def same(self, other: OmegaBlock) -> bool:
        a, b = self.normalized(), other.normalized()
        return a.head == b.head and a.term == b.term and a.limit == b.limit

    def to_json(self) -> dict:
        return {
            "head": [fmt_q(v) for v in self.head],
            "term": self.term.format("i"),
            "limit": fmt_q(self.limit),
        }


@lru_cache(maxsize=4096)
def _block_problem(b: OmegaBlock) -> str | None:
    return b._problem()


def fmt_q(v) -> str:
    v = Fraction(v)
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


@dataclass(frozen=True, eq=False)
class ZSeq:
    blocks: tuple = ()
    tail: tuple = ()
    terminal_repeat: bool = False

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(self.blocks))
        object.__setattr__(self, "tail", tuple(_frac(v) for v in self.tail))
        object.__setattr__(self, "terminal_repeat", bool(self.terminal_repeat))

    # -- construction ------------------------------------------------------

    @classmethod
    def of(cls, *values, blocks: Sequence[OmegaBlock] = ()) -> ZSeq:
        """Build from final values; a duplicated last value becomes the repeat."""
        vals = [_frac(v) for v in values]
        if len(vals) >= 2 and vals[-1] == vals[-2]:
            return cls(tuple(blocks), tuple(vals[:-1]), True)
        return cls(tuple(blocks), tuple(vals), False)

    # -- shape -------------------------------------------------------------

    @property
    def finals(self) -> tuple:
        if self.terminal_repeat and self.tail:
            return self.tail + (self.tail[-1],)
        return self.tail

    @property
    def n_blocks(self) -> int:
        return len(self.blocks)

    @property
    def length(self) -> Ordinal:
        return Ordinal.omega_times(len(self.blocks), len(self.finals))

    @property
    def last_index(self) -> Ordinal:
        return self.length.predecessor()

    @property
    def last(self) -> Fraction:
        return self.finals[-1]

    def in_Y(self) -> bool:
        return not self.terminal_repeat

    def repeat_index(self) -> Ordinal | None:
        """Index ``beta`` with ``x_beta = x_{beta+1}`` for sequences outside Y."""
        if not self.terminal_repeat:
            return None
        return self.last_index.predecessor()

    def value(self, pos: Ordinal | int) -> Fraction:
        pos = Ordinal.of(pos)
        j, i = pos.omega_coefficient(), pos.finite_part
        if pos != Ordinal.omega_times(j, i):
            raise IndexError(f"position {pos} is beyond w^2")
        if j < len(self.blocks):
            return self.blocks[j].value(i)
        fin = self.finals
        if j == len(self.blocks) and i < len(fin):
            return fin[i]
        raise IndexError(f"position {pos} outside a sequence of length {self.length}")

    def defined_at(self, pos: Ordinal) -> bool:
        return pos < self.length

    def segment(self, j: int):
        """Block ``j`` or, for ``j == n_blocks``, the tuple of final values."""
        return self.blocks[j] if j < len(self.blocks) else self.finals

    def iter_positions(self, per_block: int) -> Iterator[tuple[Ordinal, Fraction]]:
        for j, b in enumerate(self.blocks):
            for i in range(per_block):
                yield Ordinal.omega_times(j, i), b.value(i)
        for i, v in enumerate(self.finals):
            yield Ordinal.omega_times(len(self.blocks), i), v

    def truncated(self, pos: Ordinal) -> tuple[tuple, list]:
        """(blocks, values) describing the restriction to indices ``< pos``."""
        j, i = pos.omega_coefficient(), pos.finite_part
        if j < len(self.blocks):
            return self.blocks[:j], self.blocks[j].values(i)
        return self.blocks, list(self.finals[:i])

    def prefix(self, pos: Ordinal) -> ZSeq:
        """Restriction to indices ``< pos`` (pos must be a successor or 0 < pos)."""
        blocks, vals = self.truncated(pos)
        if not vals:
            raise ValueError(f"restriction to {pos} has no last element")
        return ZSeq.of(*vals, blocks=blocks)

    def extended(self, *values) -> ZSeq:
        return ZSeq.of(*(list(self.finals) + [_frac(v) for v in values]), blocks=self.blocks)

    # -- comparison --------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, ZSeq):
            return NotImplemented
        return z_first_difference(self, other).kind == "equal"

    def __hash__(self):
        # equal sequences may carry different block expressions, so hash only invariants
        return hash((tuple(b.limit for b in self.blocks), self.finals))

    def __lt__(self, other: ZSeq) -> bool:
        return z_compare(self, other) is Cmp.LESS

    def __le__(self, other: ZSeq) -> bool:
        return z_compare(self, other) is not Cmp.GREATER

    def __gt__(self, other: ZSeq) -> bool:
        return z_compare(self, other) is Cmp.GREATER

    def __ge__(self, other: ZSeq) -> bool:
        return z_compare(self, other) is not Cmp.LESS

    def __str__(self) -> str:
        return format_zseq(self)

    def __repr__(self) -> str:
        return f"ZSeq({format_zseq(self)!r})"

    def to_json(self) -> dict:
        return {
            "blocks": [b.to_json() for b in self.blocks],
            "tail": [fmt_q(v) for v in self.tail],
            "terminal_repeat": self.terminal_repeat,
        }


# -- validation ----------------------------------------------------------


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    clause: str | None = None
    detail: str = ""

    def __bool__(self):
        return self.ok


def z_validate(x: ZSeq) -> ValidationReport:
    if not x.tail:
        return ValidationReport(False, "nonempty", "a sequence needs at least one final value")
    for j, b in enumerate(x.blocks):
        why = b.problem()
        if why:
            return ValidationReport(False, "block", f"block {j}: {why}")
    for j, b in enumerate(x.blocks):
        nxt = x.blocks[j + 1].value(0) if j + 1 < len(x.blocks) else x.tail[0]
        if nxt != b.limit:
            return ValidationReport(
                False,
                "continuity",
                f"value {nxt} at w*{j + 1} differs from the limit {b.limit} of block {j}",
            )
    for k, (a, b) in enumerate(zip(x.tail, x.tail[1:])):
        if not a < b:
            return ValidationReport(
                False, "strictness", f"final values {a} and {b} at offsets {k}, {k + 1} do not increase"
            )
    return ValidationReport(True)


def require_valid(x: ZSeq, name: str = "sequence") -> ZSeq:
    rep = z_validate(x)
    if not rep.ok:
        raise ValidationError(f"{name} is not in Z ({rep.clause}): {rep.detail}")
    return x


def in_Z0(x: ZSeq) -> str | None:
    """None if ``x`` (assumed in Z) lies in Z0, else the reason."""
    if x.value(0) != 0:
        return "Z0 sequences start at 0"
    for pos, v in x.iter_positions(4):
        if not 0 <= v <= 1:
            return f"value {v} at {pos} outside [0, 1]"
    for b in x.blocks:
        if not 0 <= b.limit <= 1:
            return f"block limit {b.limit} outside [0, 1]"
    fin = x.finals
    for k, v in enumerate(fin):
        is_last = k == len(fin) - 1
        at_limit = k == 0 and x.n_blocks > 0
        if v == 1 and not (is_last and at_limit):
            return "the value 1 may only occur at a limit final index"
    return None


# -- first difference and order -----------------------------------------


@dataclass(frozen=True)
class FirstDifference:
    """``kind`` is "equal", "extension" or "diverge".

    For "extension", ``shorter`` names the side ("x" or "y") that is a proper
    initial segment and ``position`` is its length. For "diverge",
    ``position`` is the first index of disagreement and ``smaller`` names the
    side holding the smaller value there.
    """

    kind: str
    position: Ordinal | None = None
    shorter: str | None = None
    smaller: str | None = None


def _scan_blocks(a: OmegaBlock, b: OmegaBlock, j: int) -> FirstDifference | None:
    if a.same(b):
        return None
    cap = scan_cap()
    for i in range(cap):
        va, vb = a.value(i), b.value(i)
        if va != vb:
            return FirstDifference(
                "diverge", Ordinal.omega_times(j, i), smaller="x" if va < vb else "y"
            )
    raise OrderUndecidable(
        f"blocks at w*{j} agree on the first {cap} indices but are not structurally equal",
        witness={"block": j, "scanned": cap},
    )


def z_first_difference(x: ZSeq, y: ZSeq) -> FirstDifference:
    jx, jy = len(x.blocks), len(y.blocks)
    for j in range(min(jx, jy)):
        d = _scan_blocks(x.blocks[j], y.blocks[j], j)
        if d:
            return d
    j = min(jx, jy)
    if jx == jy:
        fx, fy = x.finals, y.finals
        for i, (a, b) in enumerate(zip(fx, fy)):
            if a != b:
                return FirstDifference("diverge", Ordinal.omega_times(j, i), smaller="x" if a < b else "y")
        if len(fx) == len(fy):
            return FirstDifference("equal")
        side = "x" if len(fx) < len(fy) else "y"
        return FirstDifference("extension", Ordinal.omega_times(j, min(len(fx), len(fy))), shorter=side)
    # one side has a block where the other has its final values
    if jx < jy:
        fin, blk, fin_side = x.finals, y.blocks[j], "x"
    else:
        fin, blk, fin_side = y.finals, x.blocks[j], "y"
    for i, a in enumerate(fin):
        b = blk.value(i)
        if a != b:
            fin_smaller = a < b
            smaller = fin_side if fin_smaller else ("y" if fin_side == "x" else "x")
            return FirstDifference("diverge", Ordinal.omega_times(j, i), smaller=smaller)
    return FirstDifference("extension", Ordinal.omega_times(j, len(fin)), shorter=fin_side)


def z_compare(x: ZSeq, y: ZSeq) -> Cmp:
    d = z_first_difference(x, y)
    if d.kind == "equal":
        return Cmp.EQUAL
    if d.kind == "extension":
        return Cmp.LESS if d.shorter == "x" else Cmp.GREATER
    # the side with the smaller value at the first difference is the larger sequence
    return Cmp.GREATER if d.smaller == "x" else Cmp.LESS


# -- maps ------------------------------------------------------------------


def _finish(blocks: list[OmegaBlock], finals: list[Fraction]) -> ZSeq:
    return ZSeq.of(*finals, blocks=[b.normalized() for b in blocks])


def theta_map(x: ZSeq) -> ZSeq:
    blocks = [
        OmegaBlock(E.theta_of(b.term), theta(b.limit), tuple(theta(v) for v in b.head))
        for b in x.blocks
    ]
    return ZSeq(tuple(b.normalized() for b in blocks), tuple(theta(v) for v in x.tail), x.terminal_repeat)


def theta_map_inverse(x: ZSeq) -> ZSeq:
    blocks = [
        OmegaBlock(E.theta_inv_of(b.term), theta_inv(b.limit), tuple(theta_inv(v) for v in b.head))
        for b in x.blocks
    ]
    return ZSeq(tuple(b.normalized() for b in blocks), tuple(theta_inv(v) for v in x.tail), x.terminal_repeat)


def phi_map(x: ZSeq) -> ZSeq:
    """Index 0 doubles; successors add the previous value plus one; limits map to 2v+1."""
    blocks = []
    for j, b in enumerate(x.blocks):
        h = len(b.head)
        first = 2 * b.value(0) + (0 if j == 0 else 1)
        head = [first] + [b.value(i) + b.value(i - 1) + 1 for i in range(1, h + 1)]
        # index h+1+m, m >= 0: term(m+1) + term(m) + 1
        term = E.add(E.shift(b.term, 1), b.term, 1)
        blocks.append(OmegaBlock(term, 2 * b.limit + 1, tuple(head)))
    fin = x.finals
    vals = []
    for k, v in enumerate(fin):
        if k == 0:
            vals.append(2 * v + (0 if not x.blocks else 1))
        else:
            vals.append(v + fin[k - 1] + 1)
    return _finish(blocks, vals)


def _qprod(a: Fraction, b: Fraction) -> Fraction:
    return theta_inv(theta(a) * theta(b))


def _block_product(a: OmegaBlock, b: OmegaBlock) -> OmegaBlock:
    h = max(len(a.head), len(b.head))
    head = tuple(_qprod(a.value(i), b.value(i)) for i in range(h))
    _, ta = a.dropped(h)
    _, tb = b.dropped(h)
    term = E.theta_inv_of(E.mul(E.theta_of(ta), E.theta_of(tb)))
    return OmegaBlock(term, _qprod(a.limit, b.limit), head).normalized()


def z_product(x: ZSeq, y: ZSeq) -> ZSeq:
    """Coordinatewise product transported through theta; the surplus of the longer side is copied."""
    jx, jy = len(x.blocks), len(y.blocks)
    m = min(jx, jy)
    blocks = [_block_product(x.blocks[j], y.blocks[j]) for j in range(m)]
    if jx == jy:
        fx, fy = x.finals, y.finals
        k = min(len(fx), len(fy))
        vals = [_qprod(a, b) for a, b in zip(fx, fy)]
        vals += list(fx[k:]) + list(fy[k:])
        return _finish(blocks, vals)
    longer, shorter = (x, y) if jx > jy else (y, x)
    fin = shorter.finals
    blk = longer.blocks[m]
    head = [_qprod(blk.value(i), v) for i, v in enumerate(fin)]
    rest_head, rest_term = blk.dropped(len(fin))
    blocks.append(OmegaBlock(rest_term, blk.limit, tuple(head) + tuple(rest_head)))
    blocks.extend(longer.blocks[m + 1:])
    return _finish(blocks, list(longer.finals))


def to_Z0(x: ZSeq) -> ZSeq:
    """Order embedding of Z into Z: prepend 0 and squash every value into (0, 1)."""
    t = theta_map(x)
    if t.blocks:
        b0 = t.blocks[0]
        blocks = (OmegaBlock(b0.term, b0.limit, (Fraction(0),) + b0.head),) + t.blocks[1:]
        return ZSeq(blocks, t.tail, t.terminal_repeat)
    return ZSeq((), (Fraction(0),) + t.tail, t.terminal_repeat)


# -- text format -----------------------------------------------------------


def format_zseq(x: ZSeq) -> str:
    if not x.blocks:
        return ",".join(fmt_q(v) for v in x.finals)
    parts = []
    for b in x.blocks:
        head = ",".join(fmt_q(v) for v in b.head)
        parts.append(f"{{head:[{head}],term:\"{b.term.format('i')}\",limit:{fmt_q(b.limit)}}}")
    tail = ",".join(fmt_q(v) for v in x.tail)
    return f"blocks=[{','.join(parts)}];tail=[{tail}];repeat={'true' if x.terminal_repeat else 'false'}"
