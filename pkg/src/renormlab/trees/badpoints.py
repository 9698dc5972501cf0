"""Bad points of increasing maps and the strictification of Z-valued maps."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ..errors import MalformedFamily, NotIncreasing, PreconditionFailed
from ..ordinals import Cmp
from ..zorder import expr as E
from ..zorder.family import ZFamily, ZRule, family_infimum, some_above, witness_between, z_converges
from ..zorder.seq import ZSeq, theta_map, z_compare, z_product
from .core import Tree
from .plateaux import check_increasing


@dataclass(frozen=True)
class SuccessorFamily:
    """Distinct immediate successors ``u_n`` of ``node``.

    ``members`` are explicit children in the tree (their values come from the
    map under test); ``tail`` describes infinitely many further successors by
    their values: an expression in ``n`` for real-valued maps or a
    :class:`ZFamily` for Z-valued maps.
    """

    node: object
    members: tuple = ()
    tail: object = None
    start: int = 1

    def check(self, T: Tree):
        if len(set(self.members)) != len(self.members):
            raise MalformedFamily(f"family at {self.node!r} repeats a successor")
        kids = set(T.successors(self.node))
        for m in self.members:
            if m not in kids:
                raise MalformedFamily(f"{m!r} is not an immediate successor of {self.node!r}")


@dataclass(frozen=True)
class BadPoint:
    node: object
    case: int | None
    detail: str


def detect_bad_points(T: Tree, rho: dict, families: list[SuccessorFamily] = ()) -> list[BadPoint]:
    """Nodes whose declared successor values converge to their own value."""
    check_increasing(T, rho)
    out = []
    for fam in families:
        fam.check(T)
        if fam.tail is None:
            continue
        r = Fraction(rho[fam.node])
        m = E.analyze_from(fam.tail, fam.start)
        for n in range(fam.start, fam.start + 64):
            if fam.tail.eval(n) < r:
                raise NotIncreasing(f"successor value {fam.tail.eval(n)} below {r} at {fam.node!r}")
        if m.limit == r:
            out.append(BadPoint(fam.node, None, f"successor values {fam.tail.format('n')} tend to {r}"))
    return out


def _above(x: ZSeq, values: list[ZSeq]) -> list[ZSeq]:
    out = []
    for v in values:
        c = z_compare(v, x)
        if c is Cmp.LESS:
            raise NotIncreasing(f"successor value {v} is below {x}")
        if c is Cmp.GREATER:
            out.append(v)
    return out


def _tail_against(x: ZSeq, tail: ZFamily) -> tuple[bool, ZFamily | None]:
    """(degenerate, family of members strictly above x)."""
    if tail is None:
        return False, None
    if tail.rule is not None:
        sh = tail.shape()
        if sh.motion == "constant":
            c = z_compare(sh.inf, x)
            if c is Cmp.EQUAL:
                return True, None
            if c is Cmp.LESS:
                raise NotIncreasing(f"successor values {sh.inf} are below {x}")
    return False, ZFamily(_above(x, list(tail.members)), tail.rule)


def detect_zbad_points(T: Tree, rho: dict, families: list[SuccessorFamily] = ()) -> list[BadPoint]:
    """Nodes where declared successor values converge to rho(t) in the order topology.

    Infinitely many successors sharing the value rho(t) also count, as case 1.
    """
    check_increasing(T, rho)
    out = []
    for fam in families:
        fam.check(T)
        x = rho[fam.node]
        degenerate, tail = _tail_against(x, fam.tail)
        if degenerate:
            out.append(BadPoint(fam.node, 1, "infinitely many successors share the value"))
            continue
        if tail is None or tail.rule is None:
            continue
        try:
            conv = z_converges(x, tail)
        except MalformedFamily as exc:
            raise NotIncreasing(f"successor values at {fam.node!r}: {exc}") from exc
        if conv.converges:
            out.append(BadPoint(fam.node, conv.case, f"successor values decrease to {x}"))
    return out


def theta_family(fam: ZFamily) -> ZFamily:
    """Image of a family of values under the coordinatewise map theta."""
    rule = fam.rule
    if rule is not None:
        rule = ZRule(
            theta_map(rule.base),
            rule.position,
            None if rule.deviation is None else E.theta_of(rule.deviation),
            tuple(E.theta_of(e) for e in rule.extras),
            rule.grows,
            rule.start,
        )
    return ZFamily(tuple(theta_map(z) for z in fam.members), rule)


def theta_successor_family(sf: SuccessorFamily) -> SuccessorFamily:
    tail = theta_family(sf.tail) if isinstance(sf.tail, ZFamily) else sf.tail
    return SuccessorFamily(sf.node, sf.members, tail, sf.start)


def _yprefix_witness(x: ZSeq, top: ZSeq) -> ZSeq:
    w = witness_between(x, top)
    assert w.in_Y() and z_compare(x, w) is Cmp.LESS and z_compare(w, top) is not Cmp.GREATER
    return w


def strictify(T: Tree, nu: dict, tau: dict, families: list[SuccessorFamily] = ()) -> dict:
    """Strictly increasing Y-valued map built from ``nu`` (no Z-bad points) and strict ``tau``.

    ``pi = nu * tau`` is strictly increasing. For each node a value ``pi*(t)``
    with ``pi(t) < pi*(t) <= pi(u)`` for all immediate successors ``u`` is
    assembled from the explicit children and, for a declared successor family,
    from ``w * tau(t)`` where ``w`` separates ``nu(t)`` from the family's
    values. The output picks a Y-element in ``(pi(t), pi*(t)]``.
    """
    check_increasing(T, nu)
    check_increasing(T, tau, strict=True)
    bad = detect_zbad_points(T, nu, families)
    if bad:
        raise PreconditionFailed(
            f"nu has Z-bad points at {[b.node for b in bad]}",
            witness={"nodes": [str(b.node) for b in bad]},
        )
    pi = {t: z_product(nu[t], tau[t]) for t in T.nodes}
    bounds: dict = {t: [pi[u] for u in T.successors(t)] for t in T.nodes}
    for fam in families:
        if not isinstance(fam.tail, ZFamily):
            continue
        x = nu[fam.node]
        degenerate, tail = _tail_against(x, fam.tail)
        if tail is None or (not tail.members and tail.rule is None):
            continue
        inf, _ = family_infimum(tail)
        w = _yprefix_witness(x, inf)
        bounds[fam.node].append(z_product(w, tau[fam.node]))
    rho = {}
    for t in T.nodes:
        cands = bounds[t]
        if not cands:
            rho[t] = some_above(pi[t])
            continue
        star = cands[0]
        for c in cands[1:]:
            if z_compare(c, star) is Cmp.LESS:
                star = c
        if z_compare(pi[t], star) is not Cmp.LESS:
            raise PreconditionFailed(f"no room above pi({t!r})", witness={"node": str(t)})
        rho[t] = _yprefix_witness(pi[t], star)
    check_increasing(T, rho, strict=True)
    return rho
