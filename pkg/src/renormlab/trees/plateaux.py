"""Plateau partitions, ever-branching cores and chain refinement."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from ..errors import EmptyIntersection, NonChainPlateau, NotIncreasing
from ..zorder.seq import ZSeq, z_compare
from .core import LazyTree, Tree


def value_cmp(a, b, tol: float = 0.0) -> int:
    """-1, 0 or 1 for ZSeq values, pairs compared lexicographically, or numbers."""
    if isinstance(a, ZSeq):
        return z_compare(a, b).value
    if isinstance(a, tuple):
        for x, y in zip(a, b):
            c = value_cmp(x, y, tol)
            if c:
                return c
        return 0
    d = a - b
    if abs(d) <= tol:
        return 0
    return -1 if d < 0 else 1


@dataclass(frozen=True)
class Plateau:
    least: object
    members: frozenset

    def __len__(self):
        return len(self.members)

    def __contains__(self, t):
        return t in self.members


@dataclass
class PlateauPartition:
    plateaux: list
    of: dict  # node -> least element of its plateau
    by_least: dict = field(default_factory=dict)

    def __post_init__(self):
        self.by_least = {V.least: V for V in self.plateaux}

    @property
    def least_elements(self) -> set:
        return set(self.by_least)

    def plateau_of(self, t) -> Plateau:
        return self.by_least[self.of[t]]

    def as_sets(self) -> set:
        return {V.members for V in self.plateaux}


def check_increasing(T: Tree, rho: dict, tol: float = 0.0, strict: bool = False):
    for t in T.nodes:
        p = T.parent[t]
        if p is None:
            continue
        c = value_cmp(rho[p], rho[t], tol)
        if c > 0 or (strict and c == 0):
            kind = "strictly increasing" if strict else "increasing"
            raise NotIncreasing(
                f"map is not {kind}: value at {p!r} is not below the value at {t!r}",
                witness={"pair": [str(p), str(t)], "values": [str(rho[p]), str(rho[t])]},
            )


def plateau_partition(T: Tree, rho: dict, tol: float = 0.0) -> PlateauPartition:
    """Classes of ``s ~ t`` iff some ``r <= s, t`` has ``rho(r) = rho(s) = rho(t)``.

    Along a chain the nodes sharing ``rho(t)`` form an interval ending at
    ``t``, so each node belongs to the class of the least node of that
    interval, found by walking parent steps with equal values.
    """
    check_increasing(T, rho, tol)
    of: dict = {}
    groups: dict = {}
    for t in T.nodes:  # parents first
        p = T.parent[t]
        if p is not None and value_cmp(rho[p], rho[t], tol) == 0:
            of[t] = of[p]
        else:
            of[t] = t
        groups.setdefault(of[t], set()).add(t)
    plateaux = [Plateau(r, frozenset(groups[r])) for r in groups]
    return PlateauPartition(plateaux, of)


def plateau_problem(T: Tree, V: Plateau) -> str | None:
    """None if ``V`` has least element ``V.least`` and is the union of the intervals [least, t]."""
    if V.least not in V.members:
        return "least element is not a member"
    for t in V.members:
        if not T.leq(V.least, t):
            return f"{t!r} is not above the least element"
        u = t
        while u != V.least:
            if u not in V.members:
                return f"interval from the least element to {t!r} leaves the set at {u!r}"
            u = T.parent[u]
    return None


def partition_problems(T: Tree, P: PlateauPartition, rho: dict, tol: float = 0.0) -> list[str]:
    out = []
    seen = set()
    for V in P.plateaux:
        why = plateau_problem(T, V)
        if why:
            out.append(f"plateau at {V.least!r}: {why}")
        if seen & V.members:
            out.append(f"plateau at {V.least!r} overlaps another")
        seen |= V.members
        vals = {str(rho[t]) for t in V.members} if tol == 0 else set()
        if len(vals) > 1:
            out.append(f"plateau at {V.least!r} is not constant")
    if seen != set(T.nodes):
        out.append("plateaux do not cover the tree")
    H = P.least_elements
    for s, t in T.comparable_pairs():
        if s in H and t in H and value_cmp(rho[s], rho[t], tol) >= 0:
            out.append(f"values on least elements {s!r} < {t!r} do not strictly increase")
    return out


def plateau_intersect(T: Tree, plateaux: list[Plateau]) -> Plateau:
    """Intersection of plateaux; its least element is the largest of their least elements."""
    if not plateaux:
        raise EmptyIntersection("no plateaux given")
    common = frozenset.intersection(*(V.members for V in plateaux))
    if not common:
        raise EmptyIntersection("plateaux have no common node")
    leasts = [V.least for V in plateaux]
    top = max(leasts, key=lambda r: T.depth[r])
    # all leasts lie below any common node, hence on one chain
    assert all(T.leq(r, top) for r in leasts)
    return Plateau(top, common)


# -- ever-branching sets -------------------------------------------------


def _has_branching(T: Tree, e, S: set) -> bool:
    ups = [u for u in T.strict_wedge(e) if u in S]
    for i, a in enumerate(ups):
        for b in ups[i + 1:]:
            if not T.comparable(a, b):
                return True
    return False


@dataclass
class BranchingCore:
    core: set
    attested: set
    dyadic: Tree | None = None


def _prune(T: Tree, S: set, keep_anyway: set) -> set:
    S = set(S)
    changed = True
    while changed:
        changed = False
        for e in list(S):
            if e in keep_anyway:
                continue
            if not _has_branching(T, e, S):
                S.discard(e)
                changed = True
    return S


def ever_branching_core(
    T: Tree | LazyTree,
    E: Iterable | None = None,
    depth_cap: int = 6,
    dyadic_depth: int | None = None,
) -> BranchingCore:
    """Greatest subset of ``E`` whose elements each have two incomparable strict successors in it.

    For explicit finite sets the result is always empty. For generated trees
    the truncation at ``depth_cap`` keeps frontier nodes only when the
    generator attests an ever-branching continuation above them.
    """
    if isinstance(T, LazyTree):
        lazy = T
        T = lazy.truncate(depth_cap)
        frontier = {t for t in T.nodes if T.depth[t] == depth_cap}
        attested = {t for t in frontier if lazy.attests_ever_branching(t)}
    else:
        attested = set()
    S = set(T.nodes) if E is None else set(E)
    core = _prune(T, S, attested & S)
    dyadic = None
    if dyadic_depth is not None and core:
        dyadic = dyadic_subtree(T, core, dyadic_depth)
    return BranchingCore(core, attested & S, dyadic)


def dyadic_subtree(T: Tree, core: set, depth: int) -> Tree | None:
    """Binary-branching subset of ``core`` of the given height, as a tree."""
    start = min(core, key=lambda t: (T.depth[t], T.index[t]))

    def grow(t, d) -> dict | None:
        # parent links of a binary tree of height d rooted at t, or None
        if d == 0:
            return {}
        ups = sorted((u for u in T.strict_wedge(t) if u in core), key=lambda u: (T.depth[u], T.index[u]))
        for i, a in enumerate(ups):
            for b in ups[i + 1:]:
                if T.comparable(a, b):
                    continue
                left, right = grow(a, d - 1), grow(b, d - 1)
                if left is not None and right is not None:
                    return {a: t, b: t, **left, **right}
        return None

    links = grow(start, depth)
    if links is None:
        return None
    parent = {start: None, **links}
    return Tree(parent, sorted(parent, key=lambda t: T.index[t]))


# -- chain refinement ------------------------------------------------------


def chain_refine(T: Tree, pi: dict) -> dict:
    """Pair each value with its position inside its (chain) plateau.

    The result ``t -> (pi(t), k)`` is strictly increasing in the
    lexicographic order whenever every plateau of ``pi`` is a chain.
    """
    P = plateau_partition(T, pi)
    for V in P.plateaux:
        mem = sorted(V.members, key=lambda t: T.depth[t])
        for i, a in enumerate(mem):
            for b in mem[i + 1:]:
                if not T.comparable(a, b):
                    raise NonChainPlateau(
                        f"plateau at {V.least!r} contains incomparable {a!r} and {b!r}",
                        witness={"pair": [str(a), str(b)]},
                    )
    out = {t: (pi[t], Fraction(T.depth[t] - T.depth[P.of[t]])) for t in T.nodes}
    check_increasing(T, out, strict=True)
    return out
