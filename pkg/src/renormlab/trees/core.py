"""Trees given by parent maps, and lazily generated infinite trees.

An explicit :class:`Tree` is a finite forest: every node has at most one
parent, so the predecessors of a node form a finite chain. Lazily generated
trees (:class:`LazyTree`) expose children on demand together with
generator-specific attestations about their infinite behaviour; nothing about
infinity is ever inferred from a finite prefix.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Hashable, Iterable

from ..errors import UnknownNode, ValidationError
from ..ordinals import Ordinal

Node = Hashable


class Tree:
    """Finite forest ordered by ``s <= t`` iff ``s`` lies on the parent chain of ``t``."""

    def __init__(self, parent: dict, order: Iterable[Node] | None = None):
        nodes = list(order) if order is not None else list(parent)
        if set(nodes) != set(parent):
            raise ValidationError("node order does not match the parent map")
        for t, p in parent.items():
            if p is not None and p not in parent:
                raise ValidationError(f"parent {p!r} of {t!r} is not a node")
        self.parent = dict(parent)
        self.children: dict[Node, list] = {t: [] for t in nodes}
        for t in nodes:
            p = parent[t]
            if p is not None:
                self.children[p].append(t)
        self.depth: dict[Node, int] = {}
        for t in nodes:
            self._chain_depth(t)
        # breadth-first order: every node after its parent
        self.nodes: list[Node] = sorted(nodes, key=lambda t: self.depth[t])
        self.index = {t: k for k, t in enumerate(self.nodes)}

    def _chain_depth(self, t):
        path = []
        seen = set()
        cur = t
        while cur is not None and cur not in self.depth:
            if cur in seen:
                raise ValidationError(f"acyclicity: parent chain of {t!r} loops through {cur!r}")
            seen.add(cur)
            path.append(cur)
            cur = self.parent[cur]
        d = -1 if cur is None else self.depth[cur]
        for node in reversed(path):
            d += 1
            self.depth[node] = d

    def __len__(self):
        return len(self.nodes)

    def __contains__(self, t):
        return t in self.parent

    def __iter__(self):
        return iter(self.nodes)

    def check(self, *ts):
        for t in ts:
            if t not in self.parent:
                raise UnknownNode(f"unknown node {t!r}")

    # -- order -----------------------------------------------------------

    def predecessors(self, t) -> list:
        """``(0, t]`` as a list from the minimal node up to ``t``."""
        self.check(t)
        out = []
        while t is not None:
            out.append(t)
            t = self.parent[t]
        return out[::-1]

    def leq(self, s, t) -> bool:
        self.check(s, t)
        ds, dt = self.depth[s], self.depth[t]
        while dt > ds:
            t = self.parent[t]
            dt -= 1
        return s == t

    def lt(self, s, t) -> bool:
        return s != t and self.leq(s, t)

    def comparable(self, s, t) -> bool:
        return self.leq(s, t) or self.leq(t, s)

    def interval(self, s, t) -> list:
        """``(s, t] = (0, t] minus (0, s]``."""
        self.check(s)
        below = set(self.predecessors(s))
        return [u for u in self.predecessors(t) if u not in below]

    def wedge(self, t) -> list:
        """``[t, inf)`` in breadth-first order."""
        self.check(t)
        out, queue = [], deque([t])
        while queue:
            u = queue.popleft()
            out.append(u)
            queue.extend(self.children[u])
        return out

    def strict_wedge(self, t) -> list:
        return self.wedge(t)[1:]

    def successors(self, t) -> list:
        self.check(t)
        return list(self.children[t])

    def roots(self) -> list:
        return [t for t in self.nodes if self.parent[t] is None]

    def maximal(self) -> list:
        return [t for t in self.nodes if not self.children[t]]

    def comparable_pairs(self) -> list[tuple]:
        """All ``(s, t)`` with ``s < t``."""
        out = []
        for t in self.nodes:
            p = self.parent[t]
            while p is not None:
                out.append((p, t))
                p = self.parent[p]
        return out

    def subtree(self, keep: Iterable[Node]) -> Tree:
        """Restriction to a downward-closed set of nodes."""
        keep = set(keep)
        for t in keep:
            if self.parent[t] is not None and self.parent[t] not in keep:
                raise ValidationError(f"{t!r} kept without its parent")
        return Tree({t: self.parent[t] for t in self.nodes if t in keep},
                    [t for t in self.nodes if t in keep])

    def to_json(self) -> dict:
        return {"nodes": [{"id": _jid(t), "parent": _jid(self.parent[t])} for t in self.nodes]}


def _jid(t):
    if t is None or isinstance(t, (str, int)):
        return t
    return str(t)


def chain(*names) -> Tree:
    parent = {}
    prev = None
    for n in names:
        parent[n] = prev
        prev = n
    return Tree(parent, names)


def tree_query(T: Tree, kind: str, *args):
    """Dispatch by name: interval, predecessors, wedge, successors, comparable."""
    ops: dict[str, Callable] = {
        "interval": T.interval,
        "predecessors": T.predecessors,
        "wedge": T.wedge,
        "successors": T.successors,
        "comparable": T.comparable,
    }
    if kind not in ops:
        raise ValueError(f"unknown query {kind!r}")
    return ops[kind](*args)


def antichain_decomposition(T: Tree) -> list[list]:
    """Depth levels; nodes of equal depth are pairwise incomparable."""
    levels: dict[int, list] = {}
    for t in T.nodes:
        levels.setdefault(T.depth[t], []).append(t)
    return [levels[d] for d in sorted(levels)]


def q_embed(T: Tree, enumeration: dict) -> dict:
    """``t -> sum over s <= t of 2^-enum(s)``, strictly increasing for an injective enumeration."""
    if len(set(enumeration.values())) != len(enumeration):
        raise ValidationError("enumeration must be injective")
    out = {}
    for t in T.nodes:
        p = T.parent[t]
        out[t] = (out[p] if p is not None else Fraction(0)) + Fraction(1, 2 ** enumeration[t])
    return out


# -- lazily generated trees ----------------------------------------------


@dataclass(frozen=True)
class Certificate:
    """Why a recorded chain has no upper bound in the tree."""

    kind: str
    detail: str


class LazyTree:
    """Tree explored through ``children``; infinite facts come from the generator itself."""

    def roots(self) -> list:
        raise NotImplementedError

    def children(self, t) -> list:
        raise NotImplementedError

    def leq(self, s, t) -> bool:
        raise NotImplementedError

    def depth(self, t) -> int:
        raise NotImplementedError

    def attests_ever_branching(self, t) -> bool:
        """True if the generator guarantees an ever-branching set above ``t``."""
        return False

    def unbounded(self, history: list, advances_strictly: bool) -> Certificate | None:
        """Certificate that the chain continued by a strategy has no upper bound."""
        return None

    def truncate(self, depth_cap: int) -> Tree:
        parent, order = {}, []
        queue = deque((r, None) for r in self.roots())
        while queue:
            t, p = queue.popleft()
            parent[t] = p
            order.append(t)
            if self.depth(t) < depth_cap:
                queue.extend((c, t) for c in self.children(t))
        return Tree(parent, order)


@dataclass
class OrdinalChain(LazyTree):
    """The ordinals below ``length`` as a chain (``length <= w^2``)."""

    length: Ordinal

    def roots(self):
        return [Ordinal()] if self.length > 0 else []

    def children(self, t: Ordinal):
        s = t + 1
        return [s] if s < self.length else []

    def leq(self, s, t):
        return not t < s

    def depth(self, t: Ordinal) -> int:
        if not t.is_finite():
            raise ValueError("only the finite part of a long chain has a depth")
        return int(t)

    def unbounded(self, history, advances_strictly):
        # a strictly advancing chain of ordinals climbs to the next limit;
        # it is unbounded exactly when that limit is the full length
        if not advances_strictly or not history:
            return None
        nxt = history[-1].limit_part + Ordinal.omega_times(1)
        if self.length.is_limit() and nxt == self.length:
            return Certificate("ordinal-chain", f"strictly increasing moves converge to {self.length}, "
                               "which is not a node")
        return None


class FullBinaryTree(LazyTree):
    """Finite 0/1 strings under extension."""

    def roots(self):
        return [()]

    def children(self, t):
        return [t + (0,), t + (1,)]

    def leq(self, s, t):
        return t[: len(s)] == s

    def depth(self, t):
        return len(t)

    def attests_ever_branching(self, t) -> bool:
        return True

    def unbounded(self, history, advances_strictly):
        if advances_strictly:
            return Certificate("binary-tree", "strictly increasing moves define an infinite branch; "
                               "every node is a finite string")
        return None


@dataclass
class LazyFromTree(LazyTree):
    """View of an explicit tree through the lazy interface."""

    tree: Tree
    _cache: dict = field(default_factory=dict)

    def roots(self):
        return self.tree.roots()

    def children(self, t):
        return self.tree.successors(t)

    def leq(self, s, t):
        return self.tree.leq(s, t)

    def depth(self, t):
        return self.tree.depth[t]
