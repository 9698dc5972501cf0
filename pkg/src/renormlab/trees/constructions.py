"""Concrete tree constructions and the brute-force embedding search."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

from ..errors import SizeLimit
from .core import Tree

MAX_ORDER = 12


def sigma_tree(L: Sequence, depth_cap: int | None = None) -> Tree:
    """Well-ordered subsets of a finite linear order ``L`` under end-extension.

    Nodes are increasing tuples over ``L`` (in the order given), the root is
    ``()``, and the parent of a tuple drops its last element.
    """
    L = list(L)
    if len(L) > MAX_ORDER:
        raise SizeLimit(f"linear order of size {len(L)} exceeds {MAX_ORDER}")
    cap = len(L) if depth_cap is None else min(depth_cap, len(L))
    parent, order = {}, []
    for size in range(cap + 1):
        for combo in combinations(L, size):
            parent[combo] = combo[:-1] if combo else None
            order.append(combo)
    return Tree(parent, order)


@dataclass(frozen=True)
class Embedding:
    found: bool
    witness: dict | None
    assignments_tried: int

    def __bool__(self):
        return self.found


def is_strictly_increasing(T: Tree, f: dict, key=None) -> bool:
    key = key or (lambda v: v)
    return all(key(f[s]) < key(f[t]) for s, t in T.comparable_pairs())


def embeddable(T: Tree, L: Sequence, max_nodes: int = 64) -> Embedding:
    """Backtracking search for a strictly increasing map ``T -> L``.

    Nodes are assigned parent-first, and a node only needs a value above its
    parent's, which forces strict increase along every chain.
    """
    L = list(L)
    if len(L) > MAX_ORDER or len(T) > max_nodes:
        raise SizeLimit(f"search space too large ({len(T)} nodes into {len(L)} values)")
    rank = {v: k for k, v in enumerate(L)}
    nodes = T.nodes
    assign: dict = {}
    tried = 0

    def go(k: int) -> bool:
        nonlocal tried
        if k == len(nodes):
            return True
        t = nodes[k]
        p = T.parent[t]
        lo = rank[assign[p]] + 1 if p is not None else 0
        for r in range(lo, len(L)):
            tried += 1
            assign[t] = L[r]
            if go(k + 1):
                return True
        assign.pop(t, None)
        return False

    if go(0):
        w = dict(assign)
        assert is_strictly_increasing(T, w, key=rank.__getitem__)
        return Embedding(True, w, tried)
    return Embedding(False, None, tried)


# -- finite surrogate of the two-successor tree -------------------------


def _upper_bounds(A: tuple, L: Sequence) -> list:
    if not A:
        return list(L)
    pos = list(L).index(A[-1])
    return list(L)[pos + 1:]


def _rank_in(x, U: list, wellorder: Sequence) -> int:
    """Order type of ``{y in U : y strictly before x in the well-order}``."""
    w = {v: k for k, v in enumerate(wellorder)}
    return sum(1 for y in U if w[y] < w[x])


def psi_leq(a: tuple, b: tuple, L: Sequence, wellorder: Sequence) -> bool:
    """``(A, alpha) <= (B, beta)``: same set and alpha <= beta, or A a proper initial
    segment of B and alpha at most the well-order rank of min(B \\ A) among the
    upper bounds of A."""
    (A, alpha), (B, beta) = a, b
    if A == B:
        return alpha <= beta
    if len(A) < len(B) and B[: len(A)] == A:
        U = _upper_bounds(A, L)
        return alpha <= _rank_in(B[len(A)], U, wellorder)
    return False


def psi_successors_rule(node: tuple, L: Sequence, wellorder: Sequence) -> list:
    """Immediate successors by the defining rule, with the second coordinate unbounded."""
    A, alpha = node
    out = [(A, alpha + 1)]
    U = _upper_bounds(A, L)
    for y in U:
        if _rank_in(y, U, wellorder) == alpha:
            out.append((A + (y,), 0))
    return out


def psi_fragment(k: int, kappa: int, wellorder: Sequence | None = None) -> Tree:
    """Nodes ``(A, alpha)`` with ``A`` increasing over ``L = 1..k`` and ``alpha < kappa``.

    The parent of ``(A, alpha)`` is ``(A, alpha - 1)``; for ``alpha = 0`` it is
    ``(A minus max A, r)`` where ``r`` ranks ``max A`` among the upper bounds of
    the shorter set. Nodes whose parent would need ``r >= kappa`` are left out
    together with everything above them, so the fragment is downward closed.
    """
    L = list(range(1, k + 1))
    if k > MAX_ORDER:
        raise SizeLimit(f"k = {k} exceeds {MAX_ORDER}")
    wellorder = list(wellorder) if wellorder is not None else L
    if sorted(wellorder) != L:
        raise ValueError("wellorder must be a permutation of 1..k")
    parent: dict = {}
    order: list = []
    for size in range(k + 1):
        for A in combinations(L, size):
            if A:
                B = A[:-1]
                r = _rank_in(A[-1], _upper_bounds(B, L), wellorder)
                if r >= kappa or (B, r) not in parent:
                    continue
                base_parent = (B, r)
            else:
                base_parent = None
            for alpha in range(kappa):
                node = (A, alpha)
                parent[node] = base_parent if alpha == 0 else (A, alpha - 1)
                order.append(node)
    return Tree(parent, order)
