from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from renormlab.errors import NonChainPlateau, SizeLimit, UnknownNode, ValidationError
from renormlab.ordinals import OMEGA, Ordinal
from renormlab.sampling import random_tree
from renormlab.trees import (
    FullBinaryTree, OrdinalChain, Tree, antichain_decomposition, chain, chain_refine, embeddable,
    ever_branching_core, psi_fragment, psi_leq, psi_successors_rule, q_embed, sigma_tree, tree_query,
)
from renormlab.trees.core import LazyFromTree

seeds = st.integers(0, 2**32 - 1)
V = Tree({"a": None, "b": "a", "c": "a"}, ["a", "b", "c"])


def closure(T: Tree) -> set:
    """Reflexive-transitive closure of the parent relation, computed naively."""
    rel = {(t, t) for t in T.nodes} | {(p, t) for t, p in T.parent.items() if p is not None}
    while True:
        more = {(a, d) for a, b in rel for c, d in rel if b == c} - rel
        if not more:
            return rel
        rel |= more


def brute_embeddable(T: Tree, L: list) -> bool:
    pairs = T.comparable_pairs()
    for vals in itertools.product(range(len(L)), repeat=len(T)):
        f = dict(zip(T.nodes, vals))
        if all(f[s] < f[t] for s, t in pairs):
            return True
    return False


def test_validation():
    with pytest.raises(ValidationError, match="acyclicity"):
        Tree({"a": "b", "b": "a"})
    with pytest.raises(ValidationError):
        Tree({"a": "z"})
    with pytest.raises(UnknownNode):
        V.check("q")


def test_queries():
    T = chain("a", "b", "c")
    assert tree_query(T, "interval", "a", "c") == ["b", "c"]
    assert T.predecessors("c") == ["a", "b", "c"]
    assert tree_query(V, "successors", "a") == ["b", "c"]
    assert not V.comparable("b", "c")
    assert V.wedge("a") == ["a", "b", "c"]


@given(seeds)
def test_order_matches_closure(seed):
    T = random_tree(random.Random(seed), 9, roots=2)
    rel = closure(T)
    for s in T.nodes:
        for t in T.nodes:
            assert T.leq(s, t) == ((s, t) in rel)
    assert set(T.comparable_pairs()) == {(s, t) for s, t in rel if s != t}


@given(seeds)
def test_antichains(seed):
    T = random_tree(random.Random(seed), 12)
    levels = antichain_decomposition(T)
    assert sorted(t for a in levels for t in a) == sorted(T.nodes)
    for a in levels:
        assert all(not T.comparable(s, t) for s, t in itertools.combinations(a, 2))


def test_sigma_tree_shape():
    T = sigma_tree([1, 2, 3])
    assert len(T) == 8 and T.roots() == [()]
    assert T.successors((1,)) == [(1, 2), (1, 3)]


@pytest.mark.parametrize("n,tries", [(1, 1), (2, 4), (3, 30)])
def test_sigma_not_embeddable(n, tries):
    L = list(range(1, n + 1))
    res = embeddable(sigma_tree(L), L)
    assert not res.found and res.assignments_tried == tries
    assert not brute_embeddable(sigma_tree(L), L)


def test_embedding_witness():
    res = embeddable(V, [1, 2])
    assert res.found and res.witness == {"a": 1, "b": 2, "c": 2}


@given(seeds)
def test_embeddable_matches_brute_force(seed):
    rng = random.Random(seed)
    T = random_tree(rng, rng.randint(1, 6))
    L = list(range(rng.randint(1, 4)))
    assert embeddable(T, L).found == brute_embeddable(T, L)


def test_size_limit():
    with pytest.raises(SizeLimit):
        sigma_tree(list(range(13)))


def test_q_embed_strict_on_sigma():
    T = sigma_tree([1, 2, 3])
    q = q_embed(T, {t: k for k, t in enumerate(T.nodes)})
    assert all(q[s] < q[t] for s, t in T.comparable_pairs())
    with pytest.raises(ValidationError):
        q_embed(T, {t: 0 for t in T.nodes})


def test_psi_fragment():
    T = psi_fragment(2, 2)
    assert len(T) == 8
    assert len(T.successors(((), 0))) == 2
    for a in T.nodes:
        for b in T.nodes:
            assert T.leq(a, b) == psi_leq(a, b, [1, 2], [1, 2])


@pytest.mark.parametrize("k,kappa", [(2, 3), (3, 2), (3, 3)])
def test_psi_successor_rule(k, kappa):
    L = list(range(1, k + 1))
    T = psi_fragment(k, kappa)
    for t in T.nodes:
        rule = psi_successors_rule(t, L, L)
        assert rule[0] == (t[0], t[1] + 1)
        # immediate successors inside the fragment are among the rule's
        assert set(T.successors(t)) <= set(rule)
        for u in rule:
            assert psi_leq(t, u, L, L) and not psi_leq(u, t, L, L)


def test_ever_branching_core():
    assert ever_branching_core(V).core == set()
    res = ever_branching_core(FullBinaryTree(), depth_cap=6, dyadic_depth=3)
    assert len(res.core) == 127 and len(res.dyadic) == 15
    assert ever_branching_core(LazyFromTree(sigma_tree([1, 2, 3]))).core == set()


def test_lazy_chains():
    c = OrdinalChain(OMEGA)
    assert c.children(Ordinal.of(3)) == [Ordinal.of(4)]
    assert c.unbounded([Ordinal.of(5)], True) is not None
    assert c.unbounded([Ordinal.of(5)], False) is None
    long = OrdinalChain(Ordinal.omega_times(2))
    assert long.unbounded([Ordinal.of(5)], True) is None
    assert long.unbounded([OMEGA + 2], True) is not None
    assert len(FullBinaryTree().truncate(3)) == 15


def test_chain_refine():
    T = chain("a", "b", "c")
    out = chain_refine(T, {"a": 0, "b": 0, "c": 1})
    assert out["b"][1] == 1 and out["c"][1] == 0
    with pytest.raises(NonChainPlateau):
        chain_refine(V, {"a": 0, "b": 0, "c": 0})
