from __future__ import annotations

import itertools
import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import minimize

from renormlab.errors import SandwichViolation, ValidationError, WedgeViolation
from renormlab.renorm import (
    CtFunction, NormModel, build_pi, build_rho, check_norm, lambda_eval, mu_eval, mu_node, quadratic_norm,
    scaled_lp, sup_norm, verify_lattice_corollary, weighted_sup,
)
from renormlab.sampling import random_norm, random_tree, random_weights
from renormlab.trees import Plateau, Tree, chain, plateau_partition
from renormlab.zorder import ZSeq

F = Fraction
seeds = st.integers(0, 2**32 - 1)
V = Tree({"a": None, "b": "a", "c": "a"})
M = np.array([[1, .3, .3], [.3, 1, 0], [.3, 0, 1]])
QUAD = quadratic_norm(M, 0.45, F(1, 5))


# -- norms ---------------------------------------------------------------


def test_norm_values():
    T = chain("a", "b")
    x = np.array([1.0, -3.0])
    assert sup_norm().value(x, T) == 3
    assert weighted_sup({"a": 1, "b": F(1, 2)}, F(1, 2)).value(x, T) == 1.5
    assert scaled_lp(2.0, 0.5, F(1, 2)).value(x, T) == pytest.approx(0.5 * math.sqrt(10))
    assert weighted_sup({"a": 1, "b": F(1, 2)}, F(1, 2)).exact_value({"a": F(1, 3), "b": -1}) == F(1, 2)


def test_norm_validation():
    with pytest.raises(ValidationError, match="sandwich range"):
        sup_norm(F(3, 2))
    with pytest.raises(SandwichViolation):
        check_norm(weighted_sup({"a": F(1, 4)}, F(1, 2)), Tree({"a": None}))
    with pytest.raises(SandwichViolation):
        check_norm(quadratic_norm(M, 0.6, F(1, 3)), V)
    fake_smooth = NormModel("custom", F(1, 2), lattice=False, gateaux=True,
                            evaluator=lambda x: float(np.max(np.abs(x))))
    with pytest.raises(ValidationError, match="corner"):
        check_norm(fake_smooth, V)
    fake_lattice = quadratic_norm(np.array([[1, .9], [.9, 1]]), 0.5, F(1, 10), lattice=True)
    with pytest.raises(ValidationError, match="lattice"):
        check_norm(fake_lattice, chain("a", "b"))
    assert check_norm(QUAD, V).gateaux_ok


# -- mu ------------------------------------------------------------------


def brute_mu(T: Tree, norm: NormModel, g: dict, free: list) -> float:
    """Multi-start Nelder-Mead over the free coordinates."""
    base = np.array([float(g.get(t, 0)) for t in T.nodes])
    idx = [T.index[t] for t in free]

    def obj(y):
        x = base.copy()
        x[idx] = y
        return norm.value(x, T)

    best = obj(np.zeros(len(idx)))
    if not idx:
        return best
    for start in itertools.product((-1.0, 0.0, 1.0), repeat=len(idx)):
        res = minimize(obj, np.array(start), method="Nelder-Mead",
                       options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 20000})
        best = min(best, res.fun)
    return best


def test_mu_quadratic_closed_form():
    r = mu_node(V, QUAD, "a")
    assert r.value == pytest.approx(0.45 * math.sqrt(0.82), abs=1e-9)
    assert r.phi["b"] == pytest.approx(-0.3, abs=1e-6)


def test_mu_matches_independent_minimizer():
    rng = random.Random(5)
    for _ in range(6):
        T = random_tree(rng, 4)
        A = rng.uniform(-0.3, 0.3)
        Q = np.eye(4) + A * (np.ones((4, 4)) - np.eye(4))
        norm = quadratic_norm(Q, 1 / math.sqrt(4 * (1 + 3 * abs(A))), F(1, 10))
        check_norm(norm, T)
        for t in T.nodes:
            f = CtFunction.indicator(T, t, exact=False)
            got = mu_eval(T, norm, f).value
            assert got == pytest.approx(brute_mu(T, norm, f.values, T.strict_wedge(t)), abs=1e-7)


def test_mu_lattice_is_unperturbed():
    T = chain("a", "b", "c")
    w = weighted_sup({"a": 1, "b": F(1, 2), "c": F(3, 4)}, F(1, 2))
    f = CtFunction("a", {"a": F(1)})
    assert mu_eval(T, w, f, F(1), "b").value == 1
    assert mu_eval(T, w, f, F(2), "c").value == F(9, 4)
    assert mu_node(T, scaled_lp(2.0, 1 / math.sqrt(3), F(1, 2)), "b").value == pytest.approx(math.sqrt(2 / 3))
    with pytest.raises(WedgeViolation):
        mu_eval(V, w, CtFunction("b", {"a": F(1), "b": F(1)}), 0, "c")


def test_ct_function_validation():
    T = chain("a", "b")
    with pytest.raises(ValidationError):
        CtFunction("b", {"a": F(2), "b": F(1)}).validate(T)
    with pytest.raises(ValidationError):
        CtFunction("b", {"b": F(1)}).validate(T)


# -- lambda --------------------------------------------------------------


def _lambda_instance(rng):
    T = random_tree(rng, rng.randint(2, 6))
    eps = F(1, 2)
    least = T.nodes[0]
    # the root carries the largest weight, so mu(f, 0, .) is constant on the whole tree
    norm = weighted_sup(random_weights(rng, T, eps) | {least: F(1)}, eps)
    members = frozenset(T.nodes)
    f = CtFunction(least, {least: F(rng.randint(1, 4), 2)})
    t = rng.choice(T.nodes[1:])
    return T, norm, Plateau(least, members), f, t


def test_lambda_examples():
    T = chain("a", "b")
    w = weighted_sup({"a": 1, "b": F(1, 2)}, F(1, 2))
    P = Plateau("a", frozenset("ab"))
    f = CtFunction("a", {"a": F(1)})
    assert lambda_eval(T, w, P, f, "b").value == 2
    assert lambda_eval(T, sup_norm(), P, f, "b").value == 0
    with pytest.raises(ValidationError):
        lambda_eval(T, w, P, f, "a")


@given(seeds)
def test_lambda_is_the_largest_feasible_slack(seed):
    T, norm, P, f, t = _lambda_instance(random.Random(seed))
    lam = lambda_eval(T, norm, P, f, t, check=False).value
    mu0 = mu_eval(T, norm, f, 0, P.least).value

    def feasible(d):
        return mu_eval(T, norm, f, d, t).value <= mu0 + norm.epsilon * d / 2

    assert lam >= 0 and feasible(lam)
    assert not feasible(lam + F(1, 10**6))


@given(seeds)
@settings(max_examples=30)
def test_lambda_exact_and_numeric_agree(seed):
    T, norm, P, f, t = _lambda_instance(random.Random(seed))
    ex = lambda_eval(T, norm, P, f, t, check=False).value
    nu = lambda_eval(T, norm, P, f, t, method="numeric", check=False).value
    assert isinstance(ex, Fraction)
    assert abs(float(ex) - nu) <= 1e-6


# -- pipeline ------------------------------------------------------------


def test_canonical_chain():
    T = chain("a", "b")
    L = build_pi(T, weighted_sup({"a": 1, "b": F(1, 2)}, F(1, 2)))
    R = build_rho(L)
    assert L.exact and L.ok and R.ok
    assert L.mu == {"a": 1, "b": 1}
    assert L.pi == {"a": ZSeq.of(-1), "b": ZSeq.of(-1, F(3, 2))}
    assert R.rho == {"a": ZSeq.of(-2), "b": ZSeq.of(-2, F(3, 2))}
    assert L.check("increment_identity").value == 0


def test_three_chain():
    T = chain("a", "b", "c")
    L = build_pi(T, weighted_sup(dict(zip("abc", (1, F(1, 2), F(1, 2)))), F(1, 2)))
    R = build_rho(L)
    assert L.pi["c"] == ZSeq.of(-1, F(3, 2), F(3, 2))
    assert R.rho["c"] == ZSeq.of(-2, F(3, 2), 4)
    assert L.lambda_values() == [(0, "c", 2), (0, "b", 2), (1, "c", 0)]


def test_sup_norm_v_shape():
    L = build_pi(V, sup_norm())
    R = build_rho(L)
    assert L.pi["b"] == L.pi["c"] == ZSeq.of(-1, 1)
    assert R.rho["b"] == ZSeq.of(-2, 1)
    assert plateau_partition(V, R.rho).as_sets() == plateau_partition(V, L.pi).as_sets()


def test_quadratic_pipeline():
    L = build_pi(V, QUAD)
    assert not L.exact and L.ok and build_rho(L).ok
    assert float(-L.pi["a"].tail[0]) == pytest.approx(0.45 * math.sqrt(0.82), abs=1e-8)


def test_lattice_corollary():
    T = chain("a", "b")
    r = verify_lattice_corollary(T, scaled_lp(2.0, 1 / math.sqrt(2), F(1, 2)))
    assert r.status == "pass"
    assert verify_lattice_corollary(T, sup_norm()).status == "not_applicable"


@given(seeds, st.sampled_from(["sup", "weighted_sup", "scaled_l2"]))
@settings(max_examples=25)
def test_pipeline_invariants_random(seed, kind):
    rng = random.Random(seed)
    T = random_tree(rng, rng.randint(1, 7))
    L = build_pi(T, random_norm(rng, T, kind))
    R = build_rho(L)
    assert L.ok, [c for c in L.checks if not c.ok]
    assert R.ok, [c for c in R.checks if not c.ok]
    assert all(v.in_Y() for v in R.rho.values())


@given(seeds)
@settings(max_examples=25)
def test_exact_and_numeric_pipelines_agree(seed):
    rng = random.Random(seed)
    T = random_tree(rng, rng.randint(1, 6))
    norm = random_norm(rng, T, "weighted_sup")
    ex, nu = build_pi(T, norm), build_pi(T, norm, method="numeric")
    for t in T.nodes:
        a, b = ex.pi[t], nu.pi[t]
        assert len(a.tail) == len(b.tail)
        assert all(abs(float(x) - float(y)) <= 1e-6 for x, y in zip(a.tail, b.tail))
