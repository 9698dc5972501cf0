"""Seeded self-checks behind ``renormlab verify all``."""

from __future__ import annotations

import math
import random
from fractions import Fraction

from . import game as G
from .ordinals import OMEGA, Cmp, Ordinal
from .renorm import build_pi, build_rho, scaled_lp, sup_norm, verify_lattice_corollary, weighted_sup
from .report import Report
from .sampling import random_increasing, random_norm, random_tree, random_zseq, related_triple
from .trees import OrdinalChain, Tree, embeddable, plateau_partition, q_embed, sigma_tree
from .trees.plateaux import partition_problems
from .zorder import ZFamily, ZRule, ZSeq, parse_expr, phi_map, theta_map, z0_sup, z_compare, z_product, z_validate


def _order_axioms(rng, n: int) -> int:
    bad = 0
    for _ in range(n):
        x, y, z = related_triple(rng)
        cxy, cyx = z_compare(x, y), z_compare(y, x)
        if cxy.value != -cyx.value:
            bad += 1
        if cxy is Cmp.EQUAL and x != y:
            bad += 1
        if cxy is not Cmp.GREATER and z_compare(y, z) is not Cmp.GREATER and z_compare(x, z) is Cmp.GREATER:
            bad += 1
    return bad


def _maps(rng, n: int) -> int:
    bad = 0
    for _ in range(n):
        x, y = random_zseq(rng), random_zseq(rng)
        c = z_compare(x, y)
        if c is Cmp.EQUAL:
            continue
        if c is Cmp.GREATER:
            x, y = y, x
        for f in (phi_map, theta_map):
            fx, fy = f(x), f(y)
            if not (z_validate(fx).ok and z_validate(fy).ok and z_compare(fx, fy) is Cmp.LESS):
                bad += 1
    return bad


def _products(rng, n: int) -> int:
    bad = 0
    for _ in range(n):
        x, y, z = related_triple(rng)
        if z_product(z_product(x, y), z) != z_product(x, z_product(y, z)):
            bad += 1
        if z_compare(x, y) is not Cmp.GREATER and z_compare(z_product(x, z), z_product(y, z)) is Cmp.GREATER:
            bad += 1
    return bad


def _plateaux(rng, n: int) -> int:
    bad = 0
    for _ in range(n):
        T = random_tree(rng, rng.randint(1, 12))
        rho = random_increasing(rng, T)
        P = plateau_partition(T, rho)
        bad += len(partition_problems(T, P, rho))
    return bad


def run_all(rep: Report, seed: int = 0, quick: bool = False):
    rng = random.Random(seed)
    k = 1 if quick else 5
    rep.results["sizes"] = {"order_triples": 400 * k, "map_pairs": 200 * k, "product_triples": 200 * k,
                            "plateau_trees": 20 * k, "pipeline_trees": 4 * k}
    rep.check("order_axioms", _order_axioms(rng, 400 * k) == 0)
    rep.check("phi_theta_order_preserving", _maps(rng, 200 * k) == 0)
    rep.check("product_laws", _products(rng, 200 * k) == 0)
    fam = ZFamily((), ZRule(ZSeq.of(0, 1), Ordinal.of(1), parse_expr("1-(1/2)^n"), start=1))
    sup = z0_sup(fam).sup
    rep.results["z0_sup_fixture"] = sup
    rep.check("z0_sup_fixture", sup == ZSeq.of(0, Fraction(1, 2)))
    for L in ([1], [1, 2], [1, 2, 3]):
        emb = embeddable(sigma_tree(L), L)
        rep.check(f"sigma_not_embeddable:{len(L)}", not emb.found)
    S = sigma_tree([1, 2, 3])
    q = q_embed(S, {t: i for i, t in enumerate(S.nodes)})
    rep.check("q_embedding_strict", all(q[s] < q[t] for s, t in S.comparable_pairs()))
    rep.check("plateau_laws", _plateaux(rng, 20 * k) == 0)

    chain2 = Tree({"a": None, "b": "a"}, ["a", "b"])
    L = build_pi(chain2, weighted_sup({"a": 1, "b": Fraction(1, 2)}, Fraction(1, 2)))
    R = build_rho(L)
    rep.results["canonical_fixture"] = {"pi": L.pi, "rho": R.rho}
    rep.check("canonical_fixture", L.pi["b"] == ZSeq.of(-1, Fraction(3, 2)) and R.rho["b"] == ZSeq.of(-2, Fraction(3, 2))
              and L.ok and R.ok)
    failures = 0
    for _ in range(4 * k):
        T = random_tree(rng, rng.randint(1, 8))
        for kind in ("sup", "weighted_sup", "scaled_l2"):
            Lt = build_pi(T, random_norm(rng, T, kind))
            if not (Lt.ok and build_rho(Lt).ok):
                failures += 1
    rep.check("pipeline_invariants", failures == 0, f"{failures} failing runs")
    smooth = verify_lattice_corollary(chain2, scaled_lp(2.0, 1 / math.sqrt(2), Fraction(1, 2)))
    flat = verify_lattice_corollary(chain2, sup_norm())
    rep.results["lattice_corollary"] = {"scaled_l2": smooth.status, "sup": flat.status}
    rep.check("lattice_corollary", smooth.status == "pass" and flat.status == "not_applicable")

    games_ok = True
    for _ in range(4 * k):
        T = random_tree(rng, rng.randint(1, 8))
        rho = {t: ZSeq.of(*([Fraction(-1)] + [Fraction(j + 1) for j in range(int(v))]))
               for t, v in random_increasing(rng, T).items()}
        b = G.strategy_fixed_pair(T, rho)
        res = G.play_game(T, G.Climb(), b, 12)
        games_ok &= res.outcome == "AWins" and all(m.slack_ok for m in b.trace)
    rep.check("fixed_pair_games", games_ok)
    res = G.play_game(OrdinalChain(OMEGA), G.stay, G.Successor(), 10)
    rep.check("omega_chain_b_wins", res.outcome == "BWins", res.certificate)
