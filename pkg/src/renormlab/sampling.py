"""Seeded random instances: sequences, trees, increasing maps and norms."""

from __future__ import annotations

import random
from fractions import Fraction

from .renorm.norms import NormModel, scaled_lp, sup_norm, weighted_sup
from .trees.core import Tree
from .zorder import expr as E
from .zorder.seq import OmegaBlock, ZSeq, require_valid

RATIOS = (Fraction(1, 2), Fraction(1, 3), Fraction(2, 3))
STEPS = (Fraction(1, 2), Fraction(1), Fraction(3, 2), Fraction(2))


def block_from(start: Fraction, limit: Fraction, q: Fraction) -> OmegaBlock:
    """Block rising from ``start`` to ``limit`` geometrically with ratio ``q``."""
    return OmegaBlock(E.sub(E.const(limit), E.mul(E.const(limit - start), E.geo(q))), limit)


def random_zseq(rng: random.Random, max_blocks: int = 2, max_tail: int = 3, repeat_p: float = 0.25,
                start_choices=(-1, 0, 1)) -> ZSeq:
    """Mixed finite and block shapes with values on a coarse grid, so ties are common."""
    v = Fraction(rng.choice(start_choices))
    blocks = []
    for _ in range(rng.randint(0, max_blocks)):
        lim = v + rng.choice(STEPS)
        blocks.append(block_from(v, lim, rng.choice(RATIOS)))
        v = lim
    tail = [v]
    for _ in range(rng.randint(0, max_tail - 1)):
        tail.append(tail[-1] + rng.choice(STEPS))
    return require_valid(ZSeq(tuple(blocks), tuple(tail), rng.random() < repeat_p))


def variant(rng: random.Random, x: ZSeq) -> ZSeq:
    """A sequence sharing a prefix with ``x``: truncated, extended, bent or re-flagged."""
    kind = rng.randrange(4)
    tail = list(x.tail)
    if kind == 0 and len(tail) > 1:
        tail = tail[: rng.randint(1, len(tail) - 1)]
    elif kind == 1:
        tail.append(tail[-1] + rng.choice(STEPS))
    elif kind == 2 and len(tail) > 1:
        k = rng.randint(1, len(tail) - 1)
        lo = tail[k - 1]
        tail = tail[:k] + [lo + rng.choice(STEPS) / 2]
    return require_valid(ZSeq(x.blocks, tuple(tail), rng.random() < 0.25))


def related_triple(rng: random.Random) -> tuple[ZSeq, ZSeq, ZSeq]:
    x = random_zseq(rng)
    pick = lambda: variant(rng, x) if rng.random() < 0.7 else random_zseq(rng)  # noqa: E731
    return x, pick(), pick()


def random_tree(rng: random.Random, n: int, roots: int = 1) -> Tree:
    parent = {}
    names = [f"n{k}" for k in range(n)]
    for k, t in enumerate(names):
        parent[t] = None if k < roots else names[rng.randrange(k)]
    return Tree(parent, names)


def random_increasing(rng: random.Random, T: Tree, steps=(0, 0, 1, 2)) -> dict:
    """Rational increasing map; zero steps create plateaux."""
    rho = {}
    for t in T.nodes:
        p = T.parent[t]
        base = Fraction(0) if p is None else rho[p]
        rho[t] = base + Fraction(rng.choice(steps))
    return rho


def random_weights(rng: random.Random, T: Tree, eps: Fraction) -> dict:
    grid = [Fraction(k, 8) for k in range(1, 9) if Fraction(k, 8) >= eps]
    return {t: rng.choice(grid) for t in T.nodes}


def random_norm(rng: random.Random, T: Tree, kind: str, eps: Fraction = Fraction(1, 2)) -> NormModel:
    if kind == "sup":
        return sup_norm(eps)
    if kind == "weighted_sup":
        return weighted_sup(random_weights(rng, T, eps), eps)
    if kind == "scaled_l2":
        # 1/sqrt(n) * |x|_2 >= |x|_inf / sqrt(n), so epsilon must not exceed 1/sqrt(n)
        n = len(T)
        eps = min(eps, Fraction(1, 1 + int(n ** 0.5)))
        return scaled_lp(2.0, n ** -0.5, eps)
    raise ValueError(f"unknown norm kind {kind!r}")
