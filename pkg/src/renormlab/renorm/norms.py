"""Norms on R^T for a finite tree T, with sandwich, lattice and smoothness spot-checks."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from ..errors import SandwichViolation, ValidationError
from ..trees.core import Tree

KINDS = ("sup", "weighted_sup", "scaled_lp", "custom")


@dataclass
class NormModel:
    """A norm with ``epsilon * |x|_inf <= |x| <= |x|_inf``.

    ``weights`` (weighted_sup) map node ids to rationals in ``[epsilon, 1]``;
    ``scale * |x|_p`` for scaled_lp; ``evaluator`` takes a float vector in
    tree node order for custom norms.
    """

    kind: str
    epsilon: Fraction
    lattice: bool
    gateaux: bool
    weights: dict | None = None
    p: float | None = None
    scale: float | None = None
    evaluator: Callable | None = field(default=None, repr=False)
    label: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"unknown norm kind {self.kind!r}")
        self.epsilon = Fraction(self.epsilon)
        if not 0 < self.epsilon < 1:
            raise ValidationError(f"sandwich range: epsilon must lie in (0, 1), got {self.epsilon}")
        if self.weights is not None:
            self.weights = {k: Fraction(v) for k, v in self.weights.items()}

    @property
    def exact(self) -> bool:
        return self.kind in ("sup", "weighted_sup")

    def weight(self, t) -> Fraction:
        if self.kind == "sup":
            return Fraction(1)
        return self.weights[t]

    def exact_value(self, x: dict) -> Fraction:
        """Exact norm of a vector given as node -> rational (missing nodes are 0)."""
        if not self.exact:
            raise TypeError(f"{self.kind} norms have no exact evaluation")
        return max((self.weight(t) * abs(Fraction(v)) for t, v in x.items()), default=Fraction(0))

    def value(self, x: np.ndarray, T: Tree) -> float:
        if self.kind == "sup":
            return float(np.max(np.abs(x))) if len(x) else 0.0
        if self.kind == "weighted_sup":
            w = self.weight_vector(T)
            return float(np.max(w * np.abs(x))) if len(x) else 0.0
        if self.kind == "scaled_lp":
            return float(self.scale * np.linalg.norm(x, ord=self.p))
        return float(self.evaluator(x))

    def weight_vector(self, T: Tree) -> np.ndarray:
        return np.array([float(self.weight(t)) for t in T.nodes])

    def describe(self) -> dict:
        out = {"kind": self.kind, "epsilon": _q(self.epsilon), "lattice": self.lattice,
               "gateaux": self.gateaux}
        if self.weights is not None:
            out["weights"] = {str(k): _q(v) for k, v in self.weights.items()}
        if self.p is not None:
            out["p"] = self.p
            out["scale"] = repr(self.scale)
        if self.label:
            out["label"] = self.label
        return out


def _q(v: Fraction) -> str:
    v = Fraction(v)
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def sup_norm(epsilon=Fraction(1, 2)) -> NormModel:
    return NormModel("sup", epsilon, lattice=True, gateaux=False)


def weighted_sup(weights: dict, epsilon) -> NormModel:
    return NormModel("weighted_sup", epsilon, lattice=True, gateaux=False, weights=weights)


def scaled_lp(p: float, scale: float, epsilon) -> NormModel:
    smooth = 1 < p < math.inf
    return NormModel("scaled_lp", epsilon, lattice=True, gateaux=smooth, p=p, scale=scale)


def quadratic_norm(M: np.ndarray, scale: float, epsilon, lattice: bool = False) -> NormModel:
    """``scale * sqrt(x^T M x)`` for symmetric positive definite ``M``."""
    M = np.asarray(M, dtype=float)

    def ev(x):
        return scale * math.sqrt(max(float(x @ M @ x), 0.0))

    return NormModel("custom", epsilon, lattice=lattice, gateaux=True, evaluator=ev, label="quadratic")


# -- spot-checks -----------------------------------------------------------


@dataclass
class NormCheck:
    sandwich_ok: bool
    lattice_ok: bool | None
    gateaux_ok: bool | None
    samples: int
    notes: list = field(default_factory=list)


def _samples(T: Tree, rng: np.random.Generator, count: int) -> list[np.ndarray]:
    n = len(T)
    out = [np.ones(n)]
    for t in T.nodes:
        v = np.zeros(n)
        for s in T.predecessors(t):
            v[T.index[s]] = 1.0
        out.append(v)
    while len(out) < count:
        kind = len(out) % 3
        if kind == 0:
            out.append(rng.normal(size=n))
        elif kind == 1:
            out.append(rng.choice([-1.0, 0.0, 1.0, 2.0], size=n))
        else:
            out.append(rng.uniform(-3, 3, size=n))
    return out


def check_norm(norm: NormModel, T: Tree, seed: int = 0, count: int = 120, fd_step: float = 1e-6,
               fd_tol: float = 1e-4, strict: bool = True) -> NormCheck:
    """Sample-based checks of the sandwich inequality and the declared flags.

    With ``strict`` a failed sandwich raises SandwichViolation and a failed
    flag check raises ValidationError.
    """
    rng = np.random.default_rng(seed)
    eps = float(norm.epsilon)
    notes = []
    if norm.kind == "weighted_sup":
        missing = [t for t in T.nodes if t not in norm.weights]
        if missing:
            raise ValidationError(f"weights missing for nodes {missing}")
        bad = [t for t in T.nodes if not norm.epsilon <= norm.weights[t] <= 1]
        if bad and strict:
            raise SandwichViolation(f"weights outside [epsilon, 1] at {bad}", witness={"nodes": bad})
    xs = _samples(T, rng, count)
    sandwich = True
    for x in xs:
        nx = norm.value(x, T)
        inf = float(np.max(np.abs(x))) if len(x) else 0.0
        if not (eps * inf - 1e-12 <= nx <= inf + 1e-12):
            sandwich = False
            notes.append(f"sandwich fails at {x.tolist()}: norm {nx}, sup {inf}")
            if strict:
                raise SandwichViolation(notes[-1], witness={"vector": x.tolist()})
            break
    lattice_ok = None
    if norm.lattice:
        lattice_ok = True
        for x in xs:
            y = x * rng.uniform(0, 1, size=len(x))
            if norm.value(y, T) > norm.value(x, T) + 1e-12:
                lattice_ok = False
                notes.append("lattice monotonicity fails")
                if strict:
                    raise ValidationError("norm flagged lattice is not monotone in |x|")
                break
    gateaux_ok = None
    if norm.gateaux:
        gateaux_ok = True
        for x in xs[: max(8, count // 4)]:
            if not np.any(x):
                continue
            h = rng.normal(size=len(x))
            right = (norm.value(x + fd_step * h, T) - norm.value(x, T)) / fd_step
            left = (norm.value(x, T) - norm.value(x - fd_step * h, T)) / fd_step
            if abs(right - left) > fd_tol * max(1.0, abs(right)):
                gateaux_ok = False
                notes.append(f"one-sided derivatives differ at {x.tolist()}")
                if strict:
                    raise ValidationError("norm flagged Gateaux smooth has a corner")
                break
    return NormCheck(sandwich, lattice_ok, gateaux_ok, len(xs), notes)
