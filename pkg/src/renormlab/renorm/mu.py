"""Tail-infimum functions and their slack functions.

For ``f`` supported and increasing on ``(0, t]`` and ``u >= t``::

    mu(f, delta, u) = inf { |f + (f(t) + delta) 1_(t,u] + phi| : phi supported on (u, inf) }

For lattice norms the infimum is attained at ``phi = 0``. Otherwise it is
computed by coordinate descent with bounded scalar line searches; the search
box ``|phi_v| <= |g0| / epsilon`` loses nothing, since any larger coordinate
already forces the norm above ``|g0|``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.optimize import minimize_scalar

from ..errors import NonConvergence, PlateauViolation, ValidationError, WedgeViolation
from ..trees.core import Tree
from ..trees.plateaux import Plateau
from .norms import NormModel

ETA = 1e-9  # solver tolerance
ITER_CAP = 100_000
LAMBDA_TOL = 1e-12  # bisection width, relative to the bracket
LAMBDA_ZERO = 1e-9  # slack values below this are reported as 0 (lattice norms)


@dataclass(frozen=True)
class CtFunction:
    """``f`` supported on ``(0, node]`` and increasing along it."""

    node: object
    values: dict

    @classmethod
    def indicator(cls, T: Tree, t, exact: bool = True) -> CtFunction:
        one = Fraction(1) if exact else 1.0
        return cls(t, {s: one for s in T.predecessors(t)})

    def at(self, s):
        return self.values.get(s, 0)

    @property
    def top(self):
        return self.values[self.node]

    def sup(self):
        return max(abs(v) for v in self.values.values())

    def validate(self, T: Tree):
        chain = T.predecessors(self.node)
        if set(chain) != set(self.values):
            raise ValidationError(f"function must be supported exactly on (0, {self.node!r}]")
        vals = [self.values[s] for s in chain]
        if any(b < a for a, b in zip(vals, vals[1:])):
            raise ValidationError(f"function is not increasing on (0, {self.node!r}]")

    def raised(self, T: Tree, u, amount) -> CtFunction:
        """``f + amount * 1_(node, u]``, a member of C_u."""
        vals = dict(self.values)
        for s in T.interval(self.node, u):
            vals[s] = amount
        return CtFunction(u, vals)


@dataclass
class MuResult:
    value: object
    phi: dict
    exact: bool
    sweeps: int = 0


def _base(T: Tree, f: CtFunction, delta, u) -> dict:
    g = dict(f.values)
    lift = f.top + delta
    for s in T.interval(f.node, u):
        g[s] = lift
    return g


def _as_array(T: Tree, g: dict) -> np.ndarray:
    x = np.zeros(len(T))
    for s, v in g.items():
        x[T.index[s]] = float(v)
    return x


def _numeric_min(T: Tree, norm: NormModel, x0: np.ndarray, free: list[int]) -> tuple[float, np.ndarray, int]:
    x = x0.copy()
    val = norm.value(x, T)
    box = val / float(norm.epsilon)
    calls = 0
    sweeps = 0
    rng = np.random.default_rng(0)
    while True:
        sweeps += 1
        before = val
        for k in free:
            def obj(s, k=k):
                x[k] = s
                return norm.value(x, T)

            cur = x[k]
            res = minimize_scalar(obj, bounds=(-box, box), method="bounded",
                                  options={"xatol": ETA * 1e-3})
            calls += 1
            if res.fun < val:
                x[k], val = res.x, float(res.fun)
            else:
                x[k] = cur
        if before - val > ETA * 1e-3:
            if calls > ITER_CAP:
                raise NonConvergence(f"no convergence after {calls} line searches", witness={"value": val})
            continue
        # coordinate descent can stall at corners of non-smooth norms:
        # try random directions (a cheap subgradient-free fallback)
        if norm.kind != "custom":
            break
        improved = False
        for _ in range(4 * len(free)):
            d = np.zeros_like(x)
            d[free] = rng.normal(size=len(free))

            def line(s):
                y = np.clip(x + s * d, -box, box)
                return norm.value(y, T)

            res = minimize_scalar(line, bounds=(-box, box), method="bounded", options={"xatol": ETA * 1e-3})
            calls += 1
            if res.fun < val - ETA * 1e-3:
                x = np.clip(x + res.x * d, -box, box)
                val = float(res.fun)
                improved = True
        if not improved:
            break
        if calls > ITER_CAP:
            raise NonConvergence(f"no convergence after {calls} line searches", witness={"value": val})
    return val, x, sweeps


def mu_eval(T: Tree, norm: NormModel, f: CtFunction, delta=0, u=None, method: str = "auto") -> MuResult:
    """``mu(f, delta, u)``; ``method`` is "auto", "exact" or "numeric"."""
    t = f.node
    u = t if u is None else u
    if not T.leq(t, u):
        raise WedgeViolation(f"{u!r} is not in the wedge above {t!r}", witness={"node": str(u)})
    g = _base(T, f, delta, u)
    free = [T.index[v] for v in T.strict_wedge(u)]
    use_exact = method == "exact" or (method == "auto" and norm.exact and norm.lattice)
    if use_exact:
        if not norm.exact:
            raise TypeError("exact evaluation needs a sup-type norm")
        exact_inputs = all(isinstance(v, (int, Fraction)) for v in g.values())
        val = norm.exact_value(g) if exact_inputs else float(norm.exact_value({k: Fraction(v) for k, v in g.items()}))
        return MuResult(val, {}, exact_inputs)
    x0 = _as_array(T, g)
    if (norm.lattice and method == "auto") or not free:
        return MuResult(norm.value(x0, T), {}, False)
    val, x, sweeps = _numeric_min(T, norm, x0, free)
    phi = {T.nodes[k]: float(x[k]) for k in free}
    return MuResult(val, phi, False, sweeps)


def mu_node(T: Tree, norm: NormModel, t, method: str = "auto") -> MuResult:
    """``mu(t) = inf |1_(0,t] + phi|``."""
    exact = norm.exact and method != "numeric"
    return mu_eval(T, norm, CtFunction.indicator(T, t, exact), 0, t, method)


# -- slack function ------------------------------------------------------


@dataclass
class LambdaResult:
    value: object
    exact: bool
    bracket: float | None = None
    evaluations: int = 0
    grid: list = field(default_factory=list)


def check_plateau(T: Tree, norm: NormModel, V: Plateau, f: CtFunction, tol: float = 1e-9,
                  method: str = "auto"):
    mu0 = mu_eval(T, norm, f, 0, V.least, method).value
    for t in V.members:
        m = mu_eval(T, norm, f, 0, t, method).value
        if abs(m - mu0) > tol:
            raise PlateauViolation(
                f"mu(f, .) is not constant on the plateau at {V.least!r}: {m} at {t!r} vs {mu0}",
                witness={"node": str(t)},
            )
    return mu0


def lambda_eval(T: Tree, norm: NormModel, V: Plateau, f: CtFunction, t, method: str = "auto",
                check: bool = True, tol_plateau: float = 1e-9, grid: int = 32) -> LambdaResult:
    """Largest ``delta >= 0`` with ``mu(f, delta, t) <= mu(f, 0_V) + epsilon delta / 2``."""
    if t not in V.members or t == V.least:
        raise ValidationError(f"{t!r} must lie in the plateau minus its least element")
    if f.node != V.least:
        raise ValidationError("the function must be supported on (0, 0_V]")
    eps = norm.epsilon
    if check:
        mu0 = check_plateau(T, norm, V, f, tol_plateau, method)
    else:
        mu0 = mu_eval(T, norm, f, 0, V.least, method).value
    exact = norm.exact and norm.lattice and method != "numeric" and isinstance(mu0, Fraction)
    if exact:
        # mu(f, delta, t) = max(A, W (c + delta)) with W the largest weight on (0_V, t]
        A, c = mu0, f.top
        W = max(norm.weight(s) for s in T.interval(V.least, t))
        lam = (A - W * c) / (W - eps / 2)
        return LambdaResult(max(Fraction(0), lam), True)
    epsf = float(eps)
    c = float(f.top)

    def F(d):
        return float(mu_eval(T, norm, f, d, t, method).value) - float(mu0) - epsf * d / 2

    # mu(f, d, t) >= epsilon (c + d) makes F positive beyond this bound
    hi = max(0.0, 2 * (float(mu0) - epsf * c) / epsf)
    hi = hi * 1.01 + 1e-9
    evals = 0
    while F(hi) <= 0:  # pragma: no cover - the bound above is provably enough
        hi *= 2
        evals += 1
        if evals > 60:
            raise NonConvergence("slack function never becomes positive")
    # solver noise on non-lattice norms is of order ETA
    ftol = LAMBDA_TOL if norm.lattice and method == "auto" else 10 * ETA
    pts = np.linspace(0.0, hi, grid + 1)
    vals = [F(d) for d in pts]
    evals += len(pts)
    feas = [k for k, v in enumerate(vals) if v <= ftol]
    last = feas[-1] if feas else 0
    lo, up = pts[last], pts[min(last + 1, grid)]
    width = LAMBDA_TOL * max(1.0, hi)
    while up - lo > width:
        mid = (lo + up) / 2
        evals += 1
        if F(mid) <= ftol:
            lo = mid
        else:
            up = mid
    # a feasibility slack of ftol moves the crossing by about ftol / slope
    zero = LAMBDA_ZERO if ftol == LAMBDA_TOL else 100 * ftol
    lam = 0.0 if lo < zero else lo
    return LambdaResult(lam, False, hi, evals, [(float(d), float(v)) for d, v in zip(pts, vals)])
