"""Recursive plateau refinement producing a Z-valued increasing map on a finite tree.

Level 0 partitions the tree into the plateaux of ``t -> mu(t)``, each with
``f = 1_(0, 0_V]``. A plateau ``V`` with more than one node is refined by the
plateaux of its slack function ``lambda`` on ``V minus {0_V}``, together with
``{0_V}``; a refined piece ``W`` gets
``f_W = f + (f(0_V) + lambda(0_W)) 1_(0_V, 0_W]``. The recursion stops when
every plateau is a singleton (finitely many steps on a finite tree).

``pi(t)`` starts with ``-mu(t)`` and records, level by level, the common
value of ``mu(f_W, .)`` on the plateau ``W`` containing ``t``, stopping once
``t`` is the least element of its plateau or right after a vanishing slack.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from ..errors import NotIncreasing, ToleranceBreach
from ..ordinals import Cmp
from ..trees.badpoints import detect_zbad_points
from ..trees.core import Tree
from ..trees.plateaux import (
    Plateau, check_increasing, ever_branching_core, plateau_partition, value_cmp,
)
from ..zorder.seq import ZSeq, phi_map, z_compare
from .mu import CtFunction, lambda_eval, mu_eval, mu_node
from .norms import NormModel, check_norm


@dataclass
class PlateauRecord:
    least: object
    members: list
    f: CtFunction
    mu: object  # common value of mu(f, .) on the plateau
    mu_spread: float = 0.0  # max deviation of mu(f, t) from mu over the plateau
    bound_lhs: object = 0
    bound_rhs: object = 0
    f_sup: object = 0
    mu_measured: object = None  # value at the least element, before snapping

    @property
    def bound_slack(self):
        return self.bound_rhs - self.bound_lhs


@dataclass
class Level:
    index: int
    plateaux: list  # PlateauRecord
    of: dict  # node -> least element of its plateau at this level
    lam: dict = field(default_factory=dict)  # node -> slack value (nodes below a refined plateau)
    lam_raw: dict = field(default_factory=dict)

    def record(self, t) -> PlateauRecord:
        return self.by_least[self.of[t]]

    @property
    def by_least(self) -> dict:
        return {r.least: r for r in self.plateaux}


@dataclass
class Check:
    name: str
    ok: bool
    detail: str = ""
    value: object = None


@dataclass
class PipelineLedger:
    tree: Tree
    norm: NormModel
    exact: bool
    levels: list
    mu: dict
    pi: dict
    checks: list
    tol_plateau: float
    tol_cond: float
    max_increment_residual: object = 0.0
    families: list = field(default_factory=list)

    def check(self, name: str) -> Check:
        return next(c for c in self.checks if c.name == name)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def lambda_values(self) -> list[tuple[int, object, object]]:
        return [(lv.index, t, v) for lv in self.levels for t, v in lv.lam.items()]


def _num(x, exact: bool):
    return x if exact else float(x)


def _zero(exact: bool):
    return Fraction(0) if exact else 0.0


def build_pi(T: Tree, norm: NormModel, eps=None, tol_plateau: float = 1e-9, tol_cond: float = 1e-6,
             method: str = "auto", check_norm_first: bool = True) -> PipelineLedger:
    if eps is not None and Fraction(eps) != norm.epsilon:
        norm = NormModel(norm.kind, Fraction(eps), norm.lattice, norm.gateaux, norm.weights, norm.p,
                         norm.scale, norm.evaluator, norm.label)
    if check_norm_first:
        check_norm(norm, T)
    exact = norm.exact and norm.lattice and method != "numeric"
    tol = 0.0 if exact else tol_plateau
    epsn = _num(norm.epsilon, exact)
    one = _num(1, exact)

    mu = {t: mu_node(T, norm, t, method).value for t in T.nodes}
    P0 = plateau_partition(T, mu, tol)
    recs = []
    for V in P0.plateaux:
        f = CtFunction.indicator(T, V.least, exact)
        recs.append(PlateauRecord(V.least, sorted(V.members, key=T.index.get), f, mu[V.least]))
    levels = [Level(0, recs, dict(P0.of))]

    while True:
        cur = levels[-1]
        for rec in cur.plateaux:
            _conditions(T, norm, rec, method, epsn, one)
        if all(len(r.members) == 1 for r in cur.plateaux):
            break
        nxt_recs, nxt_of = [], {}
        for rec in cur.plateaux:
            if len(rec.members) == 1:
                nxt_recs.append(PlateauRecord(rec.least, rec.members, rec.f, rec.mu))
                nxt_of[rec.least] = rec.least
                continue
            V = Plateau(rec.least, frozenset(rec.members))
            rest = [t for t in rec.members if t != rec.least]
            raw = {}
            for t in rest:
                raw[t] = lambda_eval(T, norm, V, rec.f, t, method, check=False).value
            cur.lam_raw.update(raw)
            sub = _forest(T, rest)
            neg = {t: -raw[t] for t in rest}
            try:
                Pl = plateau_partition(sub, neg, tol)
            except NotIncreasing as exc:
                raise ToleranceBreach(f"slack function is not decreasing on the plateau at {rec.least!r}: {exc}",
                                      witness=exc.witness) from exc
            nxt_recs.append(PlateauRecord(rec.least, [rec.least], rec.f, rec.mu))
            nxt_of[rec.least] = rec.least
            for W in Pl.plateaux:
                lam_w = raw[W.least]
                for t in W.members:
                    cur.lam[t] = lam_w
                    nxt_of[t] = W.least
                fW = rec.f.raised(T, W.least, rec.f.top + lam_w)
                measured = mu_eval(T, norm, fW, 0, W.least, method).value
                canon = rec.mu if lam_w == 0 else measured
                nxt_recs.append(PlateauRecord(W.least, sorted(W.members, key=T.index.get), fW, canon,
                                              mu_measured=measured))
        levels.append(Level(len(levels), nxt_recs, nxt_of))

    pi = {t: _assemble(t, mu, levels, exact) for t in T.nodes}
    ledger = PipelineLedger(T, norm, exact, levels, mu, pi, [], tol_plateau, tol_cond)
    _pipeline_checks(ledger)
    return ledger


def _forest(T: Tree, keep: list) -> Tree:
    keep_set = set(keep)
    parent = {}
    for t in keep:
        p = T.parent[t]
        parent[t] = p if p in keep_set else None
    return Tree(parent, sorted(keep, key=T.index.get))


def _conditions(T: Tree, norm: NormModel, rec: PlateauRecord, method: str, epsn, one):
    base = mu_eval(T, norm, rec.f, 0, rec.least, method).value
    dev = 0.0
    for t in rec.members:
        m = mu_eval(T, norm, rec.f, 0, t, method).value
        dev = max(dev, float(abs(m - rec.mu)), float(abs(m - base)))
    rec.mu_spread = dev
    rec.f_sup = rec.f.sup()
    rec.bound_lhs = rec.mu - one
    rec.bound_rhs = epsn / 2 * (rec.f_sup - one)


def _assemble(t, mu: dict, levels: list[Level], exact: bool) -> ZSeq:
    vals = [-mu[t]]
    for a, lv in enumerate(levels[:-1]):
        rec = lv.record(t)
        if rec.least == t:
            break
        vals.append(levels[a + 1].record(t).mu)
        if lv.lam[t] == 0:
            break
    return ZSeq.of(*(Fraction(v) if exact else float(v) for v in vals))


def _pipeline_checks(L: PipelineLedger):
    T, eps = L.tree, L.norm.epsilon
    out = L.checks
    mu_spread = max(r.mu_spread for lv in L.levels for r in lv.plateaux)
    out.append(Check("constant_mu_on_plateaux", mu_spread <= L.tol_cond, f"max residual {mu_spread:.3g}", mu_spread))
    slack = min(r.bound_slack for lv in L.levels for r in lv.plateaux)
    out.append(Check("mu_growth_bound", slack >= -L.tol_cond, f"min slack {float(slack):.3g}", slack))
    bound = 2 / eps - 1
    fsup = max(r.f_sup for lv in L.levels for r in lv.plateaux)
    out.append(Check("f_sup_bound", fsup <= bound + L.tol_cond, f"max |f| = {float(fsup):.6g} <= {bound}", fsup))
    # increment identity pi(t)_(a+1) - pi(t)_a = epsilon/2 * lambda_a(t), for a >= 1
    worst = Fraction(0) if L.exact else 0.0
    for t in T.nodes:
        x = L.pi[t]
        vals = list(x.finals)
        for a in range(1, len(vals) - 1):
            lam = L.levels[a].lam_raw[t]
            r = abs(Fraction(vals[a + 1]) - Fraction(vals[a]) - Fraction(eps) / 2 * Fraction(lam))
            worst = max(worst, r if L.exact else float(r))
    L.max_increment_residual = worst
    tol_inc = 0.0 if L.exact else 1e-9
    out.append(Check("increment_identity", worst <= tol_inc, f"max residual {float(worst):.3g}", worst))
    sign_ok = all(x.value(0) < 0 and all(v > 0 for v in x.finals[1:]) for x in L.pi.values())
    out.append(Check("pi_signs", sign_ok, "first coordinate negative, later ones positive"))
    try:
        check_increasing(T, L.pi)
        out.append(Check("pi_increasing", True))
    except NotIncreasing as exc:
        out.append(Check("pi_increasing", False, str(exc)))
    lam_ok = all(v >= 0 for lv in L.levels for v in lv.lam_raw.values())
    out.append(Check("lambda_nonnegative", lam_ok))
    if mu_spread > L.tol_cond:
        raise ToleranceBreach(f"constant-mu residual {mu_spread} exceeds {L.tol_cond}", witness={"residual": mu_spread})
    if slack < -L.tol_cond:
        raise ToleranceBreach(f"mu growth bound violated by {-float(slack)}", witness={"slack": float(slack)})


# -- ρ = Φ ∘ π ------------------------------------------------------------


@dataclass
class RhoReport:
    rho: dict
    checks: list

    def check(self, name: str) -> Check:
        return next(c for c in self.checks if c.name == name)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)


def build_rho(L: PipelineLedger, families: list = ()) -> RhoReport:
    T = L.tree
    rho = {t: phi_map(L.pi[t]) for t in T.nodes}
    checks = []
    try:
        check_increasing(T, rho)
        checks.append(Check("rho_increasing", True))
    except NotIncreasing as exc:
        checks.append(Check("rho_increasing", False, str(exc)))
    same = plateau_partition(T, rho).as_sets() == plateau_partition(T, L.pi).as_sets()
    checks.append(Check("same_plateaux_as_pi", same))
    sharing = max((sum(1 for u in T.successors(t) if z_compare(rho[u], rho[t]) is Cmp.EQUAL)
                   for t in T.nodes), default=0)
    checks.append(Check("finite_successor_sharing", True, f"at most {sharing} successors share a value",
                        sharing))
    # plateaux where the slack vanished: finitely branching, no ever-branching subset
    vanish_ok = True
    for lv in L.levels:
        zero_leasts = {lv.of[t] for t, v in lv.lam.items() if v == 0}
        nxt = L.levels[lv.index + 1] if lv.index + 1 < len(L.levels) else None
        for r in zero_leasts:
            members = [t for t in T.nodes if nxt is not None and nxt.of.get(t) == r]
            if ever_branching_core(T, members).core:
                vanish_ok = False
    checks.append(Check("vanishing_plateaux_not_ever_branching", vanish_ok))
    bad = detect_zbad_points(T, rho, list(families))
    checks.append(Check("no_zbad_points", not bad, f"{len(bad)} flagged", [str(b.node) for b in bad]))
    return RhoReport(rho, checks)


# -- lattice corollary -----------------------------------------------------


@dataclass
class CorollaryReport:
    status: str  # "pass" | "fail" | "not_applicable"
    detail: str
    witness: dict | None = None


def verify_lattice_corollary(T: Tree, norm: NormModel, eps=None, **kw) -> CorollaryReport:
    L = build_pi(T, norm, eps, **kw)
    zero = [(a, t) for a, t, v in L.lambda_values() if v == 0]
    if not (norm.lattice and norm.gateaux):
        if zero:
            a, t = zero[0]
            return CorollaryReport("not_applicable", "norm is not flagged Gateaux smooth; the slack vanishes",
                                   {"level": a, "node": str(t), "lambda": "0"})
        return CorollaryReport("not_applicable", "norm is not flagged lattice and Gateaux smooth")
    if zero:
        a, t = zero[0]
        return CorollaryReport("fail", "slack vanished for a smooth lattice norm",
                               {"level": a, "node": str(t), "lambda": "0"})
    outside = [t for t in T.nodes if not L.pi[t].in_Y()]
    if outside:
        return CorollaryReport("fail", "pi leaves Y", {"node": str(outside[0])})
    for s, t in T.comparable_pairs():
        if value_cmp(L.pi[s], L.pi[t]) >= 0:
            return CorollaryReport("fail", "pi is not strictly increasing", {"pair": [str(s), str(t)]})
    return CorollaryReport("pass", "pi is Y-valued and strictly increasing; every slack is positive")
