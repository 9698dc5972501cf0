"""``renormlab <group> <command>``: reproducible runs with JSON reports.

Exit status is 0 when every check in the report passes, 1 when a check
fails and 2 when the input is rejected.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from . import game as G
from .errors import RenormLabError
from .ordinals import OMEGA, format_ordinal
from .renorm import build_pi, build_rho, verify_lattice_corollary
from .report import Report, exact, tagged
from .specio import load_json, parse_family, parse_norm, parse_tree, parse_zseq
from .trees import (
    FullBinaryTree, OrdinalChain, antichain_decomposition, detect_bad_points, detect_zbad_points,
    embeddable, plateau_partition, psi_fragment, psi_successors_rule, q_embed, sigma_tree,
)
from .trees.plateaux import value_cmp
from .zorder import phi_map, theta_map, z0_sup, z_compare, z_converges, z_first_difference, z_product


def _common(p: argparse.ArgumentParser):
    p.add_argument("--tree", help="tree spec (JSON)")
    p.add_argument("--norm", help="norm spec (JSON)")
    p.add_argument("--eps", help="epsilon as p/q, overriding the norm spec")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--tol-plateau", type=float, default=1e-9)
    p.add_argument("--tol-cond", type=float, default=1e-6)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="renormlab", description=__doc__.splitlines()[0])
    groups = ap.add_subparsers(dest="group", required=True)

    order = groups.add_parser("order", help="operations on transfinite sequences").add_subparsers(
        dest="cmd", required=True)
    for name, nargs in (("compare", 2), ("product", 2), ("phi", 1), ("theta", 1)):
        p = order.add_parser(name)
        p.add_argument("seqs", nargs=nargs)
        _common(p)
    for name in ("sup", "converge"):
        p = order.add_parser(name)
        if name == "converge":
            p.add_argument("point")
        p.add_argument("--family", required=True, help="family spec (JSON)")
        _common(p)

    tree = groups.add_parser("tree", help="tree constructions and invariants").add_subparsers(
        dest="cmd", required=True)
    p = tree.add_parser("sigma")
    p.add_argument("--order", required=True, help="comma separated linear order, e.g. 1,2,3")
    _common(p)
    p = tree.add_parser("psi")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--kappa", type=int, default=2)
    _common(p)
    p = tree.add_parser("embed")
    p.add_argument("--sigma", help="embed the sigma tree of this order")
    p.add_argument("--into", required=True, help="target linear order")
    p.add_argument("--expect", choices=("yes", "no"))
    _common(p)
    for name in ("antichains", "plateaux", "badpoints"):
        _common(tree.add_parser(name))

    renorm = groups.add_parser("renorm", help="the renorming pipeline").add_subparsers(dest="cmd", required=True)
    p = renorm.add_parser("pipeline")
    p.add_argument("--method", choices=("auto", "exact", "numeric"), default="auto")
    _common(p)

    game = groups.add_parser("game", help="the tree game").add_subparsers(dest="cmd", required=True)
    p = game.add_parser("play")
    p.add_argument("--generator", choices=("omega-chain", "binary"))
    p.add_argument("--a", dest="a_strategy", choices=("stay", "climb"), default="climb")
    p.add_argument("--b", dest="b_strategy", choices=("stay", "climb", "successor", "fixed-pair"), default="climb")
    p.add_argument("--rounds", type=int, default=20)
    _common(p)
    p = game.add_parser("strategy")
    p.add_argument("--rounds", type=int, default=12)
    _common(p)

    verify = groups.add_parser("verify", help="self-checks").add_subparsers(dest="cmd", required=True)
    p = verify.add_parser("all")
    p.add_argument("--quick", action="store_true", help="smaller randomized suites")
    _common(p)
    return ap


# -- helpers ---------------------------------------------------------------------


def _inputs(args) -> dict:
    keep = {k: v for k, v in vars(args).items() if k not in ("out",) and v is not None}
    return {k: (str(v) if isinstance(v, Path) else v) for k, v in keep.items()}


def _tree_spec(args):
    if not args.tree:
        raise RenormLabError("--tree is required")
    return parse_tree(load_json(args.tree))


def _norm(args, T):
    if not args.norm:
        raise RenormLabError("--norm is required")
    d = load_json(args.norm)
    if args.eps:
        d = dict(d, epsilon=args.eps)
    return parse_norm(d, T)


def _order(text: str) -> list:
    out = []
    for p in text.split(","):
        p = p.strip()
        out.append(int(p) if p.lstrip("-").isdigit() else p)
    return out


# -- commands -------------------------------------------------------------------


def cmd_order(args, rep: Report):
    if args.cmd == "compare":
        x, y = (parse_zseq(s) for s in args.seqs)
        c = z_compare(x, y)
        d = z_first_difference(x, y)
        rep.results.update(comparison=c.name.lower(), first_difference={
            "kind": d.kind, "position": None if d.position is None else format_ordinal(d.position),
            "smaller": d.smaller, "shorter": d.shorter})
        rep.check("antisymmetry", z_compare(y, x).value == -c.value)
    elif args.cmd == "product":
        x, y = (parse_zseq(s) for s in args.seqs)
        rep.results["product"] = z_product(x, y)
    elif args.cmd == "phi":
        x = parse_zseq(args.seqs[0])
        rep.results["phi"] = phi_map(x)
    elif args.cmd == "theta":
        rep.results["theta"] = theta_map(parse_zseq(args.seqs[0]))
    elif args.cmd == "sup":
        res = z0_sup(parse_family(load_json(args.family)))
        rep.results.update(sup=res.sup, attained=res.attained)
    elif args.cmd == "converge":
        x = parse_zseq(args.point)
        conv = z_converges(x, parse_family(load_json(args.family)))
        rep.results.update(converges=conv.converges, case=conv.case, infimum=conv.infimum, reason=conv.reason)


def cmd_tree(args, rep: Report):
    if args.cmd == "sigma":
        T = sigma_tree(_order(args.order))
        rep.results.update(nodes=len(T), tree=T.to_json())
        q = q_embed(T, {t: i for i, t in enumerate(T.nodes)})
        rep.check("q_embedding_strict", all(q[s] < q[t] for s, t in T.comparable_pairs()))
    elif args.cmd == "psi":
        T = psi_fragment(args.k, args.kappa)
        L = list(range(1, args.k + 1))
        rep.results.update(nodes=len(T), tree=T.to_json(), successors={
            str(t): len(psi_successors_rule(t, L, L)) for t in T.nodes})
    elif args.cmd == "embed":
        L = _order(args.into)
        if args.sigma:
            T = sigma_tree(_order(args.sigma))
            expect = args.expect or ("no" if _order(args.sigma) == L else None)
        else:
            T = _tree_spec(args).tree
            expect = args.expect
        emb = embeddable(T, L)
        rep.results.update(embeddable="Yes" if emb.found else "No", assignments_tried=emb.assignments_tried,
                           witness=None if emb.witness is None else {str(k): v for k, v in emb.witness.items()})
        if expect:
            rep.check("expected_answer", emb.found == (expect == "yes"), f"expected {expect}")
    elif args.cmd == "antichains":
        T = _tree_spec(args).tree
        levels = antichain_decomposition(T)
        rep.results["antichains"] = [sorted(map(str, a)) for a in levels]
        rep.check("antichains", all(not T.lt(s, t) for a in levels for s in a for t in a))
    elif args.cmd == "plateaux":
        spec = _tree_spec(args)
        P = plateau_partition(spec.tree, spec.values, args.tol_plateau if not spec.z_valued else 0.0)
        rep.results["plateaux"] = [{"least": str(V.least), "members": sorted(map(str, V.members))}
                                   for V in P.plateaux]
        least = [V.least for V in P.plateaux]
        rep.check("strict_on_least_elements", all(
            value_cmp(spec.values[s], spec.values[t]) < 0
            for s in least for t in least if spec.tree.lt(s, t)))
    elif args.cmd == "badpoints":
        spec = _tree_spec(args)
        finder = detect_zbad_points if spec.z_valued else detect_bad_points
        bad = finder(spec.tree, spec.values, spec.families)
        rep.results["bad_points"] = [{"node": str(b.node), "case": b.case, "detail": b.detail} for b in bad]


def _pipeline_report(T, norm, args, rep: Report, method: str = "auto"):
    L = build_pi(T, norm, tol_plateau=args.tol_plateau, tol_cond=args.tol_cond, method=method)
    R = build_rho(L)
    tol = args.tol_plateau
    rep.results.update(
        norm=norm.describe(),
        mode="exact" if L.exact else "numeric",
        mu={str(t): tagged(v, L.exact, tol) for t, v in L.mu.items()},
        pi={str(t): v for t, v in L.pi.items()},
        rho={str(t): v for t, v in R.rho.items()},
        levels=[{
            "index": lv.index,
            "plateaux": [{"least": str(r.least), "members": [str(m) for m in r.members],
                          "mu": tagged(r.mu, L.exact, tol),
                          "mu_growth_slack": tagged(r.bound_slack, L.exact, args.tol_cond),
                          "f_sup": tagged(r.f_sup, L.exact, tol)} for r in lv.plateaux],
            "lambda": {str(t): tagged(v, L.exact, 1e-9) for t, v in lv.lam_raw.items()},
        } for lv in L.levels],
        increment_residual=tagged(L.max_increment_residual, L.exact, 1e-9) if not L.exact
        else exact(Fraction(L.max_increment_residual)),
    )
    for c in L.checks + R.checks:
        rep.check(c.name, c.ok, c.detail)
    return L, R


def cmd_renorm(args, rep: Report):
    spec = _tree_spec(args)
    norm = _norm(args, spec.tree)
    _pipeline_report(spec.tree, norm, args, rep, args.method)
    cor = verify_lattice_corollary(spec.tree, norm, check_norm_first=False, method=args.method)
    rep.results["lattice_corollary"] = {"status": cor.status, "detail": cor.detail, "witness": cor.witness}
    rep.check("lattice_corollary", cor.status != "fail", cor.detail)


def _fixed_pair_games(T, rho, rounds: int, rep: Report, label: str = ""):
    """Fixed-pair strategy against A climbing and against A jumping to each maximal node."""
    opponents = [("climb", G.Climb())] + [(f"jump:{m}", G.Scripted([m])) for m in T.maximal()]
    games = []
    for name, a in opponents:
        b = G.strategy_fixed_pair(T, rho)
        res = G.play_game(T, a, b, rounds)
        games.append({"opponent": name, "result": res.to_json(), "trace": [m.to_json() for m in b.trace]})
        rep.check(f"{label}slack_rule:{name}", all(m.slack_ok for m in b.trace))
        rep.check(f"{label}a_wins_on_finite_tree:{name}", res.outcome == "AWins")
    return games


def cmd_game(args, rep: Report):
    if args.cmd == "play":
        if args.generator:
            T = OrdinalChain(OMEGA) if args.generator == "omega-chain" else FullBinaryTree()
            strat = {"stay": G.stay, "climb": G.Climb(), "successor": G.Successor()}
            b = strat.get(args.b_strategy)
            if b is None:
                raise RenormLabError("the fixed-pair strategy needs an explicit tree")
            res = G.play_game(T, strat[args.a_strategy], b, args.rounds)
            rep.results["game"] = res.to_json()
            return
        spec = _tree_spec(args)
        T = spec.tree
        a = G.stay if args.a_strategy == "stay" else G.Climb()
        b = {"stay": G.stay, "climb": G.Climb(), "successor": G.Successor()}.get(args.b_strategy)
        if args.b_strategy == "fixed-pair":
            b = G.strategy_fixed_pair(T, spec.values)
        res = G.play_game(T, a, b, args.rounds)
        rep.results["game"] = res.to_json()
        if args.b_strategy == "fixed-pair":
            rep.results["trace"] = [m.to_json() for m in b.trace]
            rep.check("slack_rule", all(m.slack_ok for m in b.trace))
        rep.check("a_wins_on_finite_tree", res.outcome == "AWins")
    elif args.cmd == "strategy":
        spec = _tree_spec(args)
        T = spec.tree
        if spec.values:
            rho = spec.values
        else:
            L = build_pi(T, _norm(args, T), tol_plateau=args.tol_plateau, tol_cond=args.tol_cond)
            rho = build_rho(L).rho
        rep.results["games"] = _fixed_pair_games(T, rho, args.rounds, rep)
        w = G.constancy_wedge(T, rho)
        rep.results["constancy_wedge"] = {"node": str(w.node), "certified": w.certified}


def cmd_verify(args, rep: Report):
    from .verify import run_all

    run_all(rep, seed=args.seed, quick=args.quick)


COMMANDS = {"order": cmd_order, "tree": cmd_tree, "renorm": cmd_renorm, "game": cmd_game, "verify": cmd_verify}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    rep = Report(f"{args.group} {args.cmd}", _inputs(args), args.seed)
    code = 0
    try:
        COMMANDS[args.group](args, rep)
        code = 0 if rep.ok else 1
    except RenormLabError as exc:
        rep.results["error"] = {"type": type(exc).__name__, "message": str(exc), "witness": exc.witness}
        rep.check("input_accepted", False, str(exc))
        code = 2
    text = rep.dumps()
    if args.out:
        Path(args.out).write_text(text)
        print(f"{rep.command}: {'ok' if rep.ok else 'FAILED ' + ', '.join(c['name'] for c in rep.failures)}",
              file=sys.stderr)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
