"""The tree game: a referee, simple strategies and the fixed-pair strategy for B.

Players alternate nominating nodes ``t_0 <= t_1 <= ...``; B plays the even
indices, starting with ``t_0``. B wins when the sequence has no upper bound.
A strategy is a callable ``(tree, history) -> node``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import IllegalMove, NoFixedPair
from .ordinals import Ordinal, format_ordinal
from .trees.core import LazyTree, Tree
from .trees.plateaux import check_increasing
from .zorder.seq import ZSeq, fmt_q, to_Z0, z_first_difference


@dataclass
class GameResult:
    outcome: str  # "AWins" | "BWins" | "Undecided"
    history: list
    upper_bound: object = None
    certificate: str = ""

    def to_json(self) -> dict:
        return {"outcome": self.outcome, "history": [str(t) for t in self.history],
                "upper_bound": None if self.upper_bound is None else str(self.upper_bound),
                "certificate": self.certificate}


def play_game(T: Tree | LazyTree, strat_a, strat_b, round_cap: int = 20) -> GameResult:
    """Play ``round_cap`` moves and adjudicate.

    On an explicit finite tree every chain is finite, so the continuation of
    any play stays below a maximal node and A wins; the last move bounds the
    recorded history. On a generated tree the generator's oracle decides,
    given whether B's strategy declares ``advances_strictly``; without a
    certificate the result is Undecided.
    """
    history: list = []
    if round_cap <= 0:
        return GameResult("Undecided", history, certificate="no moves played")
    for k in range(round_cap):
        strat = strat_b if k % 2 == 0 else strat_a
        move = strat(T, list(history))
        _check_move(T, history, move, "B" if k % 2 == 0 else "A")
        history.append(move)
    if isinstance(T, Tree):
        bound = history[-1]
        assert all(T.leq(t, bound) for t in history)
        return GameResult("AWins", history, bound,
                          "finite tree: the play continues inside the finite wedge above the last move")
    cert = T.unbounded(history, bool(getattr(strat_b, "advances_strictly", False)))
    if cert is not None:
        return GameResult("BWins", history, certificate=f"{cert.kind}: {cert.detail}")
    return GameResult("Undecided", history, certificate="generator gives no verdict")


def _check_move(T, history: list, move, player: str):
    if isinstance(T, Tree):
        if move not in T.index:
            raise IllegalMove(f"{player} nominated unknown node {move!r}", witness={"move": str(move)})
    if history and not T.leq(history[-1], move):
        raise IllegalMove(f"{player} moved from {history[-1]!r} to {move!r}, which is not above it",
                          witness={"from": str(history[-1]), "to": str(move), "round": len(history)})


# -- simple strategies ------------------------------------------------------


def stay(T, history):
    """Repeat the last move (or start at the first root)."""
    return history[-1] if history else T.roots()[0]


class Climb:
    """Move to the first child of the last move, or stay at a maximal node."""

    advances_strictly = False

    def __call__(self, T, history):
        if not history:
            return T.roots()[0]
        kids = T.successors(history[-1]) if isinstance(T, Tree) else T.children(history[-1])
        return kids[0] if kids else history[-1]


class Successor(Climb):
    """Always move strictly up; only total on trees without maximal nodes."""

    advances_strictly = True

    def __call__(self, T, history):
        if not history:
            return T.roots()[0]
        kids = T.successors(history[-1]) if isinstance(T, Tree) else T.children(history[-1])
        if not kids:
            raise IllegalMove(f"no successor above {history[-1]!r}")
        return kids[0]


@dataclass
class Scripted:
    """Plays the listed nodes in turn, then stays."""

    moves: list
    _k: int = 0

    def __call__(self, T, history):
        if self._k < len(self.moves):
            self._k += 1
            return self.moves[self._k - 1]
        return stay(T, history)


# -- fixed pairs -------------------------------------------------------------


def fixed_length(T: Tree, rho: dict, u) -> Ordinal:
    """Least ordinal ``c`` such that ``(a, u)`` is a fixed pair exactly for ``a < c``."""
    x = rho[u]
    c = x.length
    for v in T.wedge(u):
        d = z_first_difference(x, rho[v])
        if d.kind == "equal":
            continue
        if d.position < c:
            c = d.position
    return c


def _sup_below(x: ZSeq, c: Ordinal) -> tuple[Fraction, Ordinal | None]:
    """sup of ``x_a`` over ``a < c`` and the index attaining it, if any."""
    if c.is_limit():
        j = c.omega_coefficient()
        return x.blocks[j - 1].limit, None
    a = c.predecessor()
    return x.value(a), a


def _index_above(x: ZSeq, c: Ordinal, target: Fraction) -> Ordinal:
    j = c.omega_coefficient() - 1
    blk = x.blocks[j]
    for i in range(10**6):
        if blk.value(i) > target:
            return Ordinal.omega_times(j, i)
    raise NoFixedPair(f"block at w*{j} never exceeds {target}")


@dataclass
class BMove:
    n: int
    r: Fraction
    alpha: Ordinal
    node: object
    value: Fraction

    @property
    def slack_ok(self) -> bool:
        return self.value > self.r - Fraction(1, 2 ** self.n)

    def to_json(self) -> dict:
        return {"n": self.n, "r": fmt_q(self.r), "alpha": format_ordinal(self.alpha), "node": str(self.node),
                "value": fmt_q(self.value), "slack_ok": self.slack_ok}


@dataclass
class FixedPairStrategy:
    """B's strategy: a fixed pair whose frozen coordinate is within ``2^-n`` of the best one.

    ``r_n`` is the maximum of ``rho(u)_a`` over fixed pairs ``(a, u)`` with
    ``u`` above A's last move (a maximum, since the wedge is finite). Among
    nodes meeting the slack rule the shallowest, then the first in tree order,
    is played, with the largest fixed index.
    """

    tree: Tree
    rho: dict
    trace: list = field(default_factory=list)
    advances_strictly = False

    def __post_init__(self):
        check_increasing(self.tree, self.rho)
        self.rho = {t: to_Z0(v) for t, v in self.rho.items()}
        self._fixed = {u: fixed_length(self.tree, self.rho, u) for u in self.tree.nodes}

    def best(self, u) -> tuple[Fraction, Ordinal | None]:
        return _sup_below(self.rho[u], self._fixed[u])

    def __call__(self, T, history):
        if not history:
            t0 = self.tree.roots()[0]
            self.trace.append(BMove(0, Fraction(0), Ordinal.of(0), t0, self.rho[t0].value(0)))
            return t0
        n = (len(history) + 1) // 2
        last = history[-1]
        cands = self.tree.wedge(last)
        r = max(self.best(u)[0] for u in cands)
        target = r - Fraction(1, 2 ** n)
        for u in sorted(cands, key=self.tree.index.get):
            val, a = self.best(u)
            if val <= target:
                continue
            if a is None:
                a = _index_above(self.rho[u], self._fixed[u], target)
                val = self.rho[u].value(a)
            mv = BMove(n, r, a, u, val)
            self.trace.append(mv)
            return u
        raise NoFixedPair(f"no fixed pair above {last!r} meets the slack rule; r = {r}",
                          witness={"node": str(last)})


def strategy_fixed_pair(tree: Tree, rho: dict) -> FixedPairStrategy:
    return FixedPairStrategy(tree, dict(rho))


# -- constancy wedges --------------------------------------------------------


def _constant_on_wedge(T: Tree, rho: dict, t) -> bool:
    return all(rho[v] == rho[t] for v in T.wedge(t))


@dataclass
class WedgeResult:
    node: object
    certified: bool
    detail: str = ""


def constancy_wedge(T: Tree | LazyTree, rho, depth_cap: int = 6) -> WedgeResult:
    """A node above which ``rho`` is constant; the shallowest one in tree order.

    For a generated tree ``rho`` is a callable and the search runs on the
    truncation at ``depth_cap``: leaves of the truncation always qualify, so
    such answers are reported as uncertified.
    """
    if isinstance(T, LazyTree):
        tt = T.truncate(depth_cap)
        vals = {t: rho(t) for t in tt.nodes}
        inner = [t for t in tt.nodes if tt.depth[t] < depth_cap]
        for t in inner:
            if _constant_on_wedge(tt, vals, t):
                return WedgeResult(t, False, f"constant up to depth {depth_cap}")
        return WedgeResult(None, False, f"undecided up to depth {depth_cap}")
    check_increasing(T, rho)
    for t in T.nodes:
        if _constant_on_wedge(T, rho, t):
            return WedgeResult(t, True, "exhaustive check of the wedge")
    raise AssertionError("a maximal node always has a constant wedge")  # pragma: no cover
