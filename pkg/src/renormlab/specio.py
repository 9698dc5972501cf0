"""Input files: trees and norms as JSON, sequences as text.

Tree file::

    {"nodes": [{"id": "a", "parent": null, "value": "-1"}, {"id": "b", "parent": "a"}],
     "families": [{"node": "a", "members": ["b"], "tail": {...}}]}

``value`` is optional (a real number or a sequence in text form) and feeds
the plateau, bad-point and game commands. Norm file::

    {"kind": "weighted_sup", "weights": {"a": 1, "b": 0.5}, "epsilon": "1/2",
     "lattice": true, "gateaux": false}

Sequences: ``0,1/2,1`` (a duplicated last value marks the repeat) or
``blocks=[{head:[],term:"1-(1/2)^i",limit:1}];tail=[1];repeat=false``.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .errors import ExpressionError, ParseError, ValidationError
from .ordinals import parse_ordinal
from .renorm.norms import NormModel, check_norm, quadratic_norm, scaled_lp, sup_norm, weighted_sup
from .trees.badpoints import SuccessorFamily
from .trees.core import Tree
from .zorder import expr as E
from .zorder.family import ZFamily, ZRule
from .zorder.seq import OmegaBlock, ZSeq, require_valid


def parse_q(v, where: str = "value") -> Fraction:
    """Rational from an int, a decimal literal or a ``"p/q"`` string."""
    if isinstance(v, bool):
        raise ParseError(f"{where}: expected a number, got {v!r}")
    try:
        if isinstance(v, float):
            return Fraction(str(v))
        return Fraction(str(v).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"{where}: not a rational number: {v!r}") from exc


# -- sequences ----------------------------------------------------------------

_BLOCK = re.compile(r'\{head:\[([^\]]*)\],term:"([^"]*)",limit:([^}]*)\}')
_LONG = re.compile(r"^blocks=\[(.*)\];tail=\[([^\]]*)\];repeat=(true|false)$")


def _qlist(text: str, where: str) -> list[Fraction]:
    text = text.strip()
    return [parse_q(p, where) for p in text.split(",")] if text else []


def parse_zseq(text, validate: bool = True) -> ZSeq:
    if isinstance(text, dict):
        return zseq_from_json(text, validate)
    s = "".join(str(text).split())
    if not s:
        raise ParseError("empty sequence")
    m = _LONG.match(s)
    try:
        if m is None:
            if "blocks" in s:
                raise ParseError(f"cannot parse sequence {s!r}")
            x = ZSeq.of(*_qlist(s, "sequence"))
        else:
            blocks = []
            rest = m.group(1)
            for bm in _BLOCK.finditer(rest):
                blocks.append(OmegaBlock(bm.group(2), parse_q(bm.group(3), "limit"),
                                         tuple(_qlist(bm.group(1), "head"))))
            if len(blocks) != rest.count("{"):
                raise ParseError(f"malformed block list {rest!r}")
            x = ZSeq(tuple(blocks), tuple(_qlist(m.group(2), "tail")), m.group(3) == "true")
    except ExpressionError as exc:
        raise ParseError(f"block term: {exc}") from exc
    return require_valid(x) if validate else x


def zseq_from_json(d: dict, validate: bool = True) -> ZSeq:
    try:
        blocks = tuple(OmegaBlock(b["term"], parse_q(b["limit"], "limit"),
                                  tuple(parse_q(v, "head") for v in b.get("head", ())))
                       for b in d.get("blocks", ()))
        x = ZSeq(blocks, tuple(parse_q(v, "tail") for v in d["tail"]), bool(d.get("repeat", False)))
    except KeyError as exc:
        raise ParseError(f"sequence: missing field {exc}") from exc
    return require_valid(x) if validate else x


# -- families -------------------------------------------------------------------


def parse_family(d: dict) -> ZFamily:
    """``{"members": [...], "rule": {"base", "position", "deviation", "extras", "grows", "start"}}``."""
    members = tuple(parse_zseq(m) for m in d.get("members", ()))
    rule = None
    if d.get("rule") is not None:
        r = d["rule"]
        try:
            rule = ZRule(
                parse_zseq(r["base"]),
                parse_ordinal(str(r.get("position", "0"))),
                None if r.get("deviation") is None else E.parse_expr(r["deviation"]),
                tuple(E.parse_expr(e) for e in r.get("extras", ())),
                bool(r.get("grows", False)),
                int(r.get("start", 0)),
            )
        except KeyError as exc:
            raise ParseError(f"family rule: missing field {exc}") from exc
        except ExpressionError as exc:
            raise ParseError(f"family rule: {exc}") from exc
    return ZFamily(members, rule)


# -- trees --------------------------------------------------------------------


@dataclass
class TreeSpec:
    tree: Tree
    values: dict = field(default_factory=dict)
    families: list = field(default_factory=list)

    @property
    def z_valued(self) -> bool:
        return any(isinstance(v, ZSeq) for v in self.values.values())


def _value(v, where: str):
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return parse_q(v, where)
    if isinstance(v, dict):
        return zseq_from_json(v)
    return parse_zseq(v)


def parse_tree(d: dict) -> TreeSpec:
    if "nodes" in d:
        parent, order, values = {}, [], {}
        for k, n in enumerate(d["nodes"]):
            if "id" not in n:
                raise ParseError(f"nodes[{k}]: missing field 'id'")
            t = n["id"]
            if t in parent:
                raise ValidationError(f"duplicate node {t!r}")
            parent[t] = n.get("parent")
            order.append(t)
            if "value" in n:
                values[t] = _value(n["value"], f"nodes[{k}].value")
    elif "parent" in d:
        parent = dict(d["parent"])
        order = list(parent)
        values = {t: _value(v, f"values.{t}") for t, v in d.get("values", {}).items()}
    else:
        raise ParseError("tree spec needs a 'nodes' list or a 'parent' map")
    tree = Tree(parent, order)
    if values and set(values) != set(parent):
        raise ValidationError(f"values missing for nodes {sorted(set(parent) - set(values), key=str)}")
    fams = []
    for k, f in enumerate(d.get("families", ())):
        if "node" not in f:
            raise ParseError(f"families[{k}]: missing field 'node'")
        tail = f.get("tail")
        if isinstance(tail, str):
            tail = E.parse_expr(tail)
        elif isinstance(tail, dict):
            tail = parse_family(tail)
        fams.append(SuccessorFamily(f["node"], tuple(f.get("members", ())), tail, int(f.get("start", 1))))
    for fam in fams:
        fam.check(tree)
    return TreeSpec(tree, values, fams)


# -- norms --------------------------------------------------------------------


def parse_norm(d: dict, tree: Tree | None = None) -> NormModel:
    if "kind" not in d:
        raise ParseError("norm spec: missing field 'kind'")
    if "epsilon" not in d:
        raise ParseError("norm spec: missing field 'epsilon'")
    kind, eps = d["kind"], parse_q(d["epsilon"], "epsilon")
    if not 0 < eps < 1:
        raise ValidationError(f"sandwich range: epsilon must lie in (0, 1), got {eps}")
    if kind == "sup":
        norm = sup_norm(eps)
    elif kind == "weighted_sup":
        if "weights" not in d:
            raise ParseError("norm spec: missing field 'weights'")
        norm = weighted_sup({k: parse_q(v, f"weights.{k}") for k, v in d["weights"].items()}, eps)
    elif kind == "scaled_lp":
        p = float(d.get("p", 2))
        scale = d.get("scale")
        scale = float(len(tree) ** (-1 / p)) if scale is None and tree is not None else float(eval_scale(scale))
        norm = scaled_lp(p, scale, eps)
    elif kind == "quadratic":
        if "matrix" not in d:
            raise ParseError("norm spec: missing field 'matrix'")
        norm = quadratic_norm(np.array(d["matrix"], dtype=float), float(eval_scale(d.get("scale", 1))), eps)
    else:
        raise ValidationError(f"unknown norm kind {kind!r}")
    for flag in ("lattice", "gateaux"):
        if flag in d and bool(d[flag]) != getattr(norm, flag):
            raise ValidationError(f"norm spec declares {flag}={d[flag]} but a {kind} norm has "
                                  f"{flag}={getattr(norm, flag)}")
    if tree is not None:
        check_norm(norm, tree)
    return norm


def eval_scale(v) -> float:
    """Scale factors may be numbers or ``"1/sqrt(n)"``-style strings."""
    if v is None:
        raise ParseError("norm spec: missing field 'scale'")
    if isinstance(v, (int, float)):
        return float(v)
    m = re.fullmatch(r"1/sqrt\((\d+)\)", str(v).replace(" ", ""))
    if m:
        return float(int(m.group(1)) ** -0.5)
    return float(parse_q(v, "scale"))


# -- files --------------------------------------------------------------------


def load_json(path) -> dict:
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc


def parse_spec(path, tree: Tree | None = None):
    """Load a tree spec, a norm or a sequence depending on the file's content."""
    p = Path(path)
    if not p.exists():
        raise ParseError(f"{path}: no such file")
    text = p.read_text().strip()
    if not text.startswith("{"):
        return parse_zseq(text)
    d = load_json(p)
    if "kind" in d:
        return parse_norm(d, tree)
    if "tail" in d:
        return zseq_from_json(d)
    return parse_tree(d)
