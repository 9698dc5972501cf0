"""Deterministic JSON reports (schema 1).

Rationals are written as ``"p/q"`` strings and sequences in their text
form. Numbers carry a mode: ``{"exact": "3/2"}`` for rational results and
``{"numeric": 0.7071, "tol": 1e-09}`` for solver output.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .ordinals import Ordinal, format_ordinal
from .zorder.seq import ZSeq, fmt_q, format_zseq

SCHEMA = 1


def exact(v) -> dict:
    return {"exact": fmt_q(v)}


def numeric(v, tol: float) -> dict:
    return {"numeric": _float(v), "tol": tol}


def tagged(v, is_exact: bool, tol: float) -> dict:
    return exact(v) if is_exact else numeric(v, tol)


def _float(v) -> float | str:
    v = float(v)
    if math.isinf(v) or math.isnan(v):
        return str(v)
    return float(f"{v:.15g}")


def jsonable(obj):
    if isinstance(obj, bool) or obj is None or isinstance(obj, (str, int)):
        return obj
    if isinstance(obj, Fraction):
        return fmt_q(obj)
    if isinstance(obj, float):
        return _float(obj)
    if isinstance(obj, ZSeq):
        return format_zseq(obj)
    if isinstance(obj, Ordinal):
        return format_ordinal(obj)
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = [jsonable(v) for v in obj]
        return sorted(items, key=str) if isinstance(obj, (set, frozenset)) else items
    if hasattr(obj, "to_json"):
        return jsonable(obj.to_json())
    return str(obj)


@dataclass
class Report:
    command: str
    inputs: dict = field(default_factory=dict)
    seed: int | None = None
    results: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)

    def check(self, name: str, ok: bool, detail: str = "", expected_failure: bool = False):
        self.checks.append({"name": name, "ok": bool(ok), "detail": detail,
                            **({"expected_failure": True} if expected_failure else {})})

    @property
    def ok(self) -> bool:
        return all(c["ok"] for c in self.checks)

    @property
    def failures(self) -> list:
        return [c for c in self.checks if not c["ok"]]

    def to_json(self) -> dict:
        return {"schema": SCHEMA, "command": self.command, "inputs": jsonable(self.inputs), "seed": self.seed,
                "results": jsonable(self.results), "checks": jsonable(self.checks), "ok": self.ok,
                "failures": [c["name"] for c in self.failures]}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2) + "\n"
