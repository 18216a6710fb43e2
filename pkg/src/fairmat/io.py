"""JSON formats for instances and for what mechanisms return.

Rationals are written as ``"p/q"`` strings (integers as plain ``"p"``) and
read back from strings or JSON numbers.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any

from .domain import (
    BUDGET,
    EXPLICIT,
    FREE,
    PARTITION,
    UNIFORM,
    ConstraintFamily,
    Instance,
    Lottery,
    Matrix,
    members,
)


def rat(v) -> Fraction:
    if isinstance(v, bool):
        raise ValueError("booleans are not rationals")
    if isinstance(v, float):
        return Fraction(str(v))
    return Fraction(v)


def rat_str(v) -> str:
    return str(Fraction(v))


def family_to_json(fam: ConstraintFamily, labels) -> dict:
    names = lambda mask: [labels[e] for e in members(mask)]  # noqa: E731
    if fam.kind == FREE:
        return {"kind": "free"}
    if fam.kind == UNIFORM:
        return {"kind": "uniform", "cap": fam.capacity}
    if fam.kind == PARTITION:
        return {"kind": "partition", "blocks": [{"items": names(b), "cap": c} for b, c in fam.blocks]}
    if fam.kind == BUDGET:
        return {"kind": "budget", "weights": {labels[e]: w for e, w in enumerate(fam.weights)},
                "budget": rat_str(fam.budget)}
    if fam.kind == EXPLICIT:
        return {"kind": "explicit", "maximal": [names(s) for s in fam.maximal]}
    raise ValueError(f"unknown family kind {fam.kind!r}")


def family_from_json(obj: dict, labels) -> ConstraintFamily:
    index = {lab: k for k, lab in enumerate(labels)}
    m = len(labels)
    kind = obj.get("kind")
    if kind == "free":
        return ConstraintFamily.free(m)
    if kind == "uniform":
        return ConstraintFamily.uniform(m, int(obj["cap"]))
    if kind == "partition":
        return ConstraintFamily.partition(m, [([index[x] for x in b["items"]], int(b["cap"])) for b in obj["blocks"]])
    if kind == "budget":
        w = obj["weights"]
        weights = [w[lab] for lab in labels] if isinstance(w, dict) else list(w)
        return ConstraintFamily.budget_family(weights, rat(obj["budget"]))
    if kind == "explicit":
        return ConstraintFamily.explicit(m, [[index[x] for x in s] for s in obj["maximal"]])
    raise ValueError(f"unknown family kind {kind!r}")


def instance_to_json(inst: Instance) -> dict:
    labels = inst.labels
    return {
        "agents": inst.n,
        "items": list(labels),
        "prefs": [[labels[e] for e in p.order] for p in inst.prefs],
        "constraints": [family_to_json(f, labels) for f in inst.constraints],
    }


def instance_from_json(obj: dict) -> Instance:
    labels = [str(x) for x in obj["items"]]
    if len(set(labels)) != len(labels):
        raise ValueError("item labels must be unique")
    prefs = obj["prefs"]
    cons = [family_from_json(c, labels) for c in obj["constraints"]]
    n = int(obj.get("agents", len(prefs)))
    if len(prefs) != n or len(cons) != n:
        raise ValueError("need one preference list and one constraint family per agent")
    for p in prefs:
        if sorted(p) != sorted(labels):
            raise ValueError("each preference must list every item exactly once")
    return Instance.build(labels, prefs, cons)


def matrix_to_json(pi: Matrix) -> dict:
    return {"pi": [[rat_str(v) for v in row] for row in pi]}


def matrix_from_json(obj) -> Matrix:
    rows = obj["pi"] if isinstance(obj, dict) else obj
    return tuple(tuple(rat(v) for v in row) for row in rows)


def lottery_to_json(lottery: Lottery, labels) -> dict:
    return {"support": [{"p": rat_str(p), "bundles": [[labels[e] for e in members(b)] for b in bundles]}
                        for p, bundles in lottery.support]}


def lottery_from_json(obj: dict, labels) -> Lottery:
    index = {lab: k for k, lab in enumerate(labels)}
    pairs = []
    for entry in obj["support"]:
        bundles = tuple(sum(1 << index[x] for x in b) for b in entry["bundles"])
        pairs.append((rat(entry["p"]), bundles))
    return Lottery(tuple(pairs))


def load_json(path) -> Any:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def dump_json(obj, path=None) -> str:
    text = json.dumps(obj, indent=2, sort_keys=False)
    if path is not None:
        Path(path).write_text(text + "\n", encoding="utf-8")
    return text


def load_instance(path) -> Instance:
    return instance_from_json(load_json(path))
