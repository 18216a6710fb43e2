"""Certificates: a kind tag plus a JSON-ready payload with exact rationals as strings."""

from __future__ import annotations

import json
from dataclasses import dataclass

from ..domain import Instance, Lottery, Matrix
from ..exactlp.simplex import LinearProgram
from ..io import instance_to_json, lottery_to_json, rat_str
from . import checkers

DECOMPOSITION = "Decomposition"
DOMINATING_POINT = "DominatingPoint"
ENVY_WITNESS = "EnvyWitness"
LP_INFEASIBILITY = "LPInfeasibility"
SUPPORT_RESTRICTION = "SupportRestriction"
KINDS = (DECOMPOSITION, DOMINATING_POINT, ENVY_WITNESS, LP_INFEASIBILITY, SUPPORT_RESTRICTION)


@dataclass(frozen=True)
class Certificate:
    kind: str
    payload: dict

    def to_json(self) -> dict:
        return {"kind": self.kind, "payload": self.payload}

    @classmethod
    def from_json(cls, obj: dict) -> "Certificate":
        if obj.get("kind") not in KINDS:
            raise ValueError(f"unknown certificate kind {obj.get('kind')!r}")
        return cls(obj["kind"], obj["payload"])

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


def check_certificate(cert: Certificate) -> tuple[bool, str]:
    """Re-verify a certificate from its payload alone."""
    try:
        return checkers.check(cert.kind, cert.payload)
    except (KeyError, ValueError, TypeError, IndexError) as exc:
        return False, f"malformed payload: {exc}"


def _mat(pi: Matrix) -> list[list[str]]:
    return [[rat_str(v) for v in row] for row in pi]


def decomposition_certificate(inst: Instance, pi: Matrix, lottery: Lottery) -> Certificate:
    return Certificate(DECOMPOSITION, {
        "instance": instance_to_json(inst),
        "pi": _mat(pi),
        "lottery": lottery_to_json(lottery, inst.labels),
        "max_support": inst.n * inst.m + 1,
    })


def dominating_point_certificate(inst: Instance, pi: Matrix, dominator: Matrix, lottery: Lottery) -> Certificate:
    return Certificate(DOMINATING_POINT, {
        "instance": instance_to_json(inst),
        "pi": _mat(pi),
        "dominator": _mat(dominator),
        "lottery": lottery_to_json(lottery, inst.labels),
    })


def envy_witness_certificate(inst: Instance, envier: int, envied: int, item: int,
                             lottery: Lottery | None = None, pi: Matrix | None = None) -> Certificate:
    payload = {"instance": instance_to_json(inst), "envier": envier, "envied": envied,
               "item": inst.labels[item]}
    if lottery is not None:
        payload["lottery"] = lottery_to_json(lottery, inst.labels)
    else:
        payload["pi"] = _mat(pi)
    return Certificate(ENVY_WITNESS, payload)


def hyperplane_certificate(inst: Instance, pi: Matrix, z, z0) -> Certificate:
    return Certificate(LP_INFEASIBILITY, {
        "form": "hyperplane",
        "instance": instance_to_json(inst),
        "pi": _mat(pi),
        "z": _mat(z),
        "z0": rat_str(z0),
    })


def lp_rows_json(lp: LinearProgram) -> list[dict]:
    return [{"label": c.label, "coeffs": {str(j): rat_str(v) for j, v in c.coeffs.items()},
             "rel": c.rel, "rhs": rat_str(c.rhs)} for c in lp.constraints]


def farkas_certificate(lp: LinearProgram, y) -> Certificate:
    return Certificate(LP_INFEASIBILITY, {
        "form": "farkas",
        "num_vars": lp.num_vars,
        "rows": lp_rows_json(lp),
        "multipliers": [rat_str(v) for v in y],
    })

