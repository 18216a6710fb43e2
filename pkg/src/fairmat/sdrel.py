"""Stochastic-dominance comparisons and the fairness/efficiency predicates."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import NamedTuple, Sequence

from .domain import Instance, Lottery, Matrix, Preference, induced_fractional
from .errors import ConstraintsNotIdentical, NotAMatroid
from .exactlp.polytope import (
    VREP,
    PolytopeP,
    as_coeffs,
    borda_weights,
    build_P,
    dominance_rows,
    linear_value,
    optimize_over_P,
)
from .matroid import RankOracle, choice, max_feasible_size


class Relation(str, Enum):
    STRICTLY_DOMINATES = "strictly-dominates"
    EQUAL = "equal"
    DOMINATED_STRICTLY = "dominated-strictly"
    INCOMPARABLE = "incomparable"


@dataclass(frozen=True)
class DominanceVerdict:
    relation: Relation
    witness: int | None = None

    @property
    def weakly_dominates(self) -> bool:
        return self.relation in (Relation.STRICTLY_DOMINATES, Relation.EQUAL)


def upper_set(pref: Preference, e: int) -> int:
    """Items the preference ranks at least as high as ``e``."""
    return pref.prefix(pref.rank[e] + 1)


def cumulative(pref: Preference, x: Sequence) -> list[Fraction]:
    out, acc = [], Fraction(0)
    for e in pref.order:
        acc += Fraction(x[e])
        out.append(acc)
    return out


def sd_compare(pref: Preference, x: Sequence, y: Sequence) -> DominanceVerdict:
    """Compare ``x`` against ``y`` through every prefix sum of ``pref``.

    The witness is the first item whose prefix sum is strictly larger (for
    dominance) or strictly smaller (for the other outcomes).
    """
    first_gt = first_lt = None
    for e, cx, cy in zip(pref.order, cumulative(pref, x), cumulative(pref, y)):
        if cx > cy and first_gt is None:
            first_gt = e
        elif cx < cy and first_lt is None:
            first_lt = e
    if first_gt is None and first_lt is None:
        return DominanceVerdict(Relation.EQUAL)
    if first_lt is None:
        return DominanceVerdict(Relation.STRICTLY_DOMINATES, first_gt)
    if first_gt is None:
        return DominanceVerdict(Relation.DOMINATED_STRICTLY, first_lt)
    return DominanceVerdict(Relation.INCOMPARABLE, first_lt)


@dataclass(frozen=True)
class PairEnvy:
    satisfied: bool
    witness: int | None = None
    lhs: Fraction | None = None
    rhs: Fraction | None = None


@dataclass
class EnvyReport:
    pairs: dict[tuple[int, int], PairEnvy] = field(default_factory=dict)

    @property
    def satisfied(self) -> bool:
        return all(p.satisfied for p in self.pairs.values())

    def violations(self) -> list[tuple[int, int]]:
        return sorted(k for k, p in self.pairs.items() if not p.satisfied)

    def __bool__(self) -> bool:
        return self.satisfied


def is_sd_envy_free(inst: Instance, lottery: Lottery) -> EnvyReport:
    """Exact lottery-level envy test against the best sub-bundle agent i could use.

    For agent i looking at j's realised bundle, the best count of items in
    U(i, e) is the largest feasible subset of ``X_j & U`` under i's family.
    """
    pi = induced_fractional(lottery, inst.m)
    report = EnvyReport()
    for i in range(inst.n):
        pref, fam = inst.prefs[i], inst.constraints[i]
        own = cumulative(pref, pi[i])
        for j in range(inst.n):
            if i == j:
                continue
            verdict = PairEnvy(True)
            for k, e in enumerate(pref.order):
                U = pref.prefix(k + 1)
                rhs = sum((p * max_feasible_size(fam, bundles[j] & U) for p, bundles in lottery.support),
                          Fraction(0))
                if own[k] < rhs:
                    verdict = PairEnvy(False, e, own[k], rhs)
                    break
            report.pairs[(i, j)] = verdict
    return report


def is_sd_envy_free_fractional(inst: Instance, pi: Matrix) -> EnvyReport:
    """Row-wise test, valid when every agent has the same family."""
    if not inst.identical_constraints():
        raise ConstraintsNotIdentical("row-wise envy test needs identical constraint families")
    report = EnvyReport()
    for i in range(inst.n):
        for j in range(inst.n):
            if i == j:
                continue
            v = sd_compare(inst.prefs[i], pi[i], pi[j])
            if v.weakly_dominates:
                report.pairs[(i, j)] = PairEnvy(True)
            else:
                k = inst.prefs[i].rank[v.witness]
                report.pairs[(i, j)] = PairEnvy(
                    False, v.witness, cumulative(inst.prefs[i], pi[i])[k], cumulative(inst.prefs[i], pi[j])[k]
                )
    return report


def _require_matroids(inst: Instance) -> list[RankOracle]:
    if not inst.all_matroids():
        raise NotAMatroid("predicate requires matroid constraints")
    return [RankOracle(f) for f in inst.constraints]


def ef_sufficient_matroid(inst: Instance, pi: Matrix) -> dict[tuple[int, int], bool]:
    """Per ordered pair: does row i weakly dominate i's choice from row j?"""
    oracles = _require_matroids(inst)
    out = {}
    for i in range(inst.n):
        for j in range(inst.n):
            if i != j:
                best = choice(oracles[i], inst.prefs[i], pi[j])
                out[(i, j)] = sd_compare(inst.prefs[i], pi[i], best).weakly_dominates
    return out


def sd_proportional_agents(inst: Instance, pi: Matrix) -> list[bool]:
    oracles = _require_matroids(inst)
    half = [Fraction(1, 2)] * inst.m
    return [
        sd_compare(inst.prefs[i], pi[i], choice(oracles[i], inst.prefs[i], half)).weakly_dominates
        for i in range(inst.n)
    ]


def is_sd_proportional(inst: Instance, pi: Matrix) -> bool:
    return all(sd_proportional_agents(inst, pi))


class EfficiencyVerdict(NamedTuple):
    efficient: bool
    witness: Matrix | None


def efficiency_polytope(inst: Instance) -> PolytopeP:
    """Polytope used by the efficiency LP; maximal assignments suffice in vertex form."""
    if inst.all_matroids():
        return build_P(inst, compact=True)
    return build_P(inst, VREP, maximal_only=True)


def is_sd_efficient(inst: Instance, pi: Matrix, weights=None, P: PolytopeP | None = None) -> EfficiencyVerdict:
    """Maximise a strictly order-consistent welfare over points that weakly sd-dominate ``pi``.

    Any such point other than ``pi`` has strictly larger welfare, so ``pi`` is
    sd-efficient exactly when the optimum equals its own welfare. Otherwise
    the optimiser is returned as a dominating witness.
    """
    w = as_coeffs(weights if weights is not None else borda_weights(inst), inst.n, inst.m)
    extra = []
    for i in range(inst.n):
        extra += dominance_rows(inst, i, pi[i])
    opt = optimize_over_P(inst, w, extra, P=P if P is not None else efficiency_polytope(inst))
    if opt.value > linear_value(w, pi):
        return EfficiencyVerdict(False, opt.pi)
    return EfficiencyVerdict(True, None)
