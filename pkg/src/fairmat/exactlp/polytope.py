"""The feasible-assignment polytope P and exact linear optimisation over it.

Variable ``i * m + e`` holds the probability that agent ``i`` receives item ``e``.
Matroid instances use an inequality description (rank rows per agent plus
column sums); everything else optimises over barycentric weights of the
deterministic assignments.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from ..domain import (
    Bundles,
    Instance,
    Lottery,
    Matrix,
    enumerate_assignments,
    full_mask,
    members,
    popcount,
)
from ..errors import LPInfeasible, NotAMatroid, check_subset_guard
from ..matroid import RankOracle
from .simplex import EQ, GE, LE, LinearProgram, LPResult, simplex

HREP, VREP = "H", "V"

Coeffs = Mapping[tuple[int, int], Fraction]
ExtraRow = tuple[Coeffs, str, Fraction]


@dataclass
class PolytopeP:
    inst: Instance
    representation: str
    rank_rows: list[tuple[int, int, int]] | None = None
    vertices: list[Bundles] | None = None
    maximal_only: bool = False

    @property
    def column_rows(self) -> int:
        return self.inst.m


def _hrep_rows(oracle: RankOracle, agent: int, compact: bool) -> list[tuple[int, int, int]]:
    m = oracle.m
    fam = oracle.family
    if not compact:
        check_subset_guard(m)
        return [(agent, X, oracle.rank(X)) for X in range(1, 1 << m)]
    rows = [(agent, 1 << e, 1) for e in range(m)]
    if fam.is_laminar:
        rows += [(agent, mask, cap) for mask, cap in fam.laminar_blocks()]
        return rows
    check_subset_guard(m)
    ground = full_mask(m)
    for X in range(1, 1 << m):
        r = oracle.rank(X)
        if r >= popcount(X):
            continue
        if any(oracle.rank(X | 1 << e) == r for e in members(ground & ~X)):
            continue
        rows.append((agent, X, r))
    return rows


def build_P(
    inst: Instance,
    representation: str | None = None,
    *,
    compact: bool = False,
    maximal_only: bool = False,
) -> PolytopeP:
    """Describe P either by rank inequalities (matroids) or by its vertex list.

    ``compact`` keeps only the non-redundant rank rows (block caps for laminar
    families, closed dependent sets otherwise). ``maximal_only`` lists only
    inclusion-maximal assignments, which is enough whenever the objective and
    the extra constraints are monotone in the assignment.
    """
    if representation is None:
        representation = HREP if inst.all_matroids() else VREP
    if representation == HREP:
        if not inst.all_matroids():
            raise NotAMatroid("inequality description requires matroid constraints")
        rows: list[tuple[int, int, int]] = []
        for i, fam in enumerate(inst.constraints):
            rows += _hrep_rows(RankOracle(fam), i, compact)
        return PolytopeP(inst, HREP, rank_rows=rows)
    verts = enumerate_assignments(inst, maximal_only=maximal_only)
    return PolytopeP(inst, VREP, vertices=verts, maximal_only=maximal_only)


def borda_weights(inst: Instance) -> Matrix:
    """w[i][e] = number of items agent i weakly ranks below e."""
    m = inst.m
    return tuple(tuple(Fraction(m - p.rank[e]) for e in range(m)) for p in inst.prefs)


def as_coeffs(obj, n: int, m: int) -> dict[tuple[int, int], Fraction]:
    if isinstance(obj, Mapping):
        return {k: Fraction(v) for k, v in obj.items() if v}
    return {(i, e): Fraction(obj[i][e]) for i in range(n) for e in range(m) if obj[i][e]}


def dominance_rows(inst: Instance, agent: int, target: Sequence[Fraction]) -> list[ExtraRow]:
    """Rows forcing agent's row to weakly sd-dominate ``target`` under her preference."""
    order = inst.prefs[agent].order
    rows = []
    acc = Fraction(0)
    for k, e in enumerate(order):
        acc += Fraction(target[e])
        rows.append(({(agent, f): Fraction(1) for f in order[: k + 1]}, GE, acc))
    return rows


def linear_value(coeffs: Coeffs, pi: Sequence[Sequence[Fraction]]) -> Fraction:
    return sum((c * pi[i][e] for (i, e), c in coeffs.items()), Fraction(0))


def vertex_value(coeffs: Coeffs, bundles: Bundles) -> Fraction:
    return sum((c for (i, e), c in coeffs.items() if bundles[i] >> e & 1), Fraction(0))


@dataclass
class OptimumOverP:
    pi: Matrix
    value: Fraction
    lottery: Lottery | None
    result: LPResult
    lp: LinearProgram


def optimize_over_P(
    inst: Instance,
    objective,
    extra: Iterable[ExtraRow] = (),
    *,
    sense: str = "max",
    P: PolytopeP | None = None,
) -> OptimumOverP:
    """Exact optimum of a linear objective over P intersected with ``extra`` rows.

    Raises ``LPInfeasible`` (carrying the LP and its Farkas certificate) when
    the extra rows cut P down to nothing.
    """
    n, m = inst.n, inst.m
    if P is None:
        P = build_P(inst, compact=True) if inst.all_matroids() else build_P(inst, VREP)
    obj = as_coeffs(objective, n, m)
    extra = [(as_coeffs(c, n, m), rel, Fraction(rhs)) for c, rel, rhs in extra]
    if P.representation == HREP:
        lp = LinearProgram(n * m, {i * m + e: c for (i, e), c in obj.items()}, sense)
        for i, X, r in P.rank_rows:
            lp.add({i * m + e: 1 for e in members(X)}, LE, r, f"rank[{i}]")
        for e in range(m):
            lp.add({i * m + e: 1 for i in range(n)}, LE, 1, f"column[{e}]")
        for c, rel, rhs in extra:
            lp.add({i * m + e: v for (i, e), v in c.items()}, rel, rhs, "extra")
        res = simplex(lp)
        if res.status != "optimal":
            raise LPInfeasible(f"optimisation over P is {res.status}", lp, res)
        pi = tuple(tuple(res.x[i * m + e] for e in range(m)) for i in range(n))
        return OptimumOverP(pi, res.value, None, res, lp)
    verts = P.vertices
    lp = LinearProgram(len(verts), sense=sense)
    lp.objective = {k: v for k, b in enumerate(verts) if (v := vertex_value(obj, b))}
    lp.add({k: 1 for k in range(len(verts))}, EQ, 1, "convexity")
    for c, rel, rhs in extra:
        lp.add({k: v for k, b in enumerate(verts) if (v := vertex_value(c, b))}, rel, rhs, "extra")
    res = simplex(lp)
    if res.status != "optimal":
        raise LPInfeasible(f"optimisation over P is {res.status}", lp, res)
    lottery = Lottery.from_pairs((res.x[k], verts[k]) for k in range(len(verts)))
    pi = [[Fraction(0)] * m for _ in range(n)]
    for p, bundles in lottery.support:
        for i, b in enumerate(bundles):
            for e in members(b):
                pi[i][e] += p
    return OptimumOverP(tuple(tuple(r) for r in pi), res.value, lottery, res, lp)
