"""Feasibility, decomposition, brute-force search and the LP-based choice oracle."""

from __future__ import annotations

import random
from fractions import Fraction
from typing import NamedTuple

from ..domain import (
    Instance,
    Lottery,
    Matrix,
    Preference,
    as_matrix,
    enumerate_assignments,
    full_mask,
    induced_fractional,
    mask_of,
    members,
    popcount,
)
from ..errors import InfeasiblePoint, LPInfeasible, subset_guard
from ..exactlp.polytope import as_coeffs, borda_weights, build_P, vertex_value
from ..exactlp.simplex import EQ, GE, LE, LinearProgram, simplex
from ..matroid import RankOracle, max_feasible_size
from ..sdrel import efficiency_polytope, is_sd_efficient, is_sd_envy_free
from .certificates import (
    Certificate,
    decomposition_certificate,
    envy_witness_certificate,
    hyperplane_certificate,
)


class FeasibilityVerdict(NamedTuple):
    feasible: bool
    certificate: Certificate


def _shape(inst: Instance, pi) -> Matrix:
    pi = as_matrix(pi)
    if len(pi) != inst.n or any(len(row) != inst.m for row in pi):
        raise ValueError(f"expected a {inst.n} x {inst.m} matrix")
    return pi


def _cut(inst: Instance, pi: Matrix):
    """A violated valid inequality z . v + z0 >= 0, found without any LP, or None."""
    n, m = inst.n, inst.m

    def z_of(cells, sign):
        z = [[Fraction(0)] * m for _ in range(n)]
        for i, e in cells:
            z[i][e] = Fraction(sign)
        return z

    for i in range(n):
        for e in range(m):
            if pi[i][e] < 0:
                return z_of([(i, e)], 1), Fraction(0)
    for e in range(m):
        if sum(pi[i][e] for i in range(n)) > 1:
            return z_of([(i, e) for i in range(n)], -1), Fraction(1)
    if inst.all_matroids():
        for i, X, r in build_P(inst, compact=True).rank_rows:
            if sum(pi[i][e] for e in members(X)) > r:
                return z_of([(i, e) for e in members(X)], -1), Fraction(r)
    elif m <= min(12, subset_guard()):
        for i, fam in enumerate(inst.constraints):
            for X in range(1, 1 << m):
                r = max_feasible_size(fam, X)
                if sum(pi[i][e] for e in members(X)) > r:
                    return z_of([(i, e) for e in members(X)], -1), Fraction(r)
    return None


def _support_candidates(inst: Instance, pi: Matrix) -> list:
    """Assignments that can appear in any lottery inducing ``pi``."""
    n, m = inst.n, inst.m
    allowed = [mask_of(e for e in range(m) if pi[i][e] > 0) for i in range(n)]
    required = [mask_of(e for e in range(m) if pi[i][e] == 1) for i in range(n)]
    covered = mask_of(e for e in range(m) if sum(pi[i][e] for i in range(n)) == 1)
    verts = enumerate_assignments(inst, allowed=allowed, required=required, covered=covered)
    if inst.all_matroids():
        tight = [(i, X, r) for i, X, r in build_P(inst, compact=True).rank_rows
                 if sum(pi[i][e] for e in members(X)) == r]
        verts = [v for v in verts if all(popcount(v[i] & X) == r for i, X, r in tight)]
    return verts


def _marginal_lp(inst: Instance, pi: Matrix, verts: list, all_cells: bool) -> LinearProgram:
    n, m = inst.n, inst.m
    lp = LinearProgram(len(verts))
    for i in range(n):
        for e in range(m):
            if all_cells or pi[i][e] != 0:
                bit = 1 << e
                lp.add({k: 1 for k, v in enumerate(verts) if v[i] & bit}, EQ, pi[i][e], f"cell {i} {e}")
    lp.add({k: 1 for k in range(len(verts))}, EQ, 1, "sum")
    return lp


def decompose(inst: Instance, pi) -> Lottery:
    """Exact lottery inducing ``pi`` with at most n*m + 1 assignments.

    The LP has one equality per positive cell plus the probability sum, so any
    basic solution has at most that many positive weights.
    """
    pi = _shape(inst, pi)
    if _cut(inst, pi) is not None:
        raise InfeasiblePoint("matrix violates a valid inequality of P")
    verts = _support_candidates(inst, pi)
    if not verts:
        raise InfeasiblePoint("no assignment is compatible with the matrix")
    res = simplex(_marginal_lp(inst, pi, verts, all_cells=False))
    if not res.optimal:
        raise InfeasiblePoint("matrix is not a mixture of feasible assignments")
    lottery = Lottery.from_pairs((res.x[k], verts[k]) for k in range(len(verts)))
    assert induced_fractional(lottery, inst.m) == pi
    return lottery


def check_feasible(inst: Instance, pi) -> FeasibilityVerdict:
    """Decide membership in P; the certificate is a decomposition or a separating hyperplane."""
    pi = _shape(inst, pi)
    cut = _cut(inst, pi)
    if cut is not None:
        return FeasibilityVerdict(False, hyperplane_certificate(inst, pi, *cut))
    try:
        lottery = decompose(inst, pi)
        return FeasibilityVerdict(True, decomposition_certificate(inst, pi, lottery))
    except InfeasiblePoint:
        pass
    verts = enumerate_assignments(inst)
    lp = _marginal_lp(inst, pi, verts, all_cells=True)
    res = simplex(lp)
    if res.optimal:  # pragma: no cover - the filtered LP is exact
        lottery = Lottery.from_pairs((res.x[k], verts[k]) for k in range(len(verts)))
        return FeasibilityVerdict(True, decomposition_certificate(inst, pi, lottery))
    y = res.certificate
    n, m = inst.n, inst.m
    z = [[y[i * m + e] for e in range(m)] for i in range(n)]
    return FeasibilityVerdict(False, hyperplane_certificate(inst, pi, z, y[n * m]))


def envy_witness(inst: Instance, lottery: Lottery) -> Certificate | None:
    report = is_sd_envy_free(inst, lottery)
    bad = report.violations()
    if not bad:
        return None
    i, j = bad[0]
    return envy_witness_certificate(inst, i, j, report.pairs[(i, j)].witness, lottery=lottery)


def lottery_envy_lp(inst: Instance, columns: list, objective=None) -> LinearProgram:
    """Lottery weights over ``columns`` meeting every sd-envy-freeness row.

    Row ``envy i j k``: agent i's expected share of her top k+1 items is at
    least the expected size of the best subset of j's bundle among them that
    i's family allows.
    """
    lp = LinearProgram(len(columns))
    if objective is not None:
        lp.objective = {k: v for k, v in enumerate(objective) if v}
    lp.add({k: 1 for k in range(len(columns))}, EQ, 1, "sum")
    for i in range(inst.n):
        fam, pref = inst.constraints[i], inst.prefs[i]
        for j in range(inst.n):
            if i == j:
                continue
            for k in range(inst.m):
                U = pref.prefix(k + 1)
                row = {c: popcount(b[i] & U) - max_feasible_size(fam, b[j] & U) for c, b in enumerate(columns)}
                lp.add(row, GE, 0, f"envy {i} {j} {k}")
    return lp


def random_consistent_weights(inst: Instance, rng: random.Random) -> Matrix:
    """Random weights strictly decreasing along each agent's preference."""
    rows = []
    for p in inst.prefs:
        w = [Fraction(0)] * inst.m
        acc = Fraction(0)
        for e in reversed(p.order):
            acc += rng.randint(1, 10)
            w[e] = acc
        rows.append(tuple(w))
    return tuple(rows)


def brute_force_search(inst: Instance, attempts: int = 16, seed: int = 0) -> Lottery | None:
    """Look for an sd-efficient and sd-envy-free lottery; None means none was found.

    Lotteries range over the inclusion-maximal assignments (an efficient
    lottery never uses any other). Each attempt maximises a strictly
    order-consistent welfare over the envy-free lotteries and keeps the result
    if it passes the exact efficiency test. Borda weights go first.
    """
    columns = enumerate_assignments(inst, maximal_only=True)
    rng = random.Random(seed)
    P = None
    for t in range(attempts):
        w = borda_weights(inst) if t == 0 else random_consistent_weights(inst, rng)
        coeffs = as_coeffs(w, inst.n, inst.m)
        lp = lottery_envy_lp(inst, columns, [vertex_value(coeffs, b) for b in columns])
        res = simplex(lp)
        if not res.optimal:
            return None
        lottery = Lottery.from_pairs((res.x[k], columns[k]) for k in range(len(columns)))
        pi = induced_fractional(lottery, inst.m)
        if P is None:
            P = efficiency_polytope(inst)
        if is_sd_efficient(inst, pi, P=P).efficient and is_sd_envy_free(inst, lottery).satisfied:
            return lottery
    return None


def choice_oracle_lex_lp(oracle: RankOracle, pref: Preference, x) -> tuple[Fraction, ...]:
    """Lexicographic maximum over {0 <= y <= x, y(X) <= r(X) for all X}, one exact LP per item."""
    m = oracle.m
    x = [Fraction(v) for v in x]
    base = LinearProgram(m)
    for e in range(m):
        base.add({e: 1}, LE, x[e], f"box {e}")
    for X in range(1, full_mask(m) + 1):
        base.add({e: 1 for e in members(X)}, LE, oracle.rank(X), f"rank {X}")
    fixed: dict[int, Fraction] = {}
    for e in pref.order:
        lp = LinearProgram(m, {e: Fraction(1)}, "max", list(base.constraints))
        for f, v in fixed.items():
            lp.add({f: 1}, EQ, v)
        res = simplex(lp)
        fixed[e] = res.value
    return tuple(fixed[e] for e in range(m))


def lp_infeasibility_witness(exc: LPInfeasible) -> Certificate:
    from .certificates import farkas_certificate

    return farkas_certificate(exc.lp, exc.result.certificate)

