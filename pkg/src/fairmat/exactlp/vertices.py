"""Exact vertex enumeration for small bounded polytopes {x : A x <= b, C x = d}.

The affine hull is parametrised first (x = x0 + N t), implicit equalities are
found with one LP per row and folded into the hull, redundant rows are
dropped, and the vertices are the feasible solutions of every nonsingular
d-by-d subsystem of the remaining rows.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from ..errors import EnumerationTooLarge
from .simplex import LE, LinearProgram, simplex

Row = tuple[tuple[Fraction, ...], Fraction]


def rref(rows: Sequence[Sequence[Fraction]], ncols: int) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form of an augmented matrix; returns (rows, pivot columns)."""
    M = [[Fraction(v) for v in r] for r in rows]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        p = next((k for k in range(r, len(M)) if M[k][c] != 0), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        inv = 1 / M[r][c]
        M[r] = [v * inv for v in M[r]]
        for k in range(len(M)):
            if k != r and M[k][c] != 0:
                f = M[k][c]
                M[k] = [a - f * b for a, b in zip(M[k], M[r])]
        pivots.append(c)
        r += 1
        if r == len(M):
            break
    return M[:r], pivots


def solve_square(A: Sequence[Sequence[Fraction]], b: Sequence[Fraction]) -> list[Fraction] | None:
    """Unique solution of a square system, or None when singular."""
    d = len(A)
    R, piv = rref([list(A[k]) + [b[k]] for k in range(d)], d)
    if len(piv) < d:
        return None
    return [R[k][d] for k in range(d)]


@dataclass
class AffineHull:
    """x = x0 + N t; ``N`` has one column per free parameter."""

    x0: list[Fraction]
    N: list[list[Fraction]]  # nvars rows, dim columns

    @property
    def dim(self) -> int:
        return len(self.N[0]) if self.N else 0

    def point(self, t: Sequence[Fraction]) -> tuple[Fraction, ...]:
        return tuple(self.x0[k] + sum((a * b for a, b in zip(self.N[k], t)), Fraction(0)) for k in range(len(self.x0)))


def affine_hull(eqs: Sequence[Row], nvars: int) -> AffineHull | None:
    if not eqs:
        return AffineHull([Fraction(0)] * nvars, [[Fraction(int(k == j)) for j in range(nvars)] for k in range(nvars)])
    R, piv = rref([list(a) + [b] for a, b in eqs], nvars)
    if any(all(v == 0 for v in row[:nvars]) and row[nvars] != 0 for row in R):
        return None
    free = [c for c in range(nvars) if c not in piv]
    x0 = [Fraction(0)] * nvars
    for row, c in zip(R, piv):
        x0[c] = row[nvars]
    N = [[Fraction(0)] * len(free) for _ in range(nvars)]
    for j, f in enumerate(free):
        N[f][j] = Fraction(1)
        for row, c in zip(R, piv):
            N[c][j] = -row[f]
    return AffineHull(x0, N)


def _project(rows: Sequence[Row], hull: AffineHull) -> list[Row]:
    d = hull.dim
    out = []
    for a, b in rows:
        a2 = tuple(sum((a[k] * hull.N[k][j] for k in range(len(a)) if a[k]), Fraction(0)) for j in range(d))
        b2 = b - sum((a[k] * hull.x0[k] for k in range(len(a)) if a[k]), Fraction(0))
        out.append((a2, b2))
    return out


def _normalise(row: Row) -> Row:
    a, b = row
    lead = next(abs(v) for v in a if v)
    return tuple(v / lead for v in a), b / lead


def _max_linear(rows: Sequence[Row], c: Sequence[Fraction], d: int):
    """max c.t subject to rows, t free (split into t+ - t-)."""
    lp = LinearProgram(2 * d, {j: c[j] for j in range(d) if c[j]} | {d + j: -c[j] for j in range(d) if c[j]})
    for a, b in rows:
        coeffs = {}
        for j, v in enumerate(a):
            if v:
                coeffs[j] = v
                coeffs[d + j] = -v
        lp.add(coeffs, LE, b)
    return simplex(lp)


def implicit_equalities(rows: Sequence[Row], d: int) -> list[int] | None:
    """Indices of rows tight on the whole polytope; None if the polytope is empty."""
    out = []
    for k, (a, b) in enumerate(rows):
        res = _max_linear(rows, [-v for v in a], d)
        if res.status == "infeasible":
            return None
        if res.status == "optimal" and b + res.value == 0:
            out.append(k)
    return out


def enumerate_vertices(
    nvars: int,
    ineqs: Sequence[Row],
    eqs: Sequence[Row] = (),
    limit: int = 2_000_000,
) -> list[tuple[Fraction, ...]]:
    """All vertices of the bounded polytope {x : a.x <= b for ineqs, a.x = b for eqs}.

    ``limit`` bounds the number of subsystems tried.
    """
    ineqs = [(tuple(Fraction(v) for v in a), Fraction(b)) for a, b in ineqs]
    eqs = [(tuple(Fraction(v) for v in a), Fraction(b)) for a, b in eqs]
    hull = affine_hull(eqs, nvars)
    if hull is None:
        return []
    proj = _project(ineqs, hull)
    if any(all(v == 0 for v in a) and b < 0 for a, b in proj):
        return []
    live = [k for k, r in enumerate(proj) if any(r[0])]
    proj = [proj[k] for k in live]
    if hull.dim == 0:
        return [hull.point(())]
    tight = implicit_equalities(proj, hull.dim)
    if tight is None:
        return []
    if tight:
        # a row tight everywhere is an equation of the affine hull
        return enumerate_vertices(nvars, ineqs, list(eqs) + [ineqs[live[k]] for k in tight], limit)
    d = hull.dim
    uniq = {}
    for r in proj:
        a, b = _normalise(r)
        if a not in uniq or b < uniq[a]:
            uniq[a] = b
    rows = list(uniq.items())
    keep = list(range(len(rows)))
    for k in range(len(rows)):
        others = [rows[j] for j in keep if j != k]
        res = _max_linear(others, rows[k][0], d)
        if res.status == "optimal" and res.value <= rows[k][1]:
            keep.remove(k)
    rows = [rows[j] for j in keep]
    count = 0
    found: set[tuple[Fraction, ...]] = set()
    for combo in itertools.combinations(range(len(rows)), d):
        count += 1
        if count > limit:
            raise EnumerationTooLarge("vertex enumeration exceeded its subsystem limit")
        t = solve_square([rows[k][0] for k in combo], [rows[k][1] for k in combo])
        if t is None:
            continue
        if all(sum((x * y for x, y in zip(a, t)), Fraction(0)) <= b for a, b in rows):
            found.add(hull.point(t))
    return sorted(found)
