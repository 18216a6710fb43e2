"""Exact two-phase revised simplex over the rationals.

All variables are nonnegative. Bland's rule is used for both entering and
leaving choices, so the method terminates without any pivot tolerance.
Arithmetic runs on ``gmpy2.mpq`` when available and ``Fraction`` otherwise;
results are always returned as ``Fraction``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

try:
    from gmpy2 import mpq
except ImportError:  # pragma: no cover
    mpq = None

LE, GE, EQ = "<=", ">=", "="
OPTIMAL, INFEASIBLE, UNBOUNDED = "optimal", "infeasible", "unbounded"


def _num(v):
    if mpq is None:
        return Fraction(v)
    if isinstance(v, Fraction):
        return mpq(v.numerator, v.denominator)
    return mpq(v)


def _frac(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    return Fraction(int(v.numerator), int(v.denominator))


@dataclass
class Constraint:
    coeffs: dict[int, Fraction]
    rel: str
    rhs: Fraction
    label: str = ""


@dataclass
class LinearProgram:
    """``sense`` objective . x subject to the constraints and x >= 0."""

    num_vars: int
    objective: dict[int, Fraction] = field(default_factory=dict)
    sense: str = "max"
    constraints: list[Constraint] = field(default_factory=list)

    def add(self, coeffs: Mapping[int, object] | Sequence, rel: str, rhs, label: str = "") -> None:
        if not isinstance(coeffs, Mapping):
            coeffs = dict(enumerate(coeffs))
        clean = {j: Fraction(v) for j, v in coeffs.items() if v}
        if rel not in (LE, GE, EQ):
            raise ValueError(f"bad relation {rel!r}")
        self.constraints.append(Constraint(clean, rel, Fraction(rhs), label))

    def value_at(self, x: Sequence[Fraction]) -> Fraction:
        return sum((c * x[j] for j, c in self.objective.items()), Fraction(0))

    def satisfied_by(self, x: Sequence[Fraction]) -> bool:
        if any(v < 0 for v in x):
            return False
        for con in self.constraints:
            lhs = sum((c * x[j] for j, c in con.coeffs.items()), Fraction(0))
            if con.rel == LE and lhs > con.rhs or con.rel == GE and lhs < con.rhs:
                return False
            if con.rel == EQ and lhs != con.rhs:
                return False
        return True


@dataclass
class LPResult:
    status: str
    x: tuple[Fraction, ...] | None = None
    value: Fraction | None = None
    certificate: tuple[Fraction, ...] | None = None
    ray: tuple[Fraction, ...] | None = None
    pivots: int = 0

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


def verify_farkas(lp: LinearProgram, y: Sequence[Fraction]) -> bool:
    """Check that multipliers ``y`` prove ``lp`` infeasible.

    Sign rules: ``y_k >= 0`` on <= rows, ``y_k <= 0`` on >= rows, free on = rows.
    Then every feasible x >= 0 satisfies (sum_k y_k a_k) . x <= sum_k y_k b_k;
    a nonnegative combined row with a negative combined rhs is a contradiction.
    """
    if len(y) != len(lp.constraints):
        return False
    combo = [Fraction(0)] * lp.num_vars
    rhs = Fraction(0)
    for yk, con in zip(y, lp.constraints):
        yk = Fraction(yk)
        if con.rel == LE and yk < 0 or con.rel == GE and yk > 0:
            return False
        for j, a in con.coeffs.items():
            combo[j] += yk * a
        rhs += yk * con.rhs
    return all(v >= 0 for v in combo) and rhs < 0


class _Tableau:
    """Revised-simplex state over standardised rows ``A x = b`` with ``b >= 0``."""

    def __init__(self, lp: LinearProgram):
        self.lp = lp
        rows = len(lp.constraints)
        self.rows = rows
        self.sign = []
        cols: list[dict[int, object]] = [dict() for _ in range(lp.num_vars)]
        self.b = []
        self.slack_of: dict[int, int] = {}
        for k, con in enumerate(lp.constraints):
            s = 1 if con.rhs >= 0 else -1
            self.sign.append(s)
            self.b.append(_num(s * con.rhs))
            for j, a in con.coeffs.items():
                cols[j][k] = _num(s * a)
        self.n_orig = lp.num_vars
        init_basis = []
        for k, con in enumerate(lp.constraints):
            if con.rel == EQ:
                init_basis.append(None)
                continue
            coef = self.sign[k] * (1 if con.rel == LE else -1)
            self.slack_of[k] = len(cols)
            cols.append({k: _num(coef)})
            init_basis.append(len(cols) - 1 if coef == 1 else None)
        self.first_art = len(cols)
        for k in range(rows):
            if init_basis[k] is None:
                cols.append({k: _num(1)})
                init_basis[k] = len(cols) - 1
        self.cols = cols
        self.basis = init_basis
        one, zero = _num(1), _num(0)
        self.Binv = [[one if i == k else zero for k in range(rows)] for i in range(rows)]
        self.xB = list(self.b)
        self.pivots = 0

    def is_art(self, j: int) -> bool:
        return j >= self.first_art

    def duals(self, cost: Sequence) -> list:
        y = [_num(0)] * self.rows
        for i, j in enumerate(self.basis):
            c = cost[j]
            if c:
                row = self.Binv[i]
                for k in range(self.rows):
                    if row[k]:
                        y[k] += c * row[k]
        return y

    def column(self, j: int) -> list:
        col = self.cols[j]
        out = []
        for i in range(self.rows):
            row = self.Binv[i]
            acc = _num(0)
            for k, v in col.items():
                if row[k]:
                    acc += row[k] * v
            out.append(acc)
        return out

    def pivot(self, p: int, j: int, d: Sequence) -> None:
        piv = d[p]
        prow = [v / piv for v in self.Binv[p]]
        self.Binv[p] = prow
        self.xB[p] = self.xB[p] / piv
        nz = [k for k, v in enumerate(prow) if v]
        for i in range(self.rows):
            f = d[i]
            if i == p or not f:
                continue
            row = self.Binv[i]
            for k in nz:
                row[k] -= f * prow[k]
            self.xB[i] -= f * self.xB[p]
        self.basis[p] = j
        self.pivots += 1

    def run(self, cost: Sequence, allow_art: bool):
        """Minimise ``cost``; returns (status, entering column if unbounded, its direction)."""
        while True:
            y = self.duals(cost)
            in_basis = set(self.basis)
            enter = None
            for j, col in enumerate(self.cols):
                if j in in_basis or (not allow_art and self.is_art(j)):
                    continue
                red = cost[j]
                for k, v in col.items():
                    if y[k]:
                        red -= y[k] * v
                if red < 0:
                    enter = j
                    break
            if enter is None:
                return OPTIMAL, None, None
            d = self.column(enter)
            leave = None
            best = None
            for i in range(self.rows):
                if d[i] > 0:
                    ratio = self.xB[i] / d[i]
                    if best is None or ratio < best or ratio == best and self.basis[i] < self.basis[leave]:
                        best, leave = ratio, i
            if leave is None:
                return UNBOUNDED, enter, d
            self.pivot(leave, enter, d)


def simplex(lp: LinearProgram) -> LPResult:
    """Solve ``lp`` exactly. Infeasible results carry a Farkas certificate."""
    t = _Tableau(lp)
    ncols = len(t.cols)
    zero = _num(0)
    if t.first_art < ncols:
        cost1 = [zero] * t.first_art + [_num(1)] * (ncols - t.first_art)
        t.run(cost1, allow_art=False)
        w = sum((cost1[j] * t.xB[i] for i, j in enumerate(t.basis)), zero)
        if w > 0:
            y = t.duals(cost1)
            cert = tuple(_frac(-y[k]) * t.sign[k] for k in range(t.rows))
            return LPResult(INFEASIBLE, certificate=cert, pivots=t.pivots)
        for p in range(t.rows):
            if not t.is_art(t.basis[p]):
                continue
            row = t.Binv[p]
            in_basis = set(t.basis)
            for j in range(t.first_art):
                if j in in_basis:
                    continue
                if sum((row[k] * v for k, v in t.cols[j].items()), zero):
                    t.pivot(p, j, t.column(j))
                    break
    sgn = -1 if lp.sense == "max" else 1
    cost2 = [zero] * ncols
    for j, c in lp.objective.items():
        cost2[j] = _num(sgn * c)
    status, enter, d = t.run(cost2, allow_art=False)
    x = [Fraction(0)] * lp.num_vars
    for i, j in enumerate(t.basis):
        if j < lp.num_vars:
            x[j] = _frac(t.xB[i])
    if status == UNBOUNDED:
        ray = [Fraction(0)] * lp.num_vars
        if enter < lp.num_vars:
            ray[enter] = Fraction(1)
        for i, j in enumerate(t.basis):
            if j < lp.num_vars:
                ray[j] = -_frac(d[i])
        return LPResult(UNBOUNDED, x=tuple(x), ray=tuple(ray), pivots=t.pivots)
    return LPResult(OPTIMAL, x=tuple(x), value=lp.value_at(x), pivots=t.pivots)
