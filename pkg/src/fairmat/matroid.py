"""Matroid rank functions and the choice and eating routines built on them."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .domain import (
    BUDGET,
    EXPLICIT,
    ConstraintFamily,
    Preference,
    full_mask,
    members,
    membership,
    popcount,
    submasks,
)
from .errors import NotAMatroid, check_subset_guard, family_guard, GroundSetTooLarge

Vector = Sequence[Fraction]


class _LaminarTree:
    """Blocks of a laminar family arranged as a forest (parents before children)."""

    def __init__(self, blocks: Sequence[tuple[int, int]], m: int):
        self.blocks = list(blocks)
        k = len(self.blocks)
        parent = [-1] * k
        for a in range(k):
            for b in range(a - 1, -1, -1):
                if self.blocks[a][0] & ~self.blocks[b][0] == 0:
                    parent[a] = b
                    break
        self.children: list[list[int]] = [[] for _ in range(k)]
        self.roots = []
        for a, p in enumerate(parent):
            (self.children[p] if p >= 0 else self.roots).append(a)
        self.loose = []
        for a in range(k):
            covered = 0
            for c in self.children[a]:
                covered |= self.blocks[c][0]
            self.loose.append(self.blocks[a][0] & ~covered)
        covered = 0
        for r in self.roots:
            covered |= self.blocks[r][0]
        self.top_loose = full_mask(m) & ~covered
        self.containing: list[list[int]] = [
            [a for a in range(k) if self.blocks[a][0] >> e & 1] for e in range(m)
        ]

    def value(self, X: int, weight=None):
        """max y(X) subject to block caps and ``y_e <= weight[e]`` (1 when omitted)."""

        def leaves(mask):
            if weight is None:
                return popcount(mask)
            return sum((weight[e] for e in members(mask)), Fraction(0))

        def block(a):
            total = leaves(X & self.loose[a]) + sum(block(c) for c in self.children[a])
            return min(total, self.blocks[a][1])

        return leaves(X & self.top_loose) + sum(block(r) for r in self.roots)


class RankOracle:
    """Memoised rank function of a matroid family."""

    def __init__(self, family: ConstraintFamily):
        self.family = family
        self.cache: dict[int, int] = {}
        self._tree = _LaminarTree(family.laminar_blocks(), family.m) if family.is_laminar else None

    @property
    def m(self) -> int:
        return self.family.m

    @property
    def laminar(self) -> bool:
        return self._tree is not None

    def rank(self, X: int) -> int:
        if not self.family.matroid:
            raise NotAMatroid(f"{self.family.kind} family is not a matroid")
        r = self.cache.get(X)
        if r is None:
            r = self._tree.value(X) if self._tree is not None else max_feasible_size(self.family, X)
            self.cache[X] = r
        return r


def rank(oracle: RankOracle, X: int) -> int:
    return oracle.rank(X)


def max_feasible_size(family: ConstraintFamily, X: int) -> int:
    """Size of a largest feasible subset of ``X`` for any hereditary family.

    Closed forms: laminar tree for matroid partitions, best maximal set for
    explicit families, lightest-first for budgets (exact for cardinality).
    Crossing partition blocks fall back to exhaustive search.
    """
    if family.is_laminar:
        return _LaminarTree(family.laminar_blocks(), family.m).value(X)
    if family.kind == EXPLICIT:
        return max(popcount(X & mx) for mx in family.maximal)
    if family.kind == BUDGET:
        total, count = Fraction(0), 0
        for w in sorted(family.weights[e] for e in members(X)):
            if total + w > family.budget:
                break
            total += w
            count += 1
        return count
    check_subset_guard(popcount(X))
    return max(popcount(Y) for Y in submasks(X) if membership(family, Y))


def _vsum(x: Vector, X: int) -> Fraction:
    return sum((x[e] for e in members(X)), Fraction(0))


class ReducedRank:
    """r^x(X) = min over Y subset of X of r(Y) + x(X minus Y)."""

    def __init__(self, oracle: RankOracle, x: Vector):
        if any(v < 0 for v in x):
            raise ValueError("x must be nonnegative")
        self.oracle = oracle
        self.x = tuple(Fraction(v) for v in x)
        self.cache: dict[int, Fraction] = {}

    def __call__(self, X: int) -> Fraction:
        v = self.cache.get(X)
        if v is None:
            v = self._compute(X)
            self.cache[X] = v
        return v

    def _compute(self, X: int) -> Fraction:
        orc = self.oracle
        if orc.laminar:
            return Fraction(orc._tree.value(X, [min(Fraction(1), v) for v in self.x]))
        return reduced_rank_bruteforce(orc, self.x, X)


def reduced_rank_bruteforce(oracle: RankOracle, x: Vector, X: int) -> Fraction:
    check_subset_guard(popcount(X), "reduced rank")
    best = None
    for Y in submasks(X):
        v = oracle.rank(Y) + _vsum(x, X & ~Y)
        if best is None or v < best:
            best = v
    return Fraction(best)


def reduced_rank(rr: ReducedRank, X: int) -> Fraction:
    return rr(X)


def choice(oracle: RankOracle, pref: Preference, x: Vector) -> tuple[Fraction, ...]:
    """Lexicographically maximum point of conv(F) below ``x`` (telescoping prefixes)."""
    rr = ReducedRank(oracle, x)
    y = [Fraction(0)] * oracle.m
    prev = Fraction(0)
    for k in range(1, oracle.m + 1):
        cur = rr(pref.prefix(k))
        y[pref.order[k - 1]] = cur - prev
        prev = cur
    return tuple(y)


def eat_capacity(oracle: RankOracle, x: Vector, e: int) -> Fraction:
    """Largest eps with x + eps * chi_e inside conv(F)."""
    if oracle.laminar:
        best = 1 - Fraction(x[e])
        tree = oracle._tree
        for a in tree.containing[e]:
            mask, cap = tree.blocks[a]
            best = min(best, cap - _vsum(x, mask))
        return best
    check_subset_guard(oracle.m - 1, "eating capacity")
    rest = full_mask(oracle.m) & ~(1 << e)
    best = None
    for Y in submasks(rest):
        X = Y | 1 << e
        v = oracle.rank(X) - _vsum(x, X)
        if best is None or v < best:
            best = v
    return Fraction(best)


def subset_sums(y: Vector) -> list[Fraction]:
    m = len(y)
    sums = [Fraction(0)] * (1 << m)
    for mask in range(1, 1 << m):
        low = mask & -mask
        sums[mask] = sums[mask ^ low] + y[low.bit_length() - 1]
    return sums


def in_reduced_polytope(rr: ReducedRank, y: Vector) -> bool:
    m = rr.oracle.m
    check_subset_guard(m)
    if any(v < 0 for v in y):
        return False
    sums = subset_sums([Fraction(v) for v in y])
    return all(sums[X] <= rr(X) for X in range(1, 1 << m))


def in_matroid_polytope(oracle: RankOracle, y: Vector) -> bool:
    return in_reduced_polytope(ReducedRank(oracle, [Fraction(1)] * oracle.m), y)


def feasible_sets(family: ConstraintFamily) -> list[int]:
    if family.m > family_guard():
        raise GroundSetTooLarge(f"family enumeration over {family.m} items exceeds {family_guard()}")
    if family.kind == EXPLICIT:
        found: set[int] = set()
        for mx in family.maximal:
            found.update(submasks(mx))
        return sorted(found)
    return [s for s in range(1 << family.m) if membership(family, s)]


def augmentation_check(family: ConstraintFamily) -> bool:
    """Standard augmentation axiom: |X| < |Y| implies some e in Y - X with X + e feasible.

    Checking |Y| = |X| + 1 suffices; that case fails exactly when the items
    that cannot extend X still hold a feasible set larger than X.
    """
    ground = full_mask(family.m)
    for X in feasible_sets(family):
        ext = 0
        for e in members(ground & ~X):
            if membership(family, X | 1 << e):
                ext |= 1 << e
        if max_feasible_size(family, ground & ~ext) > popcount(X):
            return False
    return True
