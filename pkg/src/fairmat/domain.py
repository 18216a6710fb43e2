"""Core data model: items, preferences, constraint families, assignments, lotteries.

Item sets are Python ints used as bitmasks over item indices (bit ``e`` set
means item ``e`` is in the set). Every probability is a ``Fraction``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from .errors import EnumerationTooLarge, assignment_guard

Matrix = tuple[tuple[Fraction, ...], ...]
Bundles = tuple[int, ...]


def mask_of(items: Iterable[int]) -> int:
    out = 0
    for e in items:
        out |= 1 << e
    return out


def members(mask: int) -> list[int]:
    out = []
    e = 0
    while mask:
        if mask & 1:
            out.append(e)
        mask >>= 1
        e += 1
    return out


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def full_mask(m: int) -> int:
    return (1 << m) - 1


def submasks(mask: int) -> Iterator[int]:
    """All subsets of ``mask``, including ``mask`` itself and 0."""
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


@dataclass(frozen=True)
class Item:
    index: int
    label: str


@dataclass(frozen=True)
class Preference:
    """Strict order over item indices, most preferred first."""

    order: tuple[int, ...]
    rank: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "order", tuple(self.order))
        rank = [-1] * len(self.order)
        for pos, e in enumerate(self.order):
            if 0 <= e < len(rank) and rank[e] == -1:
                rank[e] = pos
        object.__setattr__(self, "rank", tuple(rank))

    @property
    def m(self) -> int:
        return len(self.order)

    def is_permutation(self) -> bool:
        return sorted(self.order) == list(range(len(self.order)))

    def prefix(self, k: int) -> int:
        """Mask of the ``k`` most preferred items."""
        return mask_of(self.order[:k])

    def prefers(self, a: int, b: int) -> bool:
        return self.rank[a] < self.rank[b]


FREE = "free"
UNIFORM = "uniform"
PARTITION = "partition"
BUDGET = "budget"
EXPLICIT = "explicit"


def _laminar(blocks: Sequence[tuple[int, int]]) -> bool:
    for i, (a, _) in enumerate(blocks):
        for b, _ in blocks[i + 1:]:
            if a & b and (a & b) != a and (a & b) != b:
                return False
    return True


@dataclass(frozen=True)
class ConstraintFamily:
    """A hereditary set family over ``m`` items.

    Build instances with the classmethods; the raw constructor does no
    normalisation. ``blocks`` generalises partition matroids to laminar
    (nested) lists of ``(mask, cap)`` pairs; items outside every block are
    unconstrained.
    """

    kind: str
    m: int
    capacity: int = 0
    blocks: tuple[tuple[int, int], ...] = ()
    weights: tuple[int, ...] = ()
    budget: Fraction = Fraction(0)
    maximal: tuple[int, ...] = ()
    matroid: bool = False

    @classmethod
    def free(cls, m: int) -> "ConstraintFamily":
        return cls(FREE, m, matroid=True)

    @classmethod
    def uniform(cls, m: int, capacity: int) -> "ConstraintFamily":
        return cls(UNIFORM, m, capacity=capacity, matroid=True)

    @classmethod
    def partition(cls, m: int, blocks: Iterable[tuple[Iterable[int] | int, int]]) -> "ConstraintFamily":
        norm = []
        for items, cap in blocks:
            bmask = items if isinstance(items, int) else mask_of(items)
            norm.append((bmask, int(cap)))
        norm.sort(key=lambda bc: (-popcount(bc[0]), bc[0], bc[1]))
        return cls(PARTITION, m, blocks=tuple(norm), matroid=_laminar(norm))

    @classmethod
    def budget_family(cls, weights: Sequence[int], budget) -> "ConstraintFamily":
        return cls(BUDGET, len(weights), weights=tuple(int(w) for w in weights),
                   budget=Fraction(budget), matroid=False)

    @classmethod
    def explicit(cls, m: int, maximal: Iterable[Iterable[int] | int]) -> "ConstraintFamily":
        masks = {s if isinstance(s, int) else mask_of(s) for s in maximal}
        if not masks:
            masks = {0}
        anti = sorted(s for s in masks if not any(s != t and s & t == s for t in masks))
        fam = cls(EXPLICIT, m, maximal=tuple(anti), matroid=False)
        from .matroid import augmentation_check

        return cls(EXPLICIT, m, maximal=tuple(anti), matroid=augmentation_check(fam))

    @property
    def is_laminar(self) -> bool:
        return self.kind in (FREE, UNIFORM) or (self.kind == PARTITION and self.matroid)

    def laminar_blocks(self) -> tuple[tuple[int, int], ...]:
        if self.kind == FREE:
            return ()
        if self.kind == UNIFORM:
            return ((full_mask(self.m), self.capacity),)
        if self.kind == PARTITION:
            return self.blocks
        raise ValueError(f"{self.kind} family has no laminar encoding")

    def contains(self, s: int) -> bool:
        return membership(self, s)


def membership(family: ConstraintFamily, s: int) -> bool:
    """True iff the item set ``s`` (a bitmask) is feasible under ``family``."""
    kind = family.kind
    if kind == FREE:
        return True
    if kind == UNIFORM:
        return popcount(s) <= family.capacity
    if kind == PARTITION:
        return all(popcount(s & b) <= cap for b, cap in family.blocks)
    if kind == BUDGET:
        return sum(family.weights[e] for e in members(s)) <= family.budget
    if kind == EXPLICIT:
        return any(s & ~mx == 0 for mx in family.maximal)
    raise ValueError(f"unknown family kind {kind!r}")


def same_family(f: ConstraintFamily, g: ConstraintFamily) -> bool:
    """Structural equality, falling back to membership comparison on small ground sets."""
    if f == g:
        return True
    if f.m != g.m or f.m > 12:
        return False
    return all(membership(f, s) == membership(g, s) for s in range(1 << f.m))


@dataclass(frozen=True)
class Instance:
    n: int
    items: tuple[Item, ...]
    prefs: tuple[Preference, ...]
    constraints: tuple[ConstraintFamily, ...]

    @classmethod
    def build(cls, labels: Sequence[str], prefs: Sequence[Sequence], constraints: Sequence[ConstraintFamily]):
        """Build from item labels; preference entries may be labels or indices."""
        index = {lab: k for k, lab in enumerate(labels)}
        orders = []
        for p in prefs:
            orders.append(Preference(tuple(index[e] if isinstance(e, str) else int(e) for e in p)))
        return cls(len(orders), tuple(Item(k, lab) for k, lab in enumerate(labels)),
                   tuple(orders), tuple(constraints))

    @property
    def m(self) -> int:
        return len(self.items)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(it.label for it in self.items)

    def label_set(self, mask: int) -> list[str]:
        return [self.items[e].label for e in members(mask)]

    def mask(self, labels: Iterable[str]) -> int:
        index = {it.label: it.index for it in self.items}
        return mask_of(index[lab] for lab in labels)

    def identical_preferences(self) -> bool:
        return all(p.order == self.prefs[0].order for p in self.prefs)

    def identical_constraints(self) -> bool:
        return all(same_family(c, self.constraints[0]) for c in self.constraints)

    def all_matroids(self) -> bool:
        return all(c.matroid for c in self.constraints)

    def permuted(self, perm: Sequence[int]) -> "Instance":
        """Instance whose agent ``k`` is agent ``perm[k]`` of this one."""
        return Instance(self.n, self.items, tuple(self.prefs[p] for p in perm),
                        tuple(self.constraints[p] for p in perm))


def validate_instance(inst: Instance) -> list[str]:
    """Return one message per violated invariant; empty when well formed."""
    out: list[str] = []
    m = inst.m
    if inst.n < 1:
        out.append("at least one agent required")
    if len(inst.prefs) != inst.n:
        out.append("one preference per agent required")
    if len(inst.constraints) != inst.n:
        out.append("one constraint family per agent required")
    if [it.index for it in inst.items] != list(range(m)):
        out.append("item indices not contiguous")
    if len({it.label for it in inst.items}) != m:
        out.append("item labels not unique")
    for p in inst.prefs:
        if p.m != m or not p.is_permutation():
            out.append("preference not a permutation")
            break
    ground = full_mask(m)
    for fam in inst.constraints:
        if fam.m != m:
            out.append("family over a different ground set")
            continue
        if fam.kind == UNIFORM and fam.capacity < 0:
            out.append("negative capacity")
        elif fam.kind == PARTITION:
            if any(b & ~ground for b, _ in fam.blocks):
                out.append("block outside the ground set")
            if any(cap < 0 for _, cap in fam.blocks):
                out.append("negative capacity")
            if not _laminar(fam.blocks):
                out.append("blocks not disjoint")
        elif fam.kind == BUDGET:
            if any(w <= 0 for w in fam.weights):
                out.append("budget weights must be positive")
            if fam.budget < 0:
                out.append("negative budget")
        elif fam.kind == EXPLICIT:
            if any(s & ~ground for s in fam.maximal):
                out.append("maximal set outside the ground set")
        elif fam.kind not in (FREE, UNIFORM):
            out.append(f"unknown family kind {fam.kind}")
    return out


def as_matrix(rows: Iterable[Iterable]) -> Matrix:
    return tuple(tuple(Fraction(v) for v in row) for row in rows)


def zero_matrix(n: int, m: int) -> Matrix:
    return tuple((Fraction(0),) * m for _ in range(n))


def bundles_matrix(bundles: Bundles, m: int) -> Matrix:
    return tuple(tuple(Fraction(1) if b >> e & 1 else Fraction(0) for e in range(m)) for b in bundles)


@dataclass(frozen=True)
class Lottery:
    """Finitely supported distribution over deterministic assignments."""

    support: tuple[tuple[Fraction, Bundles], ...]

    def __post_init__(self):
        support = tuple((Fraction(p), tuple(b)) for p, b in self.support)
        object.__setattr__(self, "support", support)
        if any(p <= 0 for p, _ in support):
            raise ValueError("lottery probabilities must be positive")
        if sum(p for p, _ in support) != 1:
            raise ValueError("lottery probabilities must sum to 1")
        if len({b for _, b in support}) != len(support):
            raise ValueError("duplicate assignment in lottery support")
        for _, bundles in support:
            seen = 0
            for b in bundles:
                if b & seen:
                    raise ValueError("bundles of an assignment must be disjoint")
                seen |= b

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple]) -> "Lottery":
        """Merge duplicate assignments and drop zero weights."""
        acc: dict[Bundles, Fraction] = {}
        for p, b in pairs:
            p = Fraction(p)
            if p:
                acc[tuple(b)] = acc.get(tuple(b), Fraction(0)) + p
        return cls(tuple((p, b) for b, p in acc.items()))

    @classmethod
    def point(cls, bundles: Bundles) -> "Lottery":
        return cls(((Fraction(1), tuple(bundles)),))

    @property
    def n(self) -> int:
        return len(self.support[0][1])

    def is_feasible_for(self, inst: Instance) -> bool:
        return all(
            len(b) == inst.n and all(membership(inst.constraints[i], b[i]) for i in range(inst.n))
            for _, b in self.support
        )


def induced_fractional(lottery: Lottery, m: int) -> Matrix:
    """Marginal probability that each agent receives each item."""
    n = lottery.n
    pi = [[Fraction(0)] * m for _ in range(n)]
    for p, bundles in lottery.support:
        for i, b in enumerate(bundles):
            for e in members(b):
                pi[i][e] += p
    return tuple(tuple(r) for r in pi)


def is_assignment(inst: Instance, bundles: Bundles) -> bool:
    seen = 0
    for i, b in enumerate(bundles):
        if b & seen or not membership(inst.constraints[i], b):
            return False
        seen |= b
    return len(bundles) == inst.n


def enumerate_assignments(
    inst: Instance,
    *,
    maximal_only: bool = False,
    allowed: Sequence[int] | None = None,
    required: Sequence[int] | None = None,
    covered: int = 0,
    limit: int | None = None,
) -> list[Bundles]:
    """All deterministic assignments, optionally restricted.

    ``allowed[i]`` masks the items agent ``i`` may receive, ``required[i]`` the
    items she must receive, ``covered`` the items someone must receive.
    ``maximal_only`` keeps assignments to which no unassigned item can be added.
    """
    n, m = inst.n, inst.m
    fams = inst.constraints
    allowed = list(allowed) if allowed is not None else [full_mask(m)] * n
    required = list(required) if required is not None else [0] * n
    for i in range(n):
        covered |= required[i]
    limit = assignment_guard() if limit is None else limit
    out: list[Bundles] = []
    bundles = [0] * n

    def rec(e: int) -> None:
        if e == m:
            if any(required[i] & ~bundles[i] for i in range(n)):
                return
            if maximal_only:
                used = 0
                for b in bundles:
                    used |= b
                for x in members(full_mask(m) & ~used):
                    if any(membership(fams[i], bundles[i] | 1 << x) for i in range(n)):
                        return
            out.append(tuple(bundles))
            if len(out) > limit:
                raise EnumerationTooLarge(f"more than {limit} deterministic assignments")
            return
        bit = 1 << e
        forced = [i for i in range(n) if required[i] & bit]
        agents = forced if forced else range(n)
        for i in agents:
            if allowed[i] & bit and membership(fams[i], bundles[i] | bit):
                bundles[i] |= bit
                rec(e + 1)
                bundles[i] &= ~bit
        if not forced and not covered & bit:
            rec(e + 1)

    rec(0)
    return out
