"""Built-in instances, the PARTITION reduction and seeded random generators."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .domain import ConstraintFamily, Instance, validate_instance
from .errors import BadN, UnknownId


@dataclass(frozen=True)
class GalleryEntry:
    id: str
    instance: Instance
    notes: str


def _labels(k: int) -> list[str]:
    return [f"e{t}" for t in range(1, k + 1)]


def example1() -> Instance:
    labels = ["a", "b", "c", "d"]
    fam = ConstraintFamily.partition(4, [([2, 3], 1), ([0, 1, 2, 3], 2)])
    return Instance.build(labels, [labels, labels], [fam, fam])


def example2() -> Instance:
    labels = _labels(7)
    f1 = ConstraintFamily.partition(7, [([0, 1, 2, 4], 2)])
    f2 = ConstraintFamily.partition(7, [([0, 1, 2], 1)])
    return Instance.build(labels, [labels, labels], [f1, f2])


def caution_instance() -> Instance:
    labels = _labels(3)
    fam = ConstraintFamily.partition(3, [([0, 1], 1)])
    return Instance.build(labels, [["e3", "e2", "e1"], ["e2", "e1", "e3"]], [fam, fam])


def footnote_instance() -> Instance:
    labels = _labels(3)
    fam = ConstraintFamily.explicit(3, [[0], [1, 2]])
    return Instance.build(labels, [labels], [fam])


def choice_example():
    """Worked choice example as ``(family, preference, x, instance)``."""
    fam = ConstraintFamily.partition(4, [([0, 2], 1), ([0, 1, 2, 3], 2)])
    inst = Instance.build(_labels(4), [_labels(4)], [fam])
    x = (Fraction(1, 2), Fraction(1), Fraction(1), Fraction(1))
    return fam, inst.prefs[0], x, inst


def thm4_instance() -> Instance:
    labels = _labels(4)
    f1 = ConstraintFamily.explicit(4, [[0], [1], [2, 3]])
    return Instance.build(labels, [labels, labels], [f1, ConstraintFamily.free(4)])


THM5_PREFS = (
    ("d", "a", "b", "c", "e"),
    ("d", "b", "e", "a", "c"),
    ("a", "d", "e", "b", "c"),
)


def thm5_instance() -> Instance:
    labels = ["a", "b", "c", "d", "e"]
    fam = ConstraintFamily.partition(5, [([0, 1, 2], 1)])
    return Instance.build(labels, THM5_PREFS, [fam] * 3)


def thm5_general(n: int) -> Instance:
    """n-agent version: items a..e, o6..o_{2n}; filler tails follow item index order."""
    if n < 3:
        raise BadN("the generalised instance needs n >= 3")
    labels = ["a", "b", "c", "d", "e"] + [f"o{t}" for t in range(6, 2 * n + 1)]
    fam = ConstraintFamily.partition(len(labels), [([0, 1, 2], 1)])
    prefs = []
    for i in range(1, n + 1):
        head = list(THM5_PREFS[i - 1]) if i <= 3 else [f"o{2 * i - 1}", f"o{2 * i}"]
        prefs.append(head + [lab for lab in labels if lab not in head])
    return Instance.build(labels, prefs, [fam] * n)


def build_partition_reduction(values: Sequence[int]) -> Instance:
    """Two identical agents whose bundles may weigh at most half the total."""
    values = [int(v) for v in values]
    if not values or any(v <= 0 for v in values):
        raise ValueError("values must be a nonempty list of positive integers")
    fam = ConstraintFamily.budget_family(values, Fraction(sum(values), 2))
    labels = _labels(len(values))
    return Instance.build(labels, [labels, labels], [fam, fam])


_GALLERY = {
    "ex1": (example1, "ex post efficiency without sd-efficiency"),
    "ex2": (example2, "naive probabilistic serial fails envy-freeness"),
    "sec41-caution": (caution_instance, "two-agent LP with envy rows is not efficient"),
    "footnote1": (footnote_instance, "non-matroid family where the lexicographic optimum is not sd-optimal"),
    "thm4": (thm4_instance, "two agents, identical preferences, no efficient envy-free lottery"),
    "thm5": (thm5_instance, "three agents, identical partition matroid, no efficient envy-free lottery"),
    "sec3-choice": (lambda: choice_example()[3], "worked choice-function family"),
}


def gallery_ids() -> list[str]:
    return list(_GALLERY) + ["thm5-general-n", "npc"]


def gallery(id: str, n: int | None = None, values: Sequence[int] | None = None) -> GalleryEntry:
    """Look up a built-in instance; ``thm5-general-n`` takes ``n``, ``npc`` takes ``values``."""
    if id == "thm5-general-n":
        return GalleryEntry(id, thm5_general(3 if n is None else n), f"generalised impossibility, n={n or 3}")
    if id == "npc":
        values = list(values or [1, 2, 3])
        return GalleryEntry(id, build_partition_reduction(values), f"PARTITION reduction of {values}")
    try:
        make, notes = _GALLERY[id]
    except KeyError:
        raise UnknownId(f"unknown gallery id {id!r}") from None
    inst = make()
    assert not validate_instance(inst)
    return GalleryEntry(id, inst, notes)


@dataclass(frozen=True)
class RandomParams:
    """Bounds for :func:`random_instance`. ``n``/``m`` are ints or inclusive ranges."""

    n: int | tuple[int, int] = (2, 3)
    m: int | tuple[int, int] = (2, 5)
    family: str = "laminar"  # laminar | explicit
    identical_prefs: bool = False
    identical_constraints: bool = False


def _draw(rng: random.Random, spec) -> int:
    return spec if isinstance(spec, int) else rng.randint(spec[0], spec[1])


def random_laminar(rng: random.Random, m: int) -> ConstraintFamily:
    blocks: list[tuple[list[int], int]] = []

    def grow(pool: list[int], depth: int) -> None:
        pool = [e for e in pool if rng.random() < 0.85]
        rng.shuffle(pool)
        while pool:
            size = rng.randint(1, len(pool))
            group, pool = pool[:size], pool[size:]
            cap = rng.randint(0, len(group)) if rng.random() < 0.15 else rng.randint(1, len(group))
            blocks.append((group, cap))
            if depth < 2 and len(group) > 1 and rng.random() < 0.5:
                grow(group, depth + 1)

    grow(list(range(m)), 0)
    if rng.random() < 0.4:
        blocks.append((list(range(m)), rng.randint(1, m)))
    return ConstraintFamily.partition(m, blocks)


def random_explicit(rng: random.Random, m: int) -> ConstraintFamily:
    sets = []
    for _ in range(rng.randint(1, 4)):
        size = rng.randint(1, max(1, min(m, 3)))
        sets.append(rng.sample(range(m), size))
    return ConstraintFamily.explicit(m, sets)


def random_instance(params: RandomParams, seed: int) -> Instance:
    """Deterministic function of ``(params, seed)``."""
    rng = random.Random(seed)
    n, m = _draw(rng, params.n), _draw(rng, params.m)
    make = random_laminar if params.family == "laminar" else random_explicit
    if params.identical_constraints:
        fams = [make(rng, m)] * n
    else:
        fams = [make(rng, m) for _ in range(n)]
    base = list(range(m))
    prefs = []
    for i in range(n):
        if i == 0 or not params.identical_prefs:
            order = base[:]
            rng.shuffle(order)
        prefs.append(order)
    return Instance.build([f"i{e}" for e in range(m)], prefs, fams)
