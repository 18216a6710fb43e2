from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fairmat.domain import (
    ConstraintFamily,
    Instance,
    Lottery,
    enumerate_assignments,
    induced_fractional,
    is_assignment,
    mask_of,
    members,
    membership,
    submasks,
    validate_instance,
)
from fairmat.errors import EnumerationTooLarge
from fairmat.instances import gallery

from conftest import HALF, free_instance


def test_bitmask_helpers():
    assert mask_of([0, 2]) == 0b101
    assert members(0b1011) == [0, 1, 3]
    assert sorted(submasks(0b101)) == [0, 1, 4, 5]


def test_membership_partition():
    fam = ConstraintFamily.partition(4, [([2, 3], 1), ([0, 1, 2, 3], 2)])
    assert membership(fam, mask_of([0, 2]))
    assert not membership(fam, mask_of([2, 3]))
    assert not membership(fam, mask_of([0, 1, 2]))
    assert fam.matroid


def test_membership_budget_uses_rational_half_sum():
    fam = ConstraintFamily.budget_family([1, 1, 3], Fraction(5, 2))
    assert membership(fam, mask_of([0, 1]))
    assert not membership(fam, mask_of([2]))
    assert not fam.matroid


def test_explicit_family_is_antichain_normalised():
    fam = ConstraintFamily.explicit(3, [[0], [0, 1], [2]])
    assert fam.maximal == (mask_of([2]), mask_of([0, 1])) or set(fam.maximal) == {mask_of([2]), mask_of([0, 1])}
    assert membership(fam, mask_of([1]))
    assert not membership(fam, mask_of([1, 2]))


def test_explicit_family_matroid_detection():
    assert not ConstraintFamily.explicit(3, [[0], [1, 2]]).matroid
    assert ConstraintFamily.explicit(3, [[0, 1], [0, 2], [1, 2]]).matroid


def test_validate_instance_flags_problems():
    inst = Instance.build(["a", "b"], [["a", "b"], ["a", "a"]], [ConstraintFamily.free(2)] * 2)
    assert "preference not a permutation" in validate_instance(inst)
    crossing = ConstraintFamily.partition(3, [([0, 1], 1), ([1, 2], 1)])
    inst = Instance.build(["a", "b", "c"], [["a", "b", "c"]], [crossing])
    assert "blocks not disjoint" in validate_instance(inst)
    assert not crossing.matroid


def test_gallery_entries_validate():
    for gid in ["ex1", "ex2", "sec41-caution", "footnote1", "thm4", "thm5"]:
        assert validate_instance(gallery(gid).instance) == []


def test_lottery_rejects_bad_support():
    with pytest.raises(ValueError):
        Lottery(((HALF, (1, 2)),))
    with pytest.raises(ValueError):
        Lottery(((Fraction(1), (1, 1)),))
    with pytest.raises(ValueError):
        Lottery(((HALF, (1, 2)), (HALF, (1, 2))))


def test_from_pairs_merges_duplicates():
    lot = Lottery.from_pairs([(HALF, (1, 2)), (HALF, (1, 2)), (0, (2, 1))])
    assert lot.support == ((Fraction(1), (1, 2)),)


def test_induced_fractional():
    lot = Lottery(((HALF, (0b01, 0b10)), (HALF, (0b10, 0b01))))
    assert induced_fractional(lot, 2) == ((HALF, HALF), (HALF, HALF))


def test_enumerate_assignments_counts():
    inst = free_instance(2, ["a", "b"])
    # each item: nobody, agent 1 or agent 2
    assert len(enumerate_assignments(inst)) == 9
    assert len(enumerate_assignments(inst, maximal_only=True)) == 4
    assert all(is_assignment(inst, b) for b in enumerate_assignments(inst))


def test_enumerate_assignments_restrictions():
    inst = free_instance(2, ["a", "b"])
    out = enumerate_assignments(inst, allowed=[0b01, 0b11], required=[0, 0b10], covered=0b01)
    assert sorted(out) == [(0b01, 0b10), (0, 0b11)] or sorted(out) == sorted([(0b01, 0b10), (0, 0b11)])


def test_enumeration_guard():
    inst = free_instance(3, list("abcdefgh"))
    with pytest.raises(EnumerationTooLarge):
        enumerate_assignments(inst, limit=100)


def test_permuted_instance():
    inst = gallery("thm5").instance
    perm = inst.permuted([2, 0, 1])
    assert perm.prefs[0] == inst.prefs[2]
    assert perm.prefs[1] == inst.prefs[0]


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.integers(1, 5), st.integers(0, 3), st.integers(0, 3)), min_size=1, max_size=5))
def test_induced_rows_respect_unit_columns(raw):
    pairs = [(Fraction(w), (a & ~b, b)) for w, a, b in raw]
    total = sum(p for p, _ in pairs)
    lot = Lottery.from_pairs((p / total, b) for p, b in pairs)
    pi = induced_fractional(lot, 2)
    for e in range(2):
        assert 0 <= pi[0][e] + pi[1][e] <= 1
