import random
from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fairmat.domain import ConstraintFamily, Preference, membership
from fairmat.errors import NotAMatroid
from fairmat.instances import choice_example, random_explicit, random_laminar
from oracles import brute_rank, random_matroid
from fairmat.matroid import (
    RankOracle,
    ReducedRank,
    augmentation_check,
    choice,
    eat_capacity,
    in_matroid_polytope,
    max_feasible_size,
    reduced_rank_bruteforce,
)

F = Fraction


def random_box(rng, m):
    return [F(rng.choice([0, 1, 1, 2, 3, 4, 6]), 6) for _ in range(m)]


def test_choice_worked_example():
    fam, pref, x, _ = choice_example()
    assert choice(RankOracle(fam), pref, x) == (F(1, 2), F(1), F(1, 2), F(0))


def test_rank_requires_matroid():
    fam = ConstraintFamily.explicit(3, [[0], [1, 2]])
    with pytest.raises(NotAMatroid):
        RankOracle(fam).rank(0b111)


def test_max_feasible_size_non_matroid_families():
    fam = ConstraintFamily.explicit(3, [[0], [1, 2]])
    assert max_feasible_size(fam, 0b111) == 2
    assert max_feasible_size(fam, 0b011) == 1
    budget = ConstraintFamily.budget_family([1, 2, 3], F(3))
    for X in range(8):
        assert max_feasible_size(budget, X) == brute_rank(budget, X)


@pytest.mark.parametrize("seed", range(60))
def test_rank_matches_brute_force(seed):
    m = 1 + seed % 6
    fam = random_matroid(seed, m)
    orc = RankOracle(fam)
    for X in range(1 << m):
        assert orc.rank(X) == brute_rank(fam, X)


@pytest.mark.parametrize("seed", range(60))
def test_reduced_rank_dp_matches_definition(seed):
    rng = random.Random(seed)
    m = 1 + seed % 6
    fam = random_laminar(rng, m)
    orc = RankOracle(fam)
    x = random_box(rng, m)
    rr = ReducedRank(orc, x)
    for X in range(1 << m):
        assert rr(X) == reduced_rank_bruteforce(orc, x, X)


def lex_max_brute(fam, pref, x):
    """Lexicographic maximum over conv(F) below x via an exact vertex scan.

    Greedy on a polymatroid is lexicographically optimal, so this builds y
    item by item in preference order: each item takes the most it can while
    every subset stays under min over Y of r(Y) + x(X - Y).
    """
    m = fam.m
    rank = [brute_rank(fam, X) for X in range(1 << m)]

    def cap(X):
        return min(rank[Y] + sum((x[e] for e in range(m) if X >> e & 1 and not Y >> e & 1), F(0))
                   for Y in range(1 << m) if Y & ~X == 0)

    y = [F(0)] * m
    for e in pref.order:
        room = x[e]
        for X in range(1 << m):
            if X >> e & 1:
                used = sum((y[f] for f in range(m) if X >> f & 1), F(0))
                room = min(room, cap(X) - used)
        y[e] = room
    return tuple(y)


@pytest.mark.parametrize("seed", range(40))
def test_choice_matches_greedy_reference(seed):
    rng = random.Random(1000 + seed)
    m = 1 + seed % 5
    fam = random_matroid(seed, m)
    order = list(range(m))
    rng.shuffle(order)
    pref = Preference(tuple(order))
    x = random_box(rng, m)
    y = choice(RankOracle(fam), pref, x)
    assert y == lex_max_brute(fam, pref, x)
    assert all(0 <= a <= b for a, b in zip(y, x))


@pytest.mark.parametrize("seed", range(40))
def test_eat_capacity_matches_min_slack(seed):
    rng = random.Random(2000 + seed)
    m = 1 + seed % 5
    fam = random_laminar(rng, m)
    orc = RankOracle(fam)
    # a point of conv(F): average of two feasible sets
    feas = [S for S in range(1 << m) if membership(fam, S)]
    A, B = rng.choice(feas), rng.choice(feas)
    x = [F((A >> e & 1) + (B >> e & 1), 2) for e in range(m)]
    for e in range(m):
        expected = min(brute_rank(fam, X) - sum((x[f] for f in range(m) if X >> f & 1), F(0))
                       for X in range(1 << m) if X >> e & 1)
        got = eat_capacity(orc, x, e)
        assert got == expected
        bumped = list(x)
        bumped[e] += got
        assert in_matroid_polytope(orc, bumped)


def test_augmentation_detects_known_families():
    # graphic matroid of a triangle: any two edges
    assert augmentation_check(ConstraintFamily.explicit(3, [[0, 1], [0, 2], [1, 2]]))
    assert not augmentation_check(ConstraintFamily.explicit(4, [[0, 1], [2]]))
    assert not augmentation_check(ConstraintFamily.explicit(3, [[0], [1, 2]]))


def augmentation_brute(fam):
    feas = [S for S in range(1 << fam.m) if membership(fam, S)]
    for X in feas:
        for Y in feas:
            if bin(Y).count("1") > bin(X).count("1"):
                if not any(Y >> e & 1 and not X >> e & 1 and membership(fam, X | 1 << e) for e in range(fam.m)):
                    return False
    return True


@pytest.mark.parametrize("seed", range(80))
def test_augmentation_check_matches_all_pairs(seed):
    rng = random.Random(3000 + seed)
    fam = random_explicit(rng, 1 + seed % 5)
    assert fam.matroid == augmentation_brute(fam)


def test_rank_monotone_submodular_exhaustive_small():
    for seed in range(12):
        m = 8 if seed < 4 else 3 + seed % 5
        fam = random_matroid(seed, m)
        r = RankOracle(fam).rank
        full = (1 << m) - 1
        for X in range(1 << m):
            rx = r(X)
            assert 0 <= rx <= bin(X).count("1")
            for e in range(m):
                if not X >> e & 1:
                    assert r(X | 1 << e) - rx in (0, 1)
        # submodularity in the diminishing-returns form, which is equivalent
        for X in range(1 << m):
            for e, f in combinations([g for g in range(m) if not X >> g & 1], 2):
                assert r(X | 1 << e) + r(X | 1 << f) >= r(X | 1 << e | 1 << f) + r(X)
        assert r(full) == max(bin(S).count("1") for S in range(1 << m) if membership(fam, S))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 5))
def test_choice_is_feasible_and_below_box(seed, m):
    rng = random.Random(seed)
    fam = random_laminar(rng, m)
    orc = RankOracle(fam)
    x = random_box(rng, m)
    order = list(range(m))
    rng.shuffle(order)
    y = choice(orc, Preference(tuple(order)), x)
    assert in_matroid_polytope(orc, y)
    assert all(0 <= a <= b for a, b in zip(y, x))
    # choice has total mass equal to the reduced rank of the ground set
    assert sum(y) == ReducedRank(orc, x)((1 << m) - 1)
