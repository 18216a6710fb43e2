import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fairmat.domain import Lottery, Preference
from fairmat.errors import ConstraintsNotIdentical, NotAMatroid
from fairmat.exactlp.polytope import VREP, build_P
from fairmat.instances import RandomParams, gallery, random_instance
from fairmat.mechanisms import mech_eating, mech_naive_ps, mech_two_agent
from fairmat.sdrel import (
    Relation,
    ef_sufficient_matroid,
    is_sd_efficient,
    is_sd_envy_free,
    is_sd_envy_free_fractional,
    is_sd_proportional,
    sd_compare,
)
from fairmat.verify import check_feasible, decompose
from fairmat.verify.core import random_consistent_weights

from conftest import frac_rows

H = Fraction(1, 2)
PI1 = frac_rows([[H, H, H, H], [H, H, H, H]])
PI2 = frac_rows([[1, 1, 0, 0], [0, 0, 1, 0]])
PI3 = frac_rows([[0, 0, 1, 0], [1, 1, 0, 0]])


def prefix_sums(order, x):
    out, acc = [], Fraction(0)
    for e in order:
        acc += x[e]
        out.append(acc)
    return out


def test_sd_compare_cases():
    p = Preference((0, 1, 2))
    assert sd_compare(p, (1, 0, 0), (0, 1, 0)).relation == Relation.STRICTLY_DOMINATES
    assert sd_compare(p, (0, 1, 0), (1, 0, 0)).relation == Relation.DOMINATED_STRICTLY
    assert sd_compare(p, (H, H, 0), (H, H, 0)).relation == Relation.EQUAL
    v = sd_compare(p, (0, 1, 1), (1, 0, 0))
    assert v.relation == Relation.INCOMPARABLE and v.witness == 0


@settings(max_examples=200, deadline=None)
@given(st.permutations(range(4)),
       st.lists(st.fractions(0, 1, max_denominator=6), min_size=4, max_size=4),
       st.lists(st.fractions(0, 1, max_denominator=6), min_size=4, max_size=4))
def test_sd_compare_matches_prefix_sums(order, x, y):
    v = sd_compare(Preference(tuple(order)), x, y)
    diffs = [a - b for a, b in zip(prefix_sums(order, x), prefix_sums(order, y))]
    assert v.weakly_dominates == all(d >= 0 for d in diffs)
    assert (v.relation == Relation.EQUAL) == all(d == 0 for d in diffs)


def test_ex1_classification(ex1):
    for pi in (PI1, PI2, PI3):
        assert check_feasible(ex1, pi).feasible
        assert is_sd_efficient(ex1, pi).efficient
    assert is_sd_envy_free_fractional(ex1, PI1).satisfied
    assert not is_sd_envy_free_fractional(ex1, PI2).satisfied
    assert not is_sd_envy_free_fractional(ex1, PI3).satisfied
    mix = tuple(tuple((a + b) / 2 for a, b in zip(r2, r3)) for r2, r3 in zip(PI2, PI3))
    verdict = is_sd_efficient(ex1, mix)
    assert not verdict.efficient
    w = verdict.witness
    assert check_feasible(ex1, w).feasible
    assert w != mix
    for i in range(2):
        assert sd_compare(ex1.prefs[i], w[i], mix[i]).weakly_dominates


def test_ex1_mixture_is_dominated_by_all_halves(ex1):
    mix = frac_rows([[H, H, H, 0], [H, H, H, 0]])
    for i in range(2):
        assert sd_compare(ex1.prefs[i], PI1[i], mix[i]).relation == Relation.STRICTLY_DOMINATES


def test_fractional_envy_needs_identical_families(ex2):
    with pytest.raises(ConstraintsNotIdentical):
        is_sd_envy_free_fractional(ex2, [[0] * 7, [0] * 7])


def test_lottery_envy_uses_best_feasible_subbundle(ex2):
    # agent 2 holds e1, e2, e3 for sure; agent 1 can use at most two of them
    lot = Lottery.point((0, 0b0000111))
    rep = is_sd_envy_free(ex2, lot)
    assert rep.violations() == [(0, 1)]
    assert rep.pairs[(0, 1)].witness == 0
    assert rep.pairs[(1, 0)].satisfied


def test_matroid_predicates_reject_other_families():
    inst = gallery("thm4").instance
    with pytest.raises(NotAMatroid):
        ef_sufficient_matroid(inst, [[0] * 4, [0] * 4])
    with pytest.raises(NotAMatroid):
        is_sd_proportional(inst, [[0] * 4, [0] * 4])


def test_deterministic_point_efficiency_and_envy(ex1):
    inst = ex1
    assert is_sd_efficient(inst, frac_rows([[1, 1, 0, 0], [0, 0, 1, 0]])).efficient
    # leaving d unused when agent 1 could take it is wasteful
    assert not is_sd_efficient(inst, frac_rows([[1, 0, 0, 0], [0, 1, 1, 0]])).efficient


@pytest.mark.parametrize("seed", range(30))
def test_efficiency_verdict_independent_of_weights_and_representation(seed):
    """An sd-efficient point is optimal for every consistent welfare in both representations."""
    inst = random_instance(RandomParams(n=2, m=(2, 4)), seed)
    pi = mech_two_agent(inst).pi if seed % 2 else mech_naive_ps(inst).pi
    half = tuple(tuple(v / 2 for v in row) for row in pi)
    rng = random.Random(seed)
    V = build_P(inst, VREP, maximal_only=True)
    for point in (pi, half):
        base = is_sd_efficient(inst, point).efficient
        for _ in range(3):
            w = random_consistent_weights(inst, rng)
            assert is_sd_efficient(inst, point, weights=w, P=V).efficient == base
    assert is_sd_efficient(inst, pi).efficient
    assert not is_sd_efficient(inst, half).efficient or all(v == 0 for row in pi for v in row)


@pytest.mark.parametrize("seed", range(30))
def test_choice_condition_implies_lottery_envy_freeness(seed):
    inst = random_instance(RandomParams(n=(2, 3), m=(2, 5), identical_prefs=True), seed)
    pi = mech_eating(inst).pi
    lot = decompose(inst, pi)
    suff = ef_sufficient_matroid(inst, pi)
    rep = is_sd_envy_free(inst, lot)
    for pair, ok in suff.items():
        if ok:
            assert rep.pairs[pair].satisfied
