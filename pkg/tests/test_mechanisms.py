import random
from fractions import Fraction

import numpy as np
import pytest

from fairmat.domain import ConstraintFamily, Instance
from fairmat.errors import NotAMatroid, NotIdenticalAgents, PreferencesNotIdentical, WrongAgentCount
from fairmat.instances import RandomParams, gallery, random_instance
from fairmat.mechanisms import (
    MECHANISMS,
    SD_EFFICIENT,
    brute_lex_max_union,
    lex_max_union,
    matroid_partitionable,
    mech_anonymous,
    mech_eating,
    mech_naive_ps,
    mech_rotation,
    mech_two_agent,
    partition_into,
    snap,
)
from fairmat.matroid import RankOracle
from fairmat.sdrel import ef_sufficient_matroid, is_sd_efficient, is_sd_proportional, sd_compare
from fairmat.verify import check_feasible

from conftest import HALF, frac_rows, free_instance


def test_naive_ps_ex2(ex2):
    pi = mech_naive_ps(ex2).pi
    assert pi == frac_rows([[HALF, HALF, 1, 0, 0, 1, HALF], [HALF, HALF, 0, 1, 1, 0, HALF]])


def test_eating_ex2(ex2):
    res = mech_eating(ex2)
    assert res.pi == frac_rows([[HALF, HALF, 1, HALF, 0, HALF, HALF], [HALF, HALF, 0, HALF, 1, HALF, HALF]])
    assert SD_EFFICIENT in res.guarantees and res.mechanism == "eating"


def test_two_agent_ex2_passes_checks(ex2):
    pi = mech_two_agent(ex2).pi
    assert check_feasible(ex2, pi).feasible
    assert is_sd_efficient(ex2, pi).efficient
    assert all(ef_sufficient_matroid(ex2, pi).values())
    assert is_sd_proportional(ex2, pi)


def test_two_agent_avoids_caution_trap():
    inst = gallery("sec41-caution").instance
    pi = mech_two_agent(inst).pi
    other = frac_rows([[1, 0, 1], [0, 1, 0]])
    verdicts = [sd_compare(inst.prefs[i], other[i], pi[i]) for i in range(2)]
    dominated = all(v.weakly_dominates for v in verdicts) and any(v.relation != "equal" for v in verdicts)
    assert not dominated


def test_precondition_errors():
    three = gallery("thm5").instance
    with pytest.raises(WrongAgentCount):
        mech_two_agent(three)
    with pytest.raises(NotAMatroid):
        mech_two_agent(gallery("thm4").instance)
    with pytest.raises(PreferencesNotIdentical):
        mech_eating(gallery("sec41-caution").instance)
    with pytest.raises(NotIdenticalAgents):
        mech_rotation(gallery("ex2").instance)


def test_registry_names():
    assert set(MECHANISMS) == {"two-agent", "eating", "rotation", "naive-ps", "anonymous"}
    for name, fn in MECHANISMS.items():
        if name in ("eating", "naive-ps", "two-agent"):
            assert fn(gallery("ex1").instance).mechanism == name


@pytest.mark.parametrize("seed", range(25))
def test_eating_commutes_with_agent_permutation(seed):
    inst = random_instance(RandomParams(n=3, m=(2, 5), identical_prefs=True), seed)
    perm = [2, 0, 1]
    pi = mech_eating(inst).pi
    assert mech_eating(inst.permuted(perm)).pi == tuple(pi[p] for p in perm)


@pytest.mark.parametrize("seed", range(25))
def test_eating_commutes_with_item_relabelling(seed):
    inst = random_instance(RandomParams(n=(2, 3), m=(2, 5), identical_prefs=True), seed)
    m = inst.m
    rng = random.Random(seed)
    sigma = list(range(m))
    rng.shuffle(sigma)  # item e becomes sigma[e]

    def move(mask):
        return sum(1 << sigma[e] for e in range(m) if mask >> e & 1)

    fams = [ConstraintFamily.partition(m, [(move(b), c) for b, c in f.blocks]) for f in inst.constraints]
    labels = [None] * m
    for e in range(m):
        labels[sigma[e]] = inst.labels[e]
    prefs = [[inst.labels[e] for e in p.order] for p in inst.prefs]
    moved = Instance.build(labels, prefs, fams)
    pi, qi = mech_eating(inst).pi, mech_eating(moved).pi
    for i in range(inst.n):
        assert all(pi[i][e] == qi[i][sigma[e]] for e in range(m))


@pytest.mark.parametrize("seed", range(20))
def test_naive_ps_equals_eating_without_constraints(seed):
    rng = random.Random(seed)
    m = rng.randint(1, 5)
    labels = [f"x{e}" for e in range(m)]
    order = labels[:]
    rng.shuffle(order)
    inst = free_instance(rng.randint(2, 4), labels, None)
    inst = Instance.build(labels, [order] * inst.n, inst.constraints)
    assert mech_naive_ps(inst).pi == mech_eating(inst).pi


def test_eating_one_item_splits_evenly():
    inst = free_instance(3, ["a"])
    assert mech_eating(inst).pi == frac_rows([[Fraction(1, 3)]] * 3)


def test_rotation_three_agents():
    fam = ConstraintFamily.partition(5, [([0, 1, 2], 1)])
    labels = list("abcde")
    inst = Instance.build(labels, [labels] * 3, [fam] * 3)
    res = mech_rotation(inst)
    assert all(v == Fraction(1, 3) for row in res.pi for v in row[:3])
    assert len(set(res.pi)) == 1
    assert res.lottery is not None and len(res.lottery.support) <= 3
    assert res.provenance["assigned"] == brute_lex_max_union(inst)


@pytest.mark.parametrize("seed", range(30))
def test_matroid_partitionability_matches_search(seed):
    rng = random.Random(seed)
    inst = random_instance(RandomParams(n=1, m=(1, 6)), seed)
    fam = inst.constraints[0]
    n = rng.randint(1, 3)
    for S in range(1 << inst.m):
        assert matroid_partitionable(RankOracle(fam), n, S) == (partition_into(fam, n, S) is not None)


@pytest.mark.parametrize("seed", range(20))
def test_lex_max_union_non_matroid(seed):
    params = RandomParams(n=(2, 3), m=(2, 5), family="explicit", identical_prefs=True, identical_constraints=True)
    inst = random_instance(params, seed)
    kept, split = lex_max_union(inst)
    assert kept == brute_lex_max_union(inst)
    assert all(inst.constraints[0].contains(b) for b in split)


def test_snap():
    assert snap(np.array([[0.3333333334, 0.5000000001]])) == ((Fraction(1, 3), HALF),)


def test_anonymous_single_item():
    inst = free_instance(2, ["a"])
    res = mech_anonymous(inst)
    assert np.allclose(res.provenance["approx"][:, 0], [0.5, 0.5], atol=1e-6)
    assert res.pi == frac_rows([[HALF], [HALF]])


def test_anonymous_ex1(ex1):
    res = mech_anonymous(ex1)
    assert res.provenance["snapped"]
    assert is_sd_efficient(ex1, res.pi).efficient
    swapped = mech_anonymous(ex1.permuted([1, 0]))
    assert abs(res.provenance["objective"] - swapped.provenance["objective"]) < 2e-9
