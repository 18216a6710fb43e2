from fractions import Fraction

import pytest

from fairmat.domain import Lottery
from fairmat.instances import build_partition_reduction, gallery, gallery_ids
from fairmat.io import (
    instance_from_json,
    instance_to_json,
    lottery_from_json,
    lottery_to_json,
    matrix_from_json,
    matrix_to_json,
    rat,
)


@pytest.mark.parametrize("gid", [g for g in gallery_ids()])
def test_instance_round_trip(gid):
    inst = gallery(gid).instance
    assert instance_from_json(instance_to_json(inst)) == inst


def test_budget_round_trip_keeps_half_sum():
    inst = build_partition_reduction([1, 1, 3])
    obj = instance_to_json(inst)
    assert obj["constraints"][0]["budget"] == "5/2"
    assert instance_from_json(obj) == inst


def test_instance_format_matches_documented_shape():
    obj = instance_to_json(gallery("thm5").instance)
    assert obj["agents"] == 3
    assert obj["items"] == ["a", "b", "c", "d", "e"]
    assert obj["prefs"][0] == ["d", "a", "b", "c", "e"]
    assert obj["constraints"][0] == {"kind": "partition", "blocks": [{"items": ["a", "b", "c"], "cap": 1}]}


def test_matrix_and_lottery_round_trip():
    pi = ((Fraction(1, 2), Fraction(1)), (Fraction(1, 3), Fraction(0)))
    assert matrix_to_json(pi) == {"pi": [["1/2", "1"], ["1/3", "0"]]}
    assert matrix_from_json(matrix_to_json(pi)) == pi
    lot = Lottery(((Fraction(1, 2), (1, 2)), (Fraction(1, 2), (2, 1))))
    assert lottery_from_json(lottery_to_json(lot, ["a", "b"]), ["a", "b"]) == lot


def test_rational_parsing():
    assert rat("3/4") == Fraction(3, 4)
    assert rat(0.5) == Fraction(1, 2)
    assert rat(2) == 2
    with pytest.raises(ValueError):
        rat(True)


def test_bad_preferences_rejected():
    obj = instance_to_json(gallery("ex1").instance)
    obj["prefs"][0] = ["a", "a", "b", "c"]
    with pytest.raises(ValueError):
        instance_from_json(obj)
