import json
import subprocess
import sys
from fractions import Fraction

import pytest

from fairmat.cli import run
from fairmat.io import instance_to_json
from fairmat.instances import gallery


def run_json(capsys, argv):
    code = run(argv + ["--json"])
    return code, json.loads(capsys.readouterr().out)


def test_solve_json_and_verify(capsys):
    code, out = run_json(capsys, ["solve", "--mechanism", "eating", "--instance", "gallery:ex2", "--verify"])
    assert code == 0
    assert out["pi"][0][:5] == ["1/2", "1/2", "1", "1/2", "0"]


def test_naive_ps_verify_reports_envy(capsys):
    code = run(["solve", "--mechanism", "naive-ps", "--instance", "gallery:ex2", "--verify"])
    assert code == 2
    assert "envies" in capsys.readouterr().out


def test_solve_decompose_then_verify_round_trip(tmp_path, capsys):
    out = tmp_path / "res.json"
    assert run(["solve", "--mechanism", "two-agent", "--instance", "gallery:ex1", "--decompose",
                "--emit", str(out)]) == 0
    capsys.readouterr()
    assert run(["verify", "--instance", "gallery:ex1", "--pi", str(out)]) == 0


def test_instance_file_input(tmp_path, capsys):
    path = tmp_path / "inst.json"
    path.write_text(json.dumps(instance_to_json(gallery("thm5").instance)))
    code, out = run_json(capsys, ["solve", "--mechanism", "anonymous", "--instance", str(path)])
    assert code == 0
    assert sum(Fraction(v) for row in out["pi"] for v in row) > 0


def test_decompose_infeasible_exits_3(tmp_path, capsys):
    inst = tmp_path / "npc.json"
    assert run(["reduce-partition", "--values", "1,1,3", "--emit", str(inst)]) == 0
    pi = tmp_path / "pi.json"
    pi.write_text(json.dumps({"pi": [["1/2"] * 3] * 2}))
    capsys.readouterr()
    assert run(["decompose", "--instance", str(inst), "--pi", str(pi)]) == 3


def test_precondition_failure_exits_3(capsys):
    assert run(["solve", "--mechanism", "two-agent", "--instance", "gallery:thm5"]) == 3


@pytest.mark.parametrize("argv", [
    ["solve", "--mechanism", "nope", "--instance", "gallery:ex1"],
    ["frobnicate"],
    ["solve"],
])
def test_usage_errors_exit_64(argv, capsys):
    assert run(argv) == 64


def test_certify_and_check(tmp_path, capsys):
    path = tmp_path / "t4.json"
    assert run(["certify", "--target", "thm4", "--emit", str(path)]) == 0
    assert run(["check-certificate", "--file", str(path)]) == 0
    data = json.loads(path.read_text())
    data["certificates"][1]["payload"]["multipliers"][1] = "1"
    path.write_text(json.dumps(data))
    assert run(["check-certificate", "--file", str(path)]) == 2


def test_certify_thm5_small(capsys):
    code, out = run_json(capsys, ["certify", "--target", "thm5", "--samples", "3"])
    assert code == 0
    assert out["undominated"] == 0 and out["verified"] is True


def test_gallery_listing(capsys):
    code, out = run_json(capsys, ["gallery", "--list"])
    assert code == 0
    assert "ex1" in json.dumps(out)


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "fairmat", "gallery", "--id", "ex1", "--json"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["items"] == ["a", "b", "c", "d"]
