import json

import pytest

from cli import EXIT_ERROR, EXIT_NEGATIVE, EXIT_OK, main
from instance_service import load_instance
from counterexamples import get_fixture


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_classify(capsys, instances_dir):
    code, out, _ = run(capsys, "classify", str(instances_dir / "contiguous.json"))
    assert code == EXIT_OK
    assert "contiguous: yes (path 1-2-3-4-5-6" in out
    assert "laminar: no" in out


def test_classify_writes_report(capsys, instances_dir, tmp_path):
    target = tmp_path / "report.json"
    code, _, _ = run(capsys, "classify", str(instances_dir / "nested_laminar.json"), "--out", str(target))
    assert code == EXIT_OK
    report = json.loads(target.read_text())
    assert report["laminar"] is True and report["partition"] is False


@pytest.mark.parametrize("notion, expected", [
    ("super-strong", EXIT_NEGATIVE),
    ("nash", EXIT_OK),
    (None, EXIT_NEGATIVE),
])
def test_check_example1(capsys, instances_dir, notion, expected):
    argv = ["check", str(instances_dir / "example1.json"), "--allocation", "1,2|3"]
    if notion:
        argv += ["--notion", notion]
    code, out, _ = run(capsys, *argv)
    assert code == expected
    assert ("unstable: coalition {1,2}" in out) == (expected == EXIT_NEGATIVE)


def test_check_writes_json(capsys, instances_dir, tmp_path):
    target = tmp_path / "check.json"
    run(capsys, "check", str(instances_dir / "example1.json"), "--allocation", "1,2|3", "--out", str(target))
    report = json.loads(target.read_text())
    assert report["stable"] is False
    assert report["coalition"] == [1, 2]


def test_malformed_instance_exits_with_error(capsys, tmp_path):
    broken = tmp_path / "broken.json"
    broken.write_text("{\"agents\": 2, \"resources\": [{\"costs\": [1]}]}")
    code, _, err = run(capsys, "check", str(broken), "--allocation", "1|2")
    assert code == EXIT_ERROR
    assert "resources.0.costs" in err
    code, _, _ = run(capsys, "classify", str(tmp_path / "missing.json"))
    assert code == EXIT_ERROR


def test_solve_without_equilibrium(capsys, instances_dir):
    code, out, _ = run(capsys, "solve", str(instances_dir / "centralized.json"), "--notion", "centralized")
    assert code == EXIT_NEGATIVE
    assert "none: 32/32" in out
    assert len([line for line in out.splitlines() if " -> " in line]) == 32


def test_solve_round_robin(capsys, instances_dir):
    code, out, _ = run(capsys, "solve", str(instances_dir / "identical_contiguous.json"))
    assert code == EXIT_OK
    assert out.splitlines()[1].startswith("round-robin: ")


def test_solve_budget(capsys, instances_dir):
    code, _, err = run(capsys, "solve", str(instances_dir / "example1.json"), "--notion", "super-strong",
                       "--budget", "2")
    assert code == EXIT_ERROR
    assert "BudgetExceededError" in err


@pytest.mark.parametrize("name", ["example1", "contiguous", "centralized"])
def test_refute_fixture(capsys, name):
    code, _, _ = run(capsys, "refute", name)
    assert code == EXIT_OK


def test_refute_file_with_stable_allocation(capsys, instances_dir):
    code, _, _ = run(capsys, "refute", str(instances_dir / "example1.json"), "--notion", "nash")
    assert code == EXIT_NEGATIVE


@pytest.mark.slow
def test_refute_example2(capsys, tmp_path):
    target = tmp_path / "refute.json"
    code, out, _ = run(capsys, "refute", "example2", "--samples", "30", "--out", str(target))
    assert code == EXIT_OK
    witness = next(line for line in out.splitlines() if "construct_nash" in line)
    assert len(witness) < 2000
    assert json.loads(target.read_text())["refuted"] == 31


def test_reproduce_single_cell(capsys, tmp_path):
    target = tmp_path / "table.json"
    code, out, _ = run(capsys, "reproduce", "--cell", "contiguous:identical", "--samples", "5",
                       "--seed", "7", "--out", str(target))
    assert code == EXIT_OK
    assert "[*] reproduce seed=7" in out
    data = json.loads(target.read_text())
    assert data["matrix"]["contiguous"] == {"identical": "+"}


def test_reproduce_unknown_cell(capsys):
    code, _, _ = run(capsys, "reproduce", "--cell", "bogus")
    assert code == EXIT_ERROR


@pytest.mark.parametrize("agents", ["3", "4"])
def test_hierarchy_demo(capsys, agents):
    code, out, _ = run(capsys, "hierarchy-demo", "--agents", agents)
    assert code == EXIT_OK
    assert "[FEHLER]" not in out


def test_export_fixture(capsys, tmp_path):
    target = tmp_path / "contiguous.json"
    code, _, _ = run(capsys, "export-fixture", "contiguous", "--out", str(target))
    assert code == EXIT_OK
    instance = load_instance(target)
    fixture = get_fixture("contiguous")
    assert instance.structure == fixture.structure
    assert instance.game == fixture.game
    assert instance.path == fixture.path


def test_unknown_command_exits_via_argparse():
    with pytest.raises(SystemExit):
        main(["frobnicate"])
