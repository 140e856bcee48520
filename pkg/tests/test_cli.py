import csv

import pytest

from dsaplan.cli import main
from dsaplan.generate import general
from dsaplan.io import parse_solution, write_instance
from dsaplan.model import Semantics


@pytest.fixture
def instance(tmp_path):
    p = tmp_path / "inst.csv"
    write_instance(general(150, 1, alignments=[1, 4, 16]), p, Semantics.In, 32)
    return p


def test_plan_then_analyze(instance, tmp_path, capsys):
    sol = tmp_path / "sol.csv"
    assert main(["plan", str(instance), "-o", str(sol), "--iterations", "3", "--seed", "1"]) == 0
    offsets, makespan = parse_solution(sol)
    assert len(offsets) == 150 and makespan > 0
    assert main(["analyze", str(instance), str(sol)]) == 0
    out = capsys.readouterr().out
    assert "valid=true" in out


def test_analyze_invalid_exit_code(instance, tmp_path):
    sol = tmp_path / "bad.csv"
    sol.write_text("".join(f"{i},0\n" for i in range(150)) + "makespan=1\n")
    assert main(["analyze", str(instance), str(sol)]) == 2


def test_validation_failure_exit_code(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("semantics=Ex\n1,3,3,8\n")
    assert main(["plan", str(p)]) == 1


def test_convert(instance, tmp_path):
    out = tmp_path / "ex.csv"
    assert main(["convert", str(instance), "--to", "Ex", "-o", str(out)]) == 0
    assert out.read_text().startswith("semantics=Ex,start_address=32")


def test_bench_rows_and_timeout(instance, tmp_path):
    out = tmp_path / "rows.csv"
    assert main(["bench", str(instance), "--repeats", "3", "--iterations", "2",
                 "--csv-out", str(out)]) == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 3 and list(rows[0]) == ["benchmark", "run", "makespan", "F", "micros", "iterations"]
    assert main(["bench", str(instance), "--timeout", "0.001", "--csv-out", str(out)]) == 3
    assert list(csv.DictReader(out.open()))[0]["F"] == "Failed"


def test_bench_latency_mode(instance, capsys):
    assert main(["bench", str(instance), "--latency"]) == 0
    assert capsys.readouterr().out.count("\n") == 2


def test_score_and_hardness(instance, tmp_path, capsys):
    res = tmp_path / "race.csv"
    res.write_text("benchmark,allocator,F\nb,x,10\nb,y,FAIL\nb,z,3\n")
    assert main(["score", str(res)]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "benchmark,x,y,z" and out[-1] == "TOTAL,1,-2,2"
    assert main(["hardness", str(instance)]) == 0
    assert int(capsys.readouterr().out) >= 0
