import csv
import json

import pytest

from unclonable import cli


def run_cli(tmp_path, *argv, name="r"):
    out, table = tmp_path / f"{name}.json", tmp_path / f"{name}.csv"
    code = cli.main([*argv, "--out", str(out), "--csv", str(table)])
    return code, out, table


def test_parse_lambda():
    assert cli.parse_lambda("4") == [4]
    assert cli.parse_lambda("1..6") == [1, 2, 3, 4, 5, 6]
    for bad in ("x", "3..1", "1..2..3"):
        with pytest.raises(cli.ConfigError):
            cli.parse_lambda(bad)


def test_sweep_report_and_csv(tmp_path):
    code, out, table = run_cli(tmp_path, "--experiment", "moe-wiesner", "--lambda", "1..3", "--trials", "200", "--threads", "1")
    assert code == 0
    rep = json.loads(out.read_text(encoding="utf-8"))
    assert rep["config"] == {"experiment": "moe-wiesner", "lambda": [1, 2, 3], "seed": 0, "strategy": "breidbart", "trials": 200}
    assert rep["version"] and "wall_clock_s" not in rep
    assert [r["lambda"] for r in rep["results"]] == [1, 2, 3]
    rows = list(csv.DictReader(table.open()))
    assert list(rows[0]) == ["param", "estimate", "sigma", "trials"]
    assert [int(r["param"]) for r in rows] == [1, 2, 3]
    assert float(rows[0]["estimate"]) == rep["results"][0]["estimate"]


@pytest.mark.parametrize(
    "argv",
    [
        ["--experiment", "moe-coset", "--lambda", "4", "--trials", "64"],
        ["--experiment", "haar-attack", "--lambda", "4", "--trials", "16"],
        ["--experiment", "piracy", "--lambda", "3", "--trials", "40", "--inputs", "correlated:0.5"],
        ["--experiment", "haar-statistic", "--qubits", "8", "--trials", "20"],
    ],
)
def test_byte_identical_across_threads(tmp_path, argv):
    c1, a, ac = run_cli(tmp_path, *argv, "--threads", "1", name="a")
    c2, b, bc = run_cli(tmp_path, *argv, "--threads", "3", name="b")
    assert c1 == c2 == 0
    assert a.read_bytes() == b.read_bytes()
    assert ac.read_bytes() == bc.read_bytes()


def test_timing_flag(tmp_path):
    code, out, _ = run_cli(tmp_path, "--experiment", "jordan", "--trials", "3", "--timing")
    assert code == 0
    assert json.loads(out.read_text())["wall_clock_s"] >= 0


def test_jordan_block_table(tmp_path):
    code, out, table = run_cli(tmp_path, "--experiment", "jordan", "--trials", "4", "--seed", "3")
    rec = json.loads(out.read_text())["results"][0]
    assert rec["max_two_dim_sum_error"] <= 1e-9
    rows = list(csv.DictReader(table.open()))
    assert rows and set(rows[0]) == {"pair", "pair_dim", "block", "block_dim", "angle", "eigenvalues"}
    assert len(rows) == rec["blocks"]


def test_other_experiments_run(tmp_path):
    for argv in (
        ["--experiment", "cp-correctness", "--lambda", "2", "--trials", "20"],
        ["--experiment", "bbbv", "--trials", "8", "--eps", "0.2"],
        ["--experiment", "reprogram", "--lambda", "2", "--trials", "20", "--mode", "independent", "--wiring", "true"],
        ["--experiment", "strengthened-moe", "--lambda", "2", "--trials", "20", "--n-bits", "3"],
        ["--experiment", "direct-product", "--lambda", "2", "--trials", "20"],
        ["--experiment", "ind-cpa", "--lambda", "2", "--trials", "20", "--variant", "bl", "--msg-bits", "2"],
    ):
        code, out, _ = run_cli(tmp_path, *argv, "--threads", "1")
        assert code == 0, argv
        assert json.loads(out.read_text())["config"]["experiment"] == argv[1]


@pytest.mark.parametrize(
    "argv,code",
    [
        (["--experiment", "moe-coset", "--lambda", "3"], 2),
        (["--experiment", "moe-wiesner", "--trials", "0"], 2),
        (["--experiment", "ind-cpa", "--strategy", "nope"], 2),
        (["--experiment", "piracy", "--inputs", "product:2,1"], 2),
        (["--experiment", "bbbv", "--eps", "x"], 2),
        (["--experiment", "moe-wiesner", "--lambda", "1..13"], 3),
        (["--experiment", "reprogram", "--lambda", "10"], 3),
        (["--experiment", "haar-attack", "--lambda", "14"], 3),
        (["--experiment", "haar-statistic", "--qubits", "18"], 3),
    ],
)
def test_exit_codes(tmp_path, argv, code):
    got, out, _ = run_cli(tmp_path, *argv)
    assert got == code
    assert not out.exists()


def test_argparse_errors_exit_2():
    with pytest.raises(SystemExit) as e:
        cli.main(["--experiment", "nope"])
    assert e.value.code == 2
