import csv
import json

import numpy as np
import pytest

from staropt.cli import main
from staropt.discrepancy import exact_star_discrepancy
from staropt.fileio import load_points, load_vector
from staropt.sequence import GeneratingVector, generate


def run_cli(*argv):
    return main([str(a) for a in argv])


def test_generate_to_stdout_and_file(tmp_path, capsys):
    assert run_cli("generate", "-d", 2, "-n", 3) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "# 3 2"
    assert len(out) == 4
    path = tmp_path / "pts.txt"
    assert run_cli("generate", "-d", 2, "-n", 16, "--out", path) == 0
    points = load_points(path)
    np.testing.assert_array_equal(
        points.coords, generate(16, GeneratingVector.identity(2)).coords
    )


def test_generate_requires_one_source(tmp_path):
    with pytest.raises(SystemExit) as err:
        run_cli("generate", "-n", 4)
    assert err.value.code == 2


def test_evaluate_exact_output(tmp_path, capsys):
    path = tmp_path / "pts.txt"
    run_cli("generate", "-d", 2, "-n", 16, "--out", path)
    capsys.readouterr()
    assert run_cli("evaluate", "--points", path) == 0
    header, row = capsys.readouterr().out.splitlines()
    assert header == "value,kind,evaluations"
    value, kind, evals = row.split(",")
    expected = exact_star_discrepancy(generate(16, GeneratingVector.identity(2)))
    assert float(value) == expected.value
    assert kind == "exact"
    assert int(evals) > 0


def test_evaluate_ta_mode(capsys):
    assert run_cli(
        "evaluate", "-d", 3, "-n", 20, "--mode", "ta",
        "--runs", 2, "--iterations", 300, "--seed", 7,
    ) == 0
    _, row = capsys.readouterr().out.splitlines()
    value, kind, _ = row.split(",")
    assert kind == "lower_bound"
    assert 0.0 <= float(value) <= 1.0


def test_evaluate_budget_exit_code(capsys):
    assert run_cli("evaluate", "-d", 4, "-n", 50, "--budget", 100) == 4
    assert "budget" in capsys.readouterr().err


def test_budget_env_override(monkeypatch, capsys):
    monkeypatch.setenv("STAROPT_BUDGET", "100")
    assert run_cli("evaluate", "-d", 4, "-n", 50) == 4
    monkeypatch.setenv("STAROPT_BUDGET", "not-a-number")
    assert run_cli("evaluate", "-d", 2, "-n", 4) == 2
    capsys.readouterr()


def test_format_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "vec.json"
    bad.write_text("nope")
    assert run_cli("evaluate", "--vector", bad, "-n", 4) == 3
    assert "error" in capsys.readouterr().err


def test_optimize_run_directory(tmp_path, capsys):
    out = tmp_path / "run"
    assert run_cli(
        "optimize", "-d", 2, "-n", 8, "--mode", "exact", "--generations", 3,
        "--mu", 4, "--lambda", 6, "--seed", 5, "--out", out, "--quiet",
    ) == 0
    capsys.readouterr()
    for name in (
        "manifest.json", "history.csv", "results.csv",
        "best_vector.json", "best_points.txt", "archive.json",
    ):
        assert (out / name).exists()
    with open(out / "history.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 3
    assert [r["generation"] for r in rows] == ["1", "2", "3"]
    bests = [float(r["best"]) for r in rows]
    assert bests == sorted(bests, reverse=True)
    with open(out / "results.csv", newline="") as fh:
        (result,) = list(csv.DictReader(fh))
    vector = load_vector(out / "best_vector.json")
    points = load_points(out / "best_points.txt")
    assert points.n == 8 and points.d == 2
    assert exact_star_discrepancy(points).value == float(result["final_value"])
    np.testing.assert_array_equal(points.coords, generate(8, vector).coords)
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["command"] == "optimize"
    assert manifest["config"]["seed"] == 5
    with open(out / "archive.json") as fh:
        archive = json.load(fh)
    assert all((out / item["vector"]).exists() for item in archive)


def test_optimize_zero_generations(tmp_path, capsys):
    out = tmp_path / "run0"
    assert run_cli(
        "optimize", "-d", 2, "-n", 8, "--mode", "exact", "--generations", 0,
        "--mu", 4, "--lambda", 6, "--seed", 5, "--out", out, "--quiet",
    ) == 0
    capsys.readouterr()
    assert (out / "manifest.json").exists()
    with open(out / "history.csv", newline="") as fh:
        assert list(csv.DictReader(fh)) == []
    with open(out / "results.csv", newline="") as fh:
        (result,) = list(csv.DictReader(fh))
    assert int(result["evaluations"]) == 4
    points = load_points(out / "best_points.txt")
    assert exact_star_discrepancy(points).value == float(result["final_value"])


def test_replay_reproduces_run_byte_for_byte(tmp_path, capsys):
    first = tmp_path / "first"
    assert run_cli(
        "optimize", "-d", 2, "-n", 8, "--mode", "exact", "--generations", 2,
        "--mu", 3, "--lambda", 6, "--seed", 1, "--out", first, "--quiet",
    ) == 0
    second = tmp_path / "second"
    assert run_cli("replay", first / "manifest.json", "--out", second) == 0
    capsys.readouterr()
    for name in ("history.csv", "results.csv", "best_vector.json", "best_points.txt"):
        assert (first / name).read_bytes() == (second / name).read_bytes()


def test_inverse_run_directory(tmp_path, capsys):
    out = tmp_path / "inv"
    assert run_cli(
        "inverse", "-d", 2, "--epsilon", 0.2, "--n-min", 4, "--n-max", 24,
        "--mode", "exact", "--generations", 2, "--mu", 4, "--lambda", 6,
        "--seed", 2, "--out", out, "--quiet",
    ) == 0
    stdout = capsys.readouterr().out
    assert "smallest verified n" in stdout
    with open(out / "pareto.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert rows
    for row in rows:
        n = int(row["n"])
        assert 4 <= n <= 24
        assert float(row["final_value"]) <= 0.2 or row["meets_epsilon"] == "False"
        vector = load_vector(out / row["vector_file"])
        value = exact_star_discrepancy(generate(n, vector)).value
        assert value == float(row["discrepancy"])
        assert row["kind"] == "exact"


def test_report_renders_figures(tmp_path, capsys):
    out = tmp_path / "run"
    run_cli(
        "optimize", "-d", 2, "-n", 8, "--mode", "exact", "--generations", 2,
        "--mu", 3, "--lambda", 6, "--seed", 1, "--out", out, "--quiet",
    )
    capsys.readouterr()
    assert run_cli("report", out) == 0
    assert (out / "history.png").exists()
    listed = capsys.readouterr().out
    assert "history.png" in listed
    empty = tmp_path / "empty"
    empty.mkdir()
    assert run_cli("report", empty) == 2


def test_baseline_table(tmp_path, capsys):
    path = tmp_path / "baseline.csv"
    assert run_cli(
        "baseline", "-d", 2, "-d", 3, "-n", 8, "-n", 16, "--out", path,
    ) == 0
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 4
    for row in rows:
        d, n = int(row["dimension"]), int(row["count"])
        expected = exact_star_discrepancy(generate(n, GeneratingVector.identity(d)))
        assert float(row["value"]) == expected.value
        assert row["kind"] == "exact"
    assert run_cli("report", tmp_path) == 0
    assert (tmp_path / "baseline.png").exists()
