import json

import numpy as np
import pytest

from mpvc.cli import main, run_grid, _grid_points


def run(args):
    return main(args)


def test_solve_academic_from_local_min(tmp_path, capsys):
    code = run([
        "solve", "--problem", "academic", "--scheme", "lshaped",
        "--x0", "0,5", "--out", str(tmp_path),
    ])
    assert code == 0
    result = json.loads((tmp_path / "result.json").read_text())
    assert result["f"] == pytest.approx(10.0, abs=1e-6)
    assert result["outer_iterations"] <= 2
    assert result["grade"] in ("M", "S")


def test_solve_writes_trace(tmp_path):
    code = run([
        "solve", "--problem", "academic", "--scheme", "global",
        "--x0", "10,10", "--out", str(tmp_path),
    ])
    assert code == 0
    lines = (tmp_path / "trace.csv").read_text().strip().splitlines()
    assert lines[0] == "k,t,f,maxVio,fullVio,innerIters,eps"
    assert len(lines) >= 2
    result = json.loads((tmp_path / "result.json").read_text())
    np.testing.assert_allclose(result["x"], [0.0, 5.0], atol=1e-3)


def test_solve_direct_baseline_has_grade(tmp_path):
    code = run([
        "solve", "--problem", "academic", "--scheme", "none",
        "--x0", "10,10", "--out", str(tmp_path),
    ])
    result = json.loads((tmp_path / "result.json").read_text())
    assert "grade" in result and result["scheme"] == "none"
    assert code in (0, 1)


def test_unknown_problem_is_usage_error(tmp_path, capsys):
    code = run([
        "solve", "--problem", "nope", "--scheme", "global", "--out", str(tmp_path),
    ])
    assert code == 2


def test_check_reports(tmp_path):
    code = run([
        "check", "--problem", "academic", "--x0", "0,0", "--out", str(tmp_path),
    ])
    assert code == 0
    report = json.loads((tmp_path / "check.json").read_text())
    assert report["grade"] in ("M", "S")
    assert report["mpvc_licq"]["holds"]
    assert report["index_sets"]["I_0plus"] == [0, 1]


def test_check_weak_point(tmp_path):
    import math

    x = f"0,{5 * math.sqrt(2)}"
    run(["check", "--problem", "academic", "--x0", x, "--out", str(tmp_path)])
    report = json.loads((tmp_path / "check.json").read_text())
    assert report["grade"] == "Weak"


def test_check_interior_point(tmp_path):
    run(["check", "--problem", "academic", "--x0", "10,10", "--out", str(tmp_path)])
    report = json.loads((tmp_path / "check.json").read_text())
    assert report["grade"] == "NotWeak"


def test_grid_single_cell(tmp_path):
    code = run([
        "grid", "--problem", "academic", "--scheme", "global",
        "--grid", "0,0,1,5,5,1", "--out", str(tmp_path),
    ])
    assert code == 0
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["buckets"]["xstar"] == 1
    lines = (tmp_path / "grid.csv").read_text().strip().splitlines()
    assert len(lines) == 2


def test_grid_requires_spec(tmp_path):
    assert run(["grid", "--problem", "academic", "--out", str(tmp_path)]) == 2


def test_grid_reproducible(tmp_path):
    a = tmp_path / "a"
    b = tmp_path / "b"
    for out in (a, b):
        run([
            "grid", "--problem", "academic", "--scheme", "lshaped",
            "--grid=-2,8,3,-2,8,3", "--out", str(out), "--jobs", "2",
            "--seed", "7",
        ])
    assert (a / "grid.csv").read_bytes() == (b / "grid.csv").read_bytes()
    assert (a / "summary.json").read_bytes() == (b / "summary.json").read_bytes()


def test_grid_summary_matches_rows(tmp_path):
    points = _grid_points("-1,6,3,-1,6,3")
    rows, summary = run_grid("academic", "nonsmooth", points, jobs=1)
    for label, count in summary["buckets"].items():
        assert count == sum(1 for r in rows if r["bucket"] == label)
    assert summary["total_outer_iterations"] == sum(r["outer_iterations"] for r in rows)
