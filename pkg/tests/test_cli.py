"""Command-line interface: exit codes, determinism, reports, exports."""

import json

import numpy as np
import pytest

from gridopt import instancefile
from gridopt.cli import main
from gridopt.gridtab import make_grid, make_table
from gridopt.model import (
    CONTINUOUS,
    InterpolantDef,
    LinConstraint,
    VarRef,
    build_problem,
    problem_size,
)


@pytest.fixture
def s1_path(tmp_path):
    path = tmp_path / "s1.json"
    assert main(["generate", "--scenario", "S1", "--seed", "7", "-o", str(path)]) == 0
    return path


def _tiny_instance(tmp_path, infeasible=False):
    g = make_grid([[0.0, 0.5, 1.0]])
    tab = make_table(g, [0.0, -1.0, 2.0])
    variables = [VarRef(0, CONTINUOUS, 0, 1), VarRef(1, CONTINUOUS, -10, 10)]
    cons = []
    if infeasible:
        cons.append(LinConstraint(((1.0, 1),), "<=", -5.0))
    ir = build_problem(
        variables, cons, [InterpolantDef(tab, (0,), 1)], objective=[(1.0, 1)]
    )
    path = tmp_path / "tiny.json"
    instancefile.save(str(path), ir)
    return path


class TestGenerate:
    def test_deterministic_bytes(self, tmp_path):
        a = tmp_path / "a.json"
        b = tmp_path / "b.json"
        assert main(["generate", "--scenario", "S1", "--seed", "7", "-o", str(a)]) == 0
        assert main(["generate", "--scenario", "S1", "--seed", "7", "-o", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_s9_metadata(self, tmp_path):
        p = tmp_path / "s9.json"
        assert main(["generate", "--scenario", "S9", "--seed", "1", "-o", str(p)]) == 0
        doc = json.loads(p.read_text())
        assert doc["scenario"]["wells"] == 9
        assert doc["scenario"]["manifolds"] == 2

    def test_invalid_scenario(self, tmp_path):
        code = main(
            ["generate", "--scenario", "S99", "--seed", "1", "-o", str(tmp_path / "x")]
        )
        assert code == 2


class TestSolve:
    def test_engines_agree(self, tmp_path):
        path = _tiny_instance(tmp_path)
        rep_a = tmp_path / "a.rep"
        rep_b = tmp_path / "b.rep"
        assert main(["solve", str(path), "--engine", "rfe", "--report", str(rep_a)]) == 0
        assert main(["solve", str(path), "--engine", "oracle", "--report", str(rep_b)]) == 0
        a = json.loads(rep_a.read_text())
        b = json.loads(rep_b.read_text())
        assert a["status"] == b["status"] == "Optimal"
        assert a["objective"] == pytest.approx(b["objective"], abs=1e-6)
        assert a["gap"] is not None and a["gap"] >= 0.0

    def test_infeasible_exit_code(self, tmp_path):
        path = _tiny_instance(tmp_path, infeasible=True)
        rep = tmp_path / "r.json"
        assert main(["solve", str(path), "--report", str(rep)]) == 3
        assert json.loads(rep.read_text())["status"] == "Infeasible"

    def test_time_limit_exit_code(self, s1_path, tmp_path):
        rep = tmp_path / "r.json"
        code = main(
            ["solve", str(s1_path), "--time-limit", "0.0", "--report", str(rep)]
        )
        assert code == 4
        assert json.loads(rep.read_text())["status"] == "TimeLimit"

    def test_parse_failure(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert main(["solve", str(bad)]) == 2
        assert main(["solve", str(tmp_path / "missing.json")]) == 2


class TestExport:
    def test_mps_column_count_matches_size(self, s1_path, tmp_path):
        out = tmp_path / "m.mps"
        assert main(["export", str(s1_path), "--format", "mps", "-o", str(out)]) == 0
        ir, _ = instancefile.load(str(s1_path))
        sz = problem_size(ir)
        text = out.read_text()
        cols = set()
        in_cols = False
        for line in text.splitlines():
            if line.startswith("COLUMNS"):
                in_cols = True
                continue
            if line.startswith(("RHS", "BOUNDS", "ENDATA")):
                in_cols = False
            if in_cols and line.startswith("    ") and "'MARKER'" not in line:
                cols.add(line.split()[0])
        assert len(cols) == sz.cols

    def test_1d_export_contains_identity_marginalization(self, tmp_path):
        path = _tiny_instance(tmp_path)
        out = tmp_path / "m.lp"
        assert main(["export", str(path), "--format", "lp", "-o", str(out)]) == 0
        text = out.read_text()
        # 1-D marginalization rows: each xi equals its single lambda
        assert "marg0_0_0" in text
        assert "xi0_0_0 - 1 lam0_0 = 0" in text

    def test_unsupported_format(self, s1_path, tmp_path):
        code = main(
            ["export", str(s1_path), "--format", "xlsx", "-o", str(tmp_path / "x")]
        )
        assert code == 2


class TestBench:
    def test_batch_summary(self, tmp_path, capsys):
        paths = [str(_tiny_instance(tmp_path))]
        p2 = tmp_path / "inf.json"
        paths.append(str(_tiny_instance(tmp_path.joinpath(), infeasible=False)))
        out_json = tmp_path / "bench.json"
        code = main(["bench", *paths, "--json", str(out_json)])
        assert code == 0
        rows = json.loads(out_json.read_text())
        assert len(rows) == len(paths)
        for row in rows:
            assert row["rfe"]["objective"] == pytest.approx(
                row["oracle"]["objective"], abs=1e-6
            )
        text = capsys.readouterr().out
        assert "mean rfe time" in text

    def test_mixed_statuses_preserved(self, tmp_path):
        ok = _tiny_instance(tmp_path)
        bad_dir = tmp_path / "d"
        bad_dir.mkdir()
        bad = _tiny_instance(bad_dir, infeasible=True)
        out_json = tmp_path / "bench.json"
        assert main(["bench", str(ok), str(bad), "--json", str(out_json)]) == 0
        rows = json.loads(out_json.read_text())
        assert rows[0]["rfe"]["status"] == "Optimal"
        assert rows[1]["rfe"]["status"] == "Infeasible"
