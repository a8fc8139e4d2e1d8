import csv
import io
import json

import numpy as np
import pytest

from moddouble.cli import EXIT_ERROR, EXIT_FAIL, EXIT_PASS, cmd_eval, main, parse_grid
from moddouble.errors import ConfigError
from moddouble.suites import RunConfig


def run(argv, capsys):
    code = main(argv)
    return code, capsys.readouterr()


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


@pytest.mark.parametrize("spec,n", [("x=-2:2:41", 41), ("x=0.3", 1), ("x=0:1:0", 0), ("x=0.1+0.2j", 1)])
def test_parse_grid(spec, n):
    name, values = parse_grid(spec)
    assert name == "x" and len(values) == n


@pytest.mark.parametrize("spec", ["x", "x=1:2", "x=a:b:3", "=1"])
def test_parse_grid_rejects(spec):
    with pytest.raises(ConfigError):
        parse_grid(spec)


def test_eval_gamma_csv(capsys):
    code, out = run(["eval", "gamma", "--grid", "x=-2:2:41", "--format", "csv"], capsys)
    assert code == EXIT_PASS
    table = rows(out.out)
    assert len(table) == 41
    assert all(float(r["error_estimate"]) < 1e-9 for r in table)
    assert all(r["status"] == "ok" for r in table)
    assert table[0]["b"] == "0.8" and table[0]["seed"] == "7"


def test_eval_rho_monotone(capsys):
    code, out = run(["eval", "rho", "--grid", "s=0:3:31", "--format", "csv"], capsys)
    vals = [float(r["Re"]) for r in rows(out.out)]
    assert code == EXIT_PASS
    assert np.all(np.diff(vals) > 0)


def test_eval_empty_grid(capsys):
    code, out = run(["eval", "gamma", "--grid", "x=0:1:0", "--format", "csv"], capsys)
    assert code == EXIT_PASS
    assert out.out.strip().splitlines() == ["x,Re,Im,error_estimate,status,b,seed"]


def test_eval_near_singularity_row():
    doc = cmd_eval("phi", ["x=0.4", "s=0.4"], RunConfig())
    assert doc["rows"][0]["status"].startswith("near_singularity")


def test_eval_kernel_needs_spins(capsys):
    code, out = run(["eval", "kernel_S", "--grid", "x1=0.1", "--grid", "x2=0.2", "--grid", "x3=0.3"], capsys)
    assert code == EXIT_ERROR


def test_eval_bad_grid_exit(capsys):
    code, out = run(["eval", "gamma", "--grid", "x=1:2"], capsys)
    assert code == EXIT_ERROR
    assert "ConfigError" in out.err


def test_check_dilog_passes(tmp_path, capsys):
    path = tmp_path / "d.json"
    code, out = run(["check", "dilog", "--out", str(path), "--quiet"], capsys)
    doc = json.loads(path.read_text())
    assert code == EXIT_PASS
    assert doc["kind"] == "check" and doc["passed"] and doc["schema_version"] == 1
    assert "wall_clock" not in path.read_text()


def test_check_tolerance_override_fails(tmp_path, capsys):
    code, _ = run(["check", "dilog", "--tol", "dilog=1e-30", "--quiet", "--out", str(tmp_path / "x.json")], capsys)
    assert code == EXIT_FAIL


def test_check_deterministic(tmp_path, capsys):
    path = tmp_path / "r.json"
    run(["check", "dilog", "--out", str(path), "--quiet"], capsys)
    first = path.read_bytes()
    run(["check", "dilog", "--out", str(path), "--quiet"], capsys)
    assert path.read_bytes() == first


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"schema_version": 1, "b": 1.3, "seed": 3}))
    path = tmp_path / "r.json"
    code, _ = run(["check", "algebra", "--config", str(cfg), "--seed", "4", "--out", str(path), "--quiet"], capsys)
    doc = json.loads(path.read_text())
    assert code == EXIT_PASS
    assert doc["config"]["b"] == 1.3 and doc["config"]["seed"] == 4


@pytest.mark.parametrize("content", ['{"schema_version": 1, "b": -1}', '{"schema_version": 1, "colour": 1}',
                                     '{"schema_version": 99}', "not json"])
def test_bad_config_exit(tmp_path, capsys, content):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(content)
    code, _ = run(["check", "dilog", "--config", str(cfg), "--quiet"], capsys)
    assert code == EXIT_ERROR


def test_report_merges_worst(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run(["check", "dilog", "--out", str(a), "--quiet"], capsys)
    run(["check", "dilog", "--b", "1.3", "--out", str(b), "--quiet"], capsys)
    code, out = run(["report", str(a), str(b)], capsys)
    doc = json.loads(out.out)
    assert code == EXIT_PASS and doc["kind"] == "summary"
    worst = {}
    for p in (a, b):
        for suite in json.loads(p.read_text())["suites"]:
            for case in suite["cases"]:
                for tag in case["tags"]:
                    worst[tag] = max(worst.get(tag, 0.0), case["residual"])
    got = {t["tag"]: t["worst_residual"] for t in doc["tags"]}
    assert got == pytest.approx(worst, rel=0, abs=0)
    assert "uncovered tags" in out.err


def test_report_empty(capsys):
    code, out = run(["report"], capsys)
    doc = json.loads(out.out)
    assert code == EXIT_PASS
    assert doc["tags"] == [] and doc["passed"]


def test_report_schema_mismatch(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"schema_version": 99, "kind": "check"}))
    code, out = run(["report", str(bad)], capsys)
    assert code == EXIT_ERROR
    assert "SchemaMismatch" in out.err


def test_report_missing_file(tmp_path, capsys):
    code, _ = run(["report", str(tmp_path / "nope.json")], capsys)
    assert code == EXIT_ERROR


def test_report_failed_input_exits_1(tmp_path, capsys):
    path = tmp_path / "f.json"
    run(["check", "dilog", "--tol", "dilog=1e-30", "--quiet", "--out", str(path)], capsys)
    code, _ = run(["report", str(path)], capsys)
    assert code == EXIT_FAIL
