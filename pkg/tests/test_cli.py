import json
from pathlib import Path

import numpy as np
import pytest

from conelab.cli import EXIT_CONFIG, EXIT_IO, EXIT_OK, EXIT_SCALE, main


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_estimate_json(capsys):
    code, out, err = run(["estimate", "--catalog", "circle", "--point", "1,0", "--kinds", "Tan-"], capsys)
    assert code == EXIT_OK
    rep = json.loads(out)
    assert rep["schema_version"] == "1.0" and len(rep["cones"]) == 1
    assert rep["cones"][0]["kind"] == "Tan-"
    assert "directions" in err


def test_estimate_csv_to_file(tmp_path, capsys):
    path = tmp_path / "sub" / "cones.csv"
    code, _, _ = run(["estimate", "--catalog", "circle", "--point-index", "0", "--format", "csv",
                      "-o", path], capsys)
    assert code == EXIT_OK
    lines = path.read_text().splitlines()
    assert lines[0] == "point,kind,direction,score,member"
    assert len(lines) > 4
    assert not [p for p in path.parent.iterdir() if p.name.endswith(".tmp")]


def test_classify_deterministic(tmp_path, capsys):
    argv = ["classify", "--catalog", "circle", "--theorem", "valiron", "--seed", "3"]
    code, a, err = run(argv, capsys)
    assert code == EXIT_OK and "pass" in err
    _, b, _ = run(argv, capsys)
    assert a == b
    assert json.loads(a)["verdict"] == "pass"


def test_classify_fail_verdict_still_exit_zero(capsys):
    code, out, _ = run(["classify", "--catalog", "cusp-y3x2", "--theorem", "valiron", "--point", "0,0"], capsys)
    assert code == EXIT_OK
    assert json.loads(out)["verdict"] == "fail"


def test_seed_env_and_flag_precedence(monkeypatch, capsys):
    monkeypatch.setenv("CONELAB_SEED", "11")
    _, out, _ = run(["estimate", "--catalog", "circle", "--random-k", "1", "--kinds", "Tan-"], capsys)
    assert json.loads(out)["seed"] == 11
    _, out, _ = run(["estimate", "--catalog", "circle", "--random-k", "1", "--kinds", "Tan-",
                     "--seed", "5"], capsys)
    assert json.loads(out)["seed"] == 5


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"catalog": "circle", "points": [[0.0, 1.0]], "grid_count": 90}))
    code, out, _ = run(["estimate", "--config", cfg, "--kinds", "pTan+"], capsys)
    assert code == EXIT_OK
    assert len(json.loads(out)["cones"][0]["directions"]) == 90


def test_csv_input(tmp_path, capsys):
    t = np.linspace(0, 2 * np.pi, 2000, endpoint=False)
    pts = tmp_path / "ring.csv"
    np.savetxt(pts, np.c_[np.cos(t), np.sin(t)], delimiter=",")
    code, out, _ = run(["classify", "--input", pts, "--delta", 0.005, "--theorem", "valiron",
                        "--point-index", "0,500"], capsys)
    assert code == EXIT_OK
    assert json.loads(out)["verdict"] == "pass"


def test_error_exit_codes(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("1,2\n3,x\n")
    assert run(["estimate", "--input", bad, "--delta", 0.1], capsys)[0] == EXIT_IO
    assert run(["estimate", "--input", tmp_path / "missing.csv", "--delta", 0.1], capsys)[0] == EXIT_IO
    assert run(["estimate", "--catalog", "circle", "--lam0", 1e-9, "--point", "1,0"], capsys)[0] == EXIT_SCALE
    assert run(["estimate", "--catalog", "no-such-set"], capsys)[0] == EXIT_CONFIG
    assert run(["liegroup", "--group", "nope"], capsys)[0] == EXIT_CONFIG
    assert run(["estimate", "--catalog", "circle", "--point", "1,0,0"], capsys)[0] == EXIT_CONFIG


def test_liegroup(tmp_path, capsys):
    path = tmp_path / "so2.json"
    code, _, err = run(["liegroup", "--group", "SO2", "--identity-cones", "-o", path], capsys)
    assert code == EXIT_OK and "algebra dim 1" in err
    rep = json.loads(path.read_text())
    assert rep["dim"] == 1 and rep["angle"] < 0.05
    assert rep["identity_cones"]["passed"]


def test_angle_ops(capsys):
    _, out, _ = run(["angle", "angle", "--a", "[[1,0,0]]", "--b", "[[1,1,0]]"], capsys)
    assert json.loads(out)["angle"] == pytest.approx(np.pi / 4)
    _, out, _ = run(["angle", "norm", "--a", "[[2,0],[0,3]]"], capsys)
    assert json.loads(out)["norm"] == pytest.approx(6.0)
    _, out, _ = run(["angle", "dist", "--a", "[[1,0]]", "--x", "3,4"], capsys)
    assert json.loads(out)["dist"] == pytest.approx(4.0)
    assert run(["angle", "inner", "--a", "[[1,0]]"], capsys)[0] == EXIT_CONFIG


def test_examples_list(capsys):
    code, out, _ = run(["examples", "list"], capsys)
    assert code == EXIT_OK
    assert len(out.strip().splitlines()) >= 15


def test_examples_single_criterion(tmp_path, capsys):
    path = tmp_path / "res.json"
    code, out, _ = run(["examples", "run-all", "--only", "7", "--json", path], capsys)
    assert code == EXIT_OK and "sha256" in out
    res = json.loads(path.read_text())
    assert [c["id"] for c in res["criteria"]] == [7]


SCHEMAS = Path(__file__).resolve().parents[1] / "docs" / "schemas"


def _required_keys_present(obj, schema):
    missing = [k for k in schema.get("required", []) if k not in obj]
    for key, sub in schema.get("properties", {}).items():
        if key in obj and sub.get("type") == "array" and isinstance(sub.get("items"), dict):
            for item in obj[key]:
                if isinstance(item, dict):
                    missing += _required_keys_present(item, sub["items"])
    return missing


@pytest.mark.parametrize("argv, schema", [
    (["estimate", "--catalog", "circle", "--point", "1,0", "--grid-count", "8"], "cone_report"),
    (["classify", "--catalog", "circle", "--theorem", "gluck", "--point", "1,0"], "classification_report"),
    (["liegroup", "--group", "SO2"], "algebra_report"),
])
def test_outputs_follow_schemas(argv, schema, capsys):
    code, out, _ = run(argv, capsys)
    assert code == EXIT_OK
    schema_doc = json.loads((SCHEMAS / f"{schema}.schema.json").read_text())
    assert _required_keys_present(json.loads(out), schema_doc) == []


def test_config_schema_lists_every_field():
    from dataclasses import fields

    from conelab.cli import RunConfig
    schema_doc = json.loads((SCHEMAS / "run_config.schema.json").read_text())
    assert set(schema_doc["properties"]) == {f.name for f in fields(RunConfig)}
