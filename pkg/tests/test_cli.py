import json
import subprocess
import sys
from importlib import resources

import jsonschema
import pytest

from latgen.cli import main, parse_weights

BASE = ["--b", "2", "--m", "3", "--s", "2", "--alpha", "2", "--gamma", "const:1", "--schedule", "const:0", "--policy", "no-repeat"]


def schema(name):
    return json.loads(resources.files("latgen").joinpath("schema", name).read_text())


def run(capsys, *argv):
    try:
        code = main(list(argv))
    except SystemExit as exc:
        code = exc.code
    out = capsys.readouterr()
    return code, out.out, out.err


def test_construct_example(capsys):
    code, out, _ = run(capsys, "construct", *BASE, "--engine", "naive")
    doc = json.loads(out)
    assert code == 0 and doc["z_scaled"] == [1, 3]
    jsonschema.validate(doc, schema("construct.schema.json"))


def test_construct_engines_byte_identical(capsys):
    args = ["--b", "3", "--m", "5", "--s", "8", "--gamma", "poly:2", "--schedule", "log", "--policy", "anti-diagonal"]
    _, fast, _ = run(capsys, "construct", *args, "--engine", "fast")
    _, naive, _ = run(capsys, "construct", *args, "--engine", "naive")
    f, n = json.loads(fast), json.loads(naive)
    assert f["z_scaled"] == n["z_scaled"]
    assert f["step_errors"] == n["step_errors"]


def test_construct_deterministic_bytes(capsys):
    first = run(capsys, "construct", *BASE)[1]
    assert run(capsys, "construct", *BASE)[1] == first


def test_construct_one_dimensional(capsys):
    _, out, _ = run(capsys, "construct", "--b", "5", "--m", "2", "--s", "1", "--gamma", "const:0.5")
    doc = json.loads(out)
    assert doc["z_scaled"] == [1]
    assert doc["step_errors"][0] == pytest.approx(0.5 * 2 * 1.6449340668482264 / 625, rel=1e-15)


def test_construct_csv(capsys, tmp_path):
    path = tmp_path / "r.csv"
    code, _, _ = run(capsys, "construct", *BASE, "--format", "csv", "--output", str(path))
    lines = path.read_text().splitlines()
    assert code == 0 and lines[0] == "d,w,z_unscaled,z_scaled,exclusion_size,step_error"
    assert lines[2].startswith("2,0,3,3,1,")


@pytest.mark.parametrize(
    "argv",
    [
        ["construct", "--b", "4", "--m", "2", "--s", "2"],
        ["construct", "--b", "2", "--m", "3", "--s", "2", "--alpha", "1"],
        ["construct", "--b", "2", "--m", "3", "--s", "3", "--schedule", "list:0,2,1"],
        ["construct", "--b", "2", "--m", "3", "--s", "2", "--gamma", "exp:2"],
        ["construct", "--b", "2", "--m", "3"],
        ["bound", "--b", "3", "--m", "2", "--s", "2", "--exclusion-sizes", "list:0,6"],
        ["check", "--checks", "everything"],
    ],
)
def test_invalid_config_exit_1(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 1
    assert json.loads(err.strip().splitlines()[-1])["error"] == "invalid-config"


def test_empty_candidate_exit_2(capsys):
    code, _, err = run(capsys, "construct", "--b", "3", "--m", "1", "--s", "4", "--strict-exclusion")
    assert code == 2 and json.loads(err)["error"] == "empty-candidate-set"


def test_bound_d1(capsys):
    code, out, _ = run(capsys, "bound", "--b", "2", "--m", "3", "--s", "1", "--lambda", "1.0")
    doc = json.loads(out)
    assert code == 0 and doc["lambda_fixed"]
    assert doc["thm2_value"] == pytest.approx(1.8949340668, rel=1e-10)
    jsonschema.validate(doc, schema("bound.schema.json"))


def test_bound_from_result(capsys, tmp_path):
    path = tmp_path / "r.json"
    run(capsys, "construct", "--b", "3", "--m", "4", "--s", "6", "--schedule", "log", "-o", str(path))
    code, out, _ = run(capsys, "bound", "--result", str(path), "--curve", "--lambda-grid", "16")
    doc = json.loads(out)
    jsonschema.validate(doc, schema("bound.schema.json"))
    rows = doc["per_d"]
    assert [r["d"] for r in rows] == list(range(1, 7))
    assert all(r["step_error"] <= r["thm2"] for r in rows)
    assert all(a["thm2"] <= b["thm2"] for a, b in zip(rows, rows[1:]))


def test_check_filter(capsys):
    code, out, err = run(capsys, "check", "--checks", "bounds", "--d-max", "12")
    doc = json.loads(out)
    jsonschema.validate(doc, schema("check.schema.json"))
    assert code == 0 and [c["name"] for c in doc["checks"]] == ["grouped bound evaluation"]
    assert err.startswith("PASS")


@pytest.mark.parametrize(
    "field,value,violated",
    [
        ("z_scaled", [1, 3, 99], "regime shape"),
        ("step_errors", [0.01, 0.02, 0.03], "step errors round-trip"),
        ("exclusion_sizes", [0, 50, 1], "exclusion sizes"),
        ("t2", 2, "thresholds"),
    ],
)
def test_check_corrupted_result(capsys, tmp_path, field, value, violated):
    path = tmp_path / "r.json"
    run(capsys, "construct", "--b", "2", "--m", "4", "--s", "3", "--schedule", "list:0,1,1", "-o", str(path))
    doc = json.loads(path.read_text())
    assert run(capsys, "check", "--result", str(path))[0] == 0
    doc[field] = value
    path.write_text(json.dumps(doc))
    code, out, err = run(capsys, "check", "--result", str(path))
    assert code == 3
    failed = [c["name"] for c in json.loads(out)["checks"] if not c["passed"]]
    assert violated in failed
    assert f"FAIL {violated}" in err


def test_parse_weights():
    assert parse_weights("poly:2", 3) == (1.0, 0.25, 1 / 9)
    assert parse_weights("list:1,0.5,0.2,9", 3) == (1.0, 0.5, 0.2)
    with pytest.raises(ValueError):
        parse_weights("list:1", 3)


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "latgen", "construct", *BASE, "--format", "csv"],
        capture_output=True,
        text=True,
        check=True,
    )
    assert proc.stdout.splitlines()[1].startswith("1,0,1,1,0,")
