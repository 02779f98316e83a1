import json

import pytest

from convexcr.cli import main


@pytest.fixture
def tri_file(tmp_path):
    p = tmp_path / "tri.json"
    p.write_text(json.dumps({"dimension": 2, "vertices": [[0, 0], [4, 0], [1, 3]]}))
    return str(p)


@pytest.fixture
def prism_file(tmp_path):
    pts = [[x, y, z] for x, y in [(0, 0), (4, 0), (1, 3)] for z in (0, 0.2)]
    p = tmp_path / "prism.json"
    p.write_text(json.dumps({"dimension": 3, "vertices": pts}))
    return str(p)


def run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, out


def test_analyze(capsys, tri_file):
    code, out = run(capsys, ["analyze", "--body", tri_file, "--point", "0,0"])
    doc = json.loads(out)
    assert code == 0
    assert doc["lcd"]["value"] == pytest.approx(2 ** 1.5)
    assert doc["cr"]["status"] == "disconnects_at"
    assert len(doc["critical_points"]) == 3


def test_levels_with_csv(capsys, tri_file, tmp_path):
    csv_path = tmp_path / "l.csv"
    code, out = run(capsys, ["levels", "--body", tri_file, "--point", "0,0", "--radius", "3",
                             "--csv", str(csv_path)])
    assert code == 0 and json.loads(out)["component_count"] == 2
    assert csv_path.read_text().splitlines()[1].endswith(",exact2d,2")


def test_levels_sampled_3d(capsys, prism_file):
    code, out = run(capsys, ["levels", "--body", prism_file, "--point", "0,0,0",
                             "--radius", "3", "--method", "sampled"])
    assert code == 0 and json.loads(out)["component_count"] == 2


def test_flow_ok_and_stalled(capsys, tri_file, tmp_path):
    code, out = run(capsys, ["flow", "--body", tri_file, "--point", "0,0", "--from", "2",
                             "--to", "2.7", "--samples", "32",
                             "--csv", str(tmp_path / "t.csv")])
    doc = json.loads(out)
    assert code == 0 and doc["status"] == "ok" and len(doc["points"]) == 32
    code, out = run(capsys, ["flow", "--body", tri_file, "--point", "0,0", "--from", "2",
                             "--to", "3", "--samples", "32"])
    assert json.loads(out)["status"] == "stalled_at_critical"


def test_verify(capsys, tmp_path):
    out_path = tmp_path / "rep.json"
    code, out = run(capsys, ["verify", "--trials-2d", "5", "--trials-3d", "1", "--seed", "2",
                             "--out", str(out_path)])
    assert code == 0
    assert json.loads(out_path.read_text())["aggregate"]["violations"] == 0


@pytest.mark.parametrize("argv", [
    ["analyze", "--body", "/nonexistent.json", "--point", "0,0"],
    ["levels", "--body", "TRI", "--point", "1,1", "--radius", "1"],
    ["levels", "--body", "TRI", "--point", "0,0", "--radius", "-1"],
    ["levels", "--body", "TRI", "--point", "0,0,0", "--radius", "1"],
    ["analyze", "--body", "TRI", "--point", "a,b"],
    ["bogus"],
])
def test_invalid_input_exit_2(capsys, tri_file, argv):
    argv = [tri_file if a == "TRI" else a for a in argv]
    assert main(argv) == 2
