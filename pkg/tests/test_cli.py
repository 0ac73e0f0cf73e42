import json
import os
import subprocess
import sys

import pytest

from curvecx import cli
from curvecx import hyperbolic as H


def run(capsys, *argv):
    code = cli.run(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip().startswith("{") else None)


def test_surface_info(capsys):
    code, rep = run(capsys, "surface", "info", "S_0_5")
    assert code == 0
    r = rep["results"]
    assert (r["g"], r["m"], r["xi"]) == (0, 5, 2)
    assert rep["command"] == "surface info" and len(rep["provenance"]) == 64
    assert "seconds" in rep["timings"]


def test_curves_i(capsys):
    code, rep = run(capsys, "curves", "i", "S_1_1", "a", "b")
    assert code == 0 and rep["results"] == {"i": 1}


def test_flat_build_json(capsys):
    code, rep = run(capsys, "flat", "build", "S_1_1", "a,b", "--weights", "1,1", "--json")
    assert code == 0
    assert rep["results"]["area"] == 1 and rep["results"]["area_identity"]["ok"]


def test_tuple_syntax():
    assert cli.parse_tuple("ab+cd,bc") == [["ab", "cd"], ["bc"]]
    assert cli.parse_tuple('[["ab", "cd"], "bc"]') == [["ab", "cd"], ["bc"]]


def test_cgraph_dist(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("CURVECX_CACHE", str(tmp_path))
    code, rep = run(capsys, "cgraph", "dist", "S_0_5", "ab", "abAc", "--max-len", "4")
    assert code == 0 and rep["results"]["upper"] == 2 and rep["results"]["exact"]
    assert list(tmp_path.rglob("*.json"))


def test_hyp_delta(capsys, tmp_path):
    p = tmp_path / "c4.json"
    p.write_text(json.dumps({"edges": [[0, 1], [1, 2], [2, 3], [3, 0]]}))
    code, rep = run(capsys, "hyp", "delta", str(p))
    assert code == 0 and rep["results"]["delta"] == 1.0
    code, rep = run(capsys, "hyp", "delta", str(p), "--mode", "thin")
    assert rep["results"]["delta"] == 2.0
    code, rep = run(capsys, "hyp", "circ", str(p), "--set", "0,1,2,3")
    assert rep["results"] == {"radius": 2.0, "centres": [0, 1, 2, 3]}


def test_cover_commands(capsys, tmp_path):
    p = tmp_path / "cover.json"
    p.write_text(json.dumps({"base": "S_1_1", "degree": 2, "rho": {"a": [2, 1]}}))
    code, rep = run(capsys, "cover", "build", str(p))
    assert code == 0 and rep["results"]["total"]["m"] == 2 and rep["results"]["euler_ok"]
    code, rep = run(capsys, "cover", "lift", str(p), "a")
    assert rep["results"]["components"][0]["degree"] == 2
    code, rep = run(capsys, "cover", "push", str(p), "a")
    assert code == 0


def test_out_flag(capsys, tmp_path):
    out = tmp_path / "r.json"
    code = cli.run(["--out", str(out), "curves", "i", "S_1_1", "a", "b"])
    assert code == 0 and json.loads(out.read_text())["results"] == {"i": 1}


def test_provenance_depends_on_inputs(capsys):
    _, r1 = run(capsys, "curves", "i", "S_1_1", "a", "b")
    _, r2 = run(capsys, "curves", "i", "S_1_1", "a", "ab")
    _, r3 = run(capsys, "curves", "i", "S_1_1", "a", "b")
    assert r1["provenance"] != r2["provenance"] and r1["provenance"] == r3["provenance"]


@pytest.mark.parametrize("argv", [
    ["nosuch", "cmd"],
    ["curves", "nosuch"],
    ["curves", "i", "S_1_1", "a"],
    ["curves", "i", "S_7_7", "a", "b"],
    ["curves", "i", "S_1_1", "a", "x"],
    ["cgraph", "slice", "S_1_1"],
    ["flat", "build", "S_0_5", "ab,cd"],
])
def test_input_errors_exit_2(argv, capsys):
    assert cli.run(argv) == 2


def test_resource_cap_exit_3(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"max_slice_vertices": 5, "cache": str(tmp_path / "c")}))
    assert cli.run(["--config", str(cfg), "cgraph", "slice", "S_0_5", "--max-len", "4"]) == 3


def test_bad_config_exit_2(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"nonsense": 1}))
    assert cli.run(["--config", str(cfg), "surface", "info", "S_1_1"]) == 2


def test_invariant_violation_exit_1(tmp_path, capsys, monkeypatch):
    p = tmp_path / "c5.json"
    p.write_text(json.dumps({"edges": [[0, 1], [1, 2], [2, 3], [3, 4], [4, 0]]}))
    monkeypatch.setattr(H, "lemma_suites", lambda *a, **k: {"lemcirc": {"checked": 1, "violations": 1}})
    code, rep = run(capsys, "hyp", "lemmas", str(p))
    assert code == 1 and "violation" in rep


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "curvecx", "curves", "i", "S_1_1", "a", "b"],
                       capture_output=True, text=True, timeout=300)
    assert r.returncode == 0 and json.loads(r.stdout)["results"] == {"i": 1}
