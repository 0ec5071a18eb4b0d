import hashlib
import json

import numpy as np
import pytest

from entanglab import hamiltonian as ham
from entanglab.cli import main
from entanglab.dynamics import CSV_FIELDS
from entanglab.hamiltonian import pauli
from entanglab.io import write_array
from entanglab.scenarios.config import HBAR_ENV

I, X, Y, Z = pauli()


def one_error_line(err):
    lines = err.strip().splitlines()
    assert len(lines) == 1
    assert lines[0].startswith("entanglab: error[")
    return lines[0]


def sha(path):
    return hashlib.sha256(path.read_bytes()).hexdigest()


def test_analyze_entangling(tmp_path, capsys):
    path = write_array(tmp_path / "xx.json", (2, 2), "operator", np.kron(X, X))
    assert main(["analyze", str(path)]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["residual_hs_norm"] == pytest.approx(2.0, abs=1e-12)
    assert out["is_non_entangling"] is False
    assert np.array(out["h_a"]).shape == (2, 2, 2)


def test_analyze_separable(tmp_path, capsys):
    h = np.kron(Z, I) + np.kron(I, X)
    path = write_array(tmp_path / "sep.json", (2, 2), "operator", h)
    assert main(["analyze", str(path)]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["is_non_entangling"] is True
    h_a = np.array(out["h_a"])[..., 0] + 1j * np.array(out["h_a"])[..., 1]
    h_b = np.array(out["h_b"])[..., 0] + 1j * np.array(out["h_b"])[..., 1]
    np.testing.assert_allclose(np.kron(h_a, I) + np.kron(I, h_b), h, atol=1e-12)


@pytest.mark.parametrize("text,kind", [
    ('{"d_a": 2, "d_b": 2, "kind": "oper', "input"),
    ('{"d_a": 2, "d_b": 2, "kind": "operator", "data": []}', "input"),
    ('{"d_a": 1, "d_b": 2, "kind": "operator", "data": [[[0,0],[1,0]],[[0,0],[0,0]]]}', "input"),
])
def test_analyze_bad_input(tmp_path, capsys, text, kind):
    path = tmp_path / "bad.json"
    path.write_text(text)
    assert main(["analyze", str(path)]) == 2
    line = one_error_line(capsys.readouterr().err)
    assert line.startswith(f"entanglab: error[{kind}]:")


def test_analyze_missing_file(tmp_path, capsys):
    assert main(["analyze", str(tmp_path / "nope.json")]) == 2
    one_error_line(capsys.readouterr().err)


def test_usage_errors(capsys):
    assert main(["frobnicate"]) == 2
    assert "error[usage]" in one_error_line(capsys.readouterr().err)
    assert main(["run", "x.cfg", "--threads", "0"]) == 2
    assert "error[usage]" in one_error_line(capsys.readouterr().err)


def test_run_writes_reproducible_outputs(tmp_path, capsys):
    cfg = tmp_path / "tp.cfg"
    cfg.write_text("scenario = test_particle\nrun.steps = 400  # short\ncontrol = false\n")
    outs = []
    for name in ("o1", "o2"):
        assert main(["run", str(cfg), "--seed", "1", "--out", str(tmp_path / name)]) == 0
        outs.append(tmp_path / name)
    capsys.readouterr()
    csv = outs[0] / "test_particle_trajectory.csv"
    assert csv.read_text().splitlines()[0] == ",".join(CSV_FIELDS)
    for f in ("test_particle_trajectory.csv", "test_particle_summary.json"):
        assert sha(outs[0] / f) == sha(outs[1] / f)
    summary = json.loads((outs[0] / "test_particle_summary.json").read_text())
    assert summary["parameters"]["seed"] == 1
    assert summary["parameters"]["steps"] == 400
    manifest = json.loads((outs[0] / "test_particle_manifest.json").read_text())
    assert manifest["exit_code"] == 0 and manifest["seed"] == 1


def test_run_counterexample_json_config(tmp_path, capsys):
    cfg = tmp_path / "ce.json"
    cfg.write_text(json.dumps({"scenario": "counterexample", "steps": 5}))
    assert main(["run", str(cfg), "--seed", "11", "--out", str(tmp_path)]) == 0
    summary = json.loads((tmp_path / "counterexample_summary.json").read_text())
    assert summary["metrics"]["seed_used"] == 11
    assert summary["metrics"]["theorem2_residual"] > 1e-3


def test_run_oscillator_cutoff_too_small(tmp_path, capsys):
    cfg = tmp_path / "osc.cfg"
    cfg.write_text("scenario = oscillators\ncutoff = 4\nalpha_a = 2\n")
    assert main(["run", str(cfg), "--out", str(tmp_path / "o")]) == 2
    line = one_error_line(capsys.readouterr().err)
    assert "error[config]" in line and "26" in line
    assert not (tmp_path / "o").exists()


def test_run_unknown_scenario(tmp_path, capsys):
    cfg = tmp_path / "x.cfg"
    cfg.write_text("scenario = warp_drive\n")
    assert main(["run", str(cfg)]) == 2
    line = one_error_line(capsys.readouterr().err)
    for name in ("test_particle", "material_point", "hartree", "oscillators", "counterexample"):
        assert name in line


def test_run_unknown_key(tmp_path, capsys):
    cfg = tmp_path / "x.cfg"
    cfg.write_text("scenario = hartree\npotential.colour = 3\n")
    assert main(["run", str(cfg)]) == 2
    assert "colour" in one_error_line(capsys.readouterr().err)


def test_hbar_environment_override(tmp_path, capsys, monkeypatch):
    cfg = tmp_path / "h.cfg"
    cfg.write_text("scenario = hartree\nexact = none\n")
    monkeypatch.setenv(HBAR_ENV, "0.5")
    assert main(["run", str(cfg), "--out", str(tmp_path / "env")]) == 0
    env = json.loads((tmp_path / "env" / "hartree_summary.json").read_text())
    assert env["parameters"]["hbar"] == 0.5
    # an explicit config value wins over the environment
    cfg.write_text("scenario = hartree\nexact = none\nhbar = 2\n")
    assert main(["run", str(cfg), "--out", str(tmp_path / "cfg")]) == 0
    explicit = json.loads((tmp_path / "cfg" / "hartree_summary.json").read_text())
    assert explicit["parameters"]["hbar"] == 2


def test_bad_hbar_environment(tmp_path, capsys, monkeypatch):
    cfg = tmp_path / "h.cfg"
    cfg.write_text("scenario = hartree\nexact = none\n")
    monkeypatch.setenv(HBAR_ENV, "-1")
    assert main(["run", str(cfg), "--out", str(tmp_path)]) == 2
    assert HBAR_ENV in one_error_line(capsys.readouterr().err)


def test_verify_theorems_passes(capsys):
    assert main(["verify", "--suite", "theorems", "--threads", "2"]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out
    assert "gauge invariance" in out


def test_verify_gauge_fault_is_reported(capsys):
    assert main(["verify", "--suite", "theorems", "--inject-gauge-fault", "1e-3"]) == 1
    out = capsys.readouterr().out
    gauge = [line for line in out.splitlines() if "gauge invariance" in line]
    assert len(gauge) == 1 and gauge[0].rstrip().endswith("FAIL")
    assert ham._GAUGE_FAULT == 0.0


def test_verify_appendix_has_purity_line(capsys):
    assert main(["verify", "--suite", "appendix"]) == 0
    out = capsys.readouterr().out
    line = next(line for line in out.splitlines() if "purity law" in line)
    assert " 20 " in line and "0.01" in line and line.rstrip().endswith("PASS")
