import json

import numpy as np
import pytest

from sphfri.cli import EXIT_NUMERICAL, EXIT_OK, EXIT_USAGE, main
from sphfri.fri_model import DiracEnsemble, forward_sh_coefficients


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_bandlimit_single(capsys):
    code, out, _ = run(["bandlimit", "--K", "6"], capsys)
    assert code == EXIT_OK
    assert out.strip() == "L=8 (proposed), 12 (2K), 9 (K+√K)"


def test_bandlimit_table(capsys):
    code, out, _ = run(["bandlimit"], capsys)
    lines = out.strip().splitlines()
    assert code == EXIT_OK and len(lines) == 20
    assert lines[19] == "K=20: L=24 (proposed), 40 (2K), 25 (K+√K)"


def test_pipeline_roundtrip(tmp_path, capsys):
    inst, flm, res = tmp_path / "i.json", tmp_path / "f.json", tmp_path / "r.json"
    assert main(["synthesize", "--K", "5", "--seed", "4", "--output", str(inst)]) == EXIT_OK
    assert main(["shc", "--input", str(inst), "--output", str(flm)]) == EXIT_OK
    assert json.loads(flm.read_text())["L"] == 7
    assert main(["recover", "--input", str(flm), "--K", "5", "--output", str(res)]) == EXIT_OK

    truth = json.loads(inst.read_text())
    est = json.loads(res.read_text())
    assert est["K"] == 5 and est["diagnostics"]["arccos_clamped"] == 0
    key = lambda d: (d["theta"], d["phi"])
    for a, b in zip(sorted(truth["diracs"], key=key), sorted(est["diracs"], key=key)):
        for field in ("theta", "phi", "alpha_re", "alpha_im"):
            assert b[field] == pytest.approx(a[field], abs=1e-10)


def test_recover_stdout_and_tolerance_flag(tmp_path, capsys):
    sig = DiracEnsemble([0.7, 2.0], [1.0, 4.0], [1.0, -0.5j])
    path = tmp_path / "f.json"
    path.write_text(json.dumps(forward_sh_coefficients(sig, 3).to_dict()))
    code, out, _ = run(["recover", "--input", str(path), "--K", "2", "--tol", "null_gap=1e-3"], capsys)
    assert code == EXIT_OK
    assert json.loads(out)["K"] == 2
    code, _, err = run(["recover", "--input", str(path), "--K", "2", "--tol", "bogus=1"], capsys)
    assert code == EXIT_USAGE and "bogus" in err


def test_env_tolerance_override(tmp_path, capsys, monkeypatch):
    sig = DiracEnsemble([0.7, 2.0, 1.2], [1.0, 4.0, 2.5], [1.0, -0.5j, 0.3])
    path = tmp_path / "f.json"
    path.write_text(json.dumps(forward_sh_coefficients(sig, 6).to_dict()))
    assert run(["recover", "--input", str(path), "--K", "3"], capsys)[0] == EXIT_OK
    monkeypatch.setenv("SPHFRI_NULL_GAP", "0")
    code, _, err = run(["recover", "--input", str(path), "--K", "3"], capsys)
    assert code == EXIT_NUMERICAL and "[estimate_xk]" in err


def test_coincident_nodes_exit_code(tmp_path, capsys):
    bad = DiracEnsemble([0.6, np.pi - 0.6, 1.9], [1.0, 1.0, 3.0], [1.0, 0.5j, -0.7], validate=False)
    path = tmp_path / "f.json"
    path.write_text(json.dumps(forward_sh_coefficients(bad, 5).to_dict()))
    code, _, err = run(["recover", "--input", str(path), "--K", "3"], capsys)
    assert code == EXIT_NUMERICAL
    assert "null space" in err


def test_usage_errors(tmp_path, capsys):
    assert run(["recover", "--K", "2"], capsys)[0] == EXIT_USAGE
    assert run(["nonsense"], capsys)[0] == EXIT_USAGE
    assert run(["shc", "--input", str(tmp_path / "missing.json")], capsys)[0] == EXIT_USAGE
    assert run(["synthesize", "--K", "0"], capsys)[0] == EXIT_USAGE
    # bandlimit too small for K
    sig = DiracEnsemble([0.7, 2.0, 1.2], [1.0, 4.0, 2.5], [1.0, 1.0, 1.0])
    path = tmp_path / "f.json"
    path.write_text(json.dumps(forward_sh_coefficients(sig, 3).to_dict()))
    code, _, err = run(["recover", "--input", str(path), "--K", "3"], capsys)
    assert code == EXIT_USAGE and "[extract_dpm]" in err


def test_experiment_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["experiment", "--K", "2", "--trials", "1", "--seed", "7", "--output", str(a)]) == EXIT_OK
    assert main(["experiment", "--K", "2", "--trials", "1", "--seed", "7", "--output", str(b)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()
    assert a.read_text().splitlines()[0] == "K,L,E_theta,E_phi,E_alpha,trials_succeeded"


def test_experiment_explicit_L(capsys):
    code, out, _ = run(["experiment", "--K", "2", "3", "--L", "4", "6", "--trials", "2"], capsys)
    assert code == EXIT_OK
    rows = [r.split(",") for r in out.strip().splitlines()[1:]]
    assert [(r[0], r[1]) for r in rows] == [("2", "4"), ("3", "6")]
    assert run(["experiment", "--K", "2", "3", "--L", "4"], capsys)[0] == EXIT_USAGE


def test_render(tmp_path, capsys):
    inst = tmp_path / "i.json"
    inst.write_text(json.dumps(DiracEnsemble([1.0], [2.0], [1.0]).to_dict()))
    code, out, _ = run(["render", "--input", str(inst), "--L", "1", "--ntheta", "3", "--nphi", "4"], capsys)
    assert code == EXIT_OK
    lines = out.strip().splitlines()
    assert lines[0] == "theta,phi,re,im" and len(lines) == 13
    vals = np.array([[float(x) for x in line.split(",")] for line in lines[1:]])
    assert np.allclose(vals[:, 2], 1 / (4 * np.pi))
    assert np.allclose(vals[:, 3], 0)
