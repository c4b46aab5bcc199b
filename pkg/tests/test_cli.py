import json

import numpy as np
import pytest

from sgdreg.cli import main
from sgdreg.harness import RunSummary
from sgdreg import cli


def write_config(tmp_path, **overrides):
    cfg = {"problem": "gravity", "n": 16, "nus": [1.0], "eps_list": [0.01],
           "schedules": ["c/n"], "runs": 4, "max_epochs": 60, "base_seed": 3,
           "landweber_max_iters": 500}
    cfg.update(overrides)
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    return path


def test_gen_deterministic_bytes(tmp_path):
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert main(["gen", "--problem", "shaw", "--n", "12", "--out", str(out1)]) == 0
    assert main(["gen", "--problem", "shaw", "--n", "12", "--out", str(out2)]) == 0
    f1 = (out1 / "shaw_12_matrix.csv").read_bytes()
    f2 = (out2 / "shaw_12_matrix.csv").read_bytes()
    assert f1 == f2
    mat = np.loadtxt(out1 / "shaw_12_matrix.csv", delimiter=",")
    assert mat.shape == (12, 12)


def test_run_outputs_and_roundtrip(tmp_path):
    cfg = write_config(tmp_path)
    out = tmp_path / "out"
    assert main(["run", "--config", str(cfg), "--out", str(out)]) == 0
    csv_lines = (out / "summaries.csv").read_text().splitlines()
    assert csv_lines[0] == "nu,eps,c0,alpha,e_sgd,k_sgd,e_lm,k_lm,stderr,slope"
    assert len(csv_lines) == 2
    payload = json.loads((out / "summaries.json").read_text())
    assert len(payload) == 1 and payload[0]["problem"] == "gravity"
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["config"]["problem"] == "gravity"
    # bit-stable across reruns
    out2 = tmp_path / "out2"
    assert main(["run", "--config", str(cfg), "--out", str(out2)]) == 0
    assert (out / "summaries.json").read_bytes() == (out2 / "summaries.json").read_bytes()
    assert (out / "summaries.csv").read_bytes() == (out2 / "summaries.csv").read_bytes()


def test_run_bad_config_machine_readable_error(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"problem": "gravity", "bogus_key": 1}))
    rc = main(["run", "--config", str(path), "--out", str(tmp_path / "o")])
    assert rc == 1
    err = capsys.readouterr().err.strip().splitlines()[-1]
    payload = json.loads(err)
    assert payload["error"] == "ConfigError"
    assert "bogus_key" in payload["message"]


def test_traj_outputs(tmp_path):
    cfg = write_config(tmp_path)
    out = tmp_path / "traj"
    assert main(["traj", "--config", str(cfg), "--out", str(out)]) == 0
    data = np.loadtxt(out / "sgd_mean.csv", delimiter=",", skiprows=1)
    assert data.shape == (60, 3)
    lm = np.loadtxt(out / "landweber.csv", delimiter=",", skiprows=1)
    assert lm.shape[1] == 4


def test_precond_report(tmp_path):
    cfg = write_config(tmp_path)
    out = tmp_path / "pc"
    assert main(["precond", "--config", str(cfg), "--out", str(out)]) == 0
    payload = json.loads((out / "precond_report.json").read_text())
    assert payload["landweber_max_abs_diff"] <= 1e-10
    assert payload["pairs"][0]["rel_diff_e_sgd"] >= 0


def test_verify_bounds_exit_codes(tmp_path, capsys):
    rc = main(["verify-bounds", "--suite", "lemmas", "--max-k", "6",
               "--kernel-configs", "20", "--out", str(tmp_path)])
    assert rc == 0
    report = json.loads((tmp_path / "bounds_report.json").read_text())
    assert report["all_ok"] and report["failures"] == 0
    capsys.readouterr()


def test_export_report_requires_results(tmp_path):
    with pytest.raises(cli.CliError):
        cli.export_report([], tmp_path)
