import json
import os
import subprocess
import sys

import numpy as np
import pytest

from streamsir import reference_model, run_stream
from streamsir.io import read_sample_csv

CLI = [sys.executable, "-m", "streamsir"]


def run_cli(args, cwd, env_extra=None):
    env = dict(os.environ)
    env.pop("STREAMSIR_OUTDIR", None)
    if env_extra:
        env.update(env_extra)
    return subprocess.run(
        CLI + args, cwd=cwd, env=env, capture_output=True, text=True
    )


def test_simulate_fit_predict_pipeline(tmp_path):
    r = run_cli(["simulate", "--n", "1000", "--seed", "0"], tmp_path)
    assert r.returncode == 0, r.stderr
    assert (tmp_path / "sample.csv").exists()

    r = run_cli(["fit", "--input", "sample.csv"], tmp_path)
    assert r.returncode == 0, r.stderr
    for name in ("fit.json", "projection_log.csv", "grid_estimates.csv", "state.json"):
        assert (tmp_path / name).exists(), name
        assert name in r.stdout

    r = run_cli(
        ["predict", "--log", "projection_log.csv", "--at", "0,0.5,-0.5"], tmp_path
    )
    assert r.returncode == 0, r.stderr
    lines = (tmp_path / "predictions.csv").read_text().splitlines()
    assert lines[0] == "x,f_hat,supported"
    assert len(lines) == 4

    doc = json.loads((tmp_path / "fit.json").read_text())
    assert doc["n"] == 1000
    assert len(doc["theta_hat"]) == 10
    assert doc["schema_version"] == 1


def test_fit_below_warmup_fails_loudly(tmp_path):
    path = tmp_path / "tiny.csv"
    rows = ["x1,x2,x3,x4,y"] + [f"{i}.0,1.0,2.0,3.0,{i}.5" for i in range(5)]
    path.write_text("\n".join(rows) + "\n")
    r = run_cli(["fit", "--input", "tiny.csv"], tmp_path)
    assert r.returncode == 1
    assert "InsufficientDataError" in r.stderr


def test_cv_default_grid_reports_interior_argmin(tmp_path):
    r = run_cli(["cv", "--n", "1000", "--seed", "0", "--workers", "4"], tmp_path)
    assert r.returncode == 0, r.stderr
    doc = json.loads((tmp_path / "cv.json").read_text())
    assert len(doc["grid"]) == 21
    assert doc["grid"][0] == 0.1 and doc["grid"][-1] == 0.6
    assert 0.1 < doc["argmin_alpha"] < 0.6


def test_predict_missing_log_names_the_path(tmp_path):
    r = run_cli(["predict", "--log", "absent.csv", "--at", "0"], tmp_path)
    assert r.returncode == 1
    assert "absent.csv" in r.stderr
    assert "CsvFormatError" in r.stderr


def test_predict_without_support_writes_empty_rows(tmp_path):
    run_cli(["simulate", "--n", "200", "--seed", "1"], tmp_path)
    run_cli(["fit", "--input", "sample.csv"], tmp_path)
    r = run_cli(
        ["predict", "--log", "projection_log.csv", "--at", "40.0"], tmp_path
    )
    assert r.returncode == 0, r.stderr
    lines = (tmp_path / "predictions.csv").read_text().splitlines()
    assert lines[1].split(",")[0] == "40"
    assert lines[1].split(",")[2] == "0"


def test_study_scatter_and_rate_run_small(tmp_path):
    r = run_cli(
        ["study", "--kind", "scatter", "--n", "150", "--reps", "1", "--seed", "2"],
        tmp_path,
    )
    assert r.returncode == 0, r.stderr
    assert (tmp_path / "records.csv").exists()
    doc = json.loads((tmp_path / "summary.json").read_text())
    assert doc["study"] == "scatter"

    out2 = tmp_path / "rate"
    r = run_cli(
        [
            "study", "--kind", "rate", "--sizes", "100,200", "--reps", "3",
            "--eval-count", "2", "--seed", "0", "--out-dir", str(out2),
        ],
        tmp_path,
    )
    assert r.returncode == 0, r.stderr
    doc = json.loads((out2 / "summary.json").read_text())
    assert doc["study"] == "rate"


def test_normality_study_rejects_zero_noise(tmp_path):
    r = run_cli(
        [
            "study", "--kind", "normality", "--n", "200", "--reps", "2",
            "--noise-std", "0",
        ],
        tmp_path,
    )
    assert r.returncode == 1
    assert "StreamSirError" in r.stderr
    assert "noise_std" in r.stderr


def test_flag_overrides_config_file(tmp_path):
    cfg = tmp_path / "engine.cfg"
    cfg.write_text("alpha = 0.2\nn = 200\nseed = 4\n")
    r = run_cli(["fit", "--config", "engine.cfg", "--alpha", "0.3"], tmp_path)
    assert r.returncode == 0, r.stderr
    doc = json.loads((tmp_path / "fit.json").read_text())
    assert doc["alpha"] == 0.3
    assert doc["n"] == 200


def test_out_dir_flag_beats_environment(tmp_path):
    env_dir = tmp_path / "from_env"
    flag_dir = tmp_path / "from_flag"
    r = run_cli(
        ["simulate", "--n", "50", "--out-dir", str(flag_dir)],
        tmp_path,
        env_extra={"STREAMSIR_OUTDIR": str(env_dir)},
    )
    assert r.returncode == 0, r.stderr
    assert (flag_dir / "sample.csv").exists()
    assert not env_dir.exists()

    r = run_cli(
        ["simulate", "--n", "50"],
        tmp_path,
        env_extra={"STREAMSIR_OUTDIR": str(env_dir)},
    )
    assert r.returncode == 0, r.stderr
    assert (env_dir / "sample.csv").exists()


def test_fitting_a_csv_equals_streaming_its_rows(tmp_path):
    run_cli(["simulate", "--n", "300", "--seed", "6"], tmp_path)
    run_cli(["fit", "--input", "sample.csv"], tmp_path)
    doc = json.loads((tmp_path / "fit.json").read_text())

    sample = read_sample_csv(tmp_path / "sample.csv")
    state = run_stream(sample, alpha=0.35)
    assert doc["theta_hat"] == [float(f"{v:.17g}") for v in state.theta_hat]


def test_abbreviated_flags_are_rejected(tmp_path):
    r = run_cli(["fit", "--alph", "0.3", "--n", "100"], tmp_path)
    assert r.returncode == 2


def test_unknown_model_is_a_config_error(tmp_path):
    r = run_cli(["simulate", "--model", "mystery"], tmp_path)
    assert r.returncode == 1
    assert "ConfigError" in r.stderr
