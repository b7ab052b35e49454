"""Plan parsing, validation, artifact emission, determinism, CLI surface."""

import json
import os

import pytest

import kdvlab.cli as cli
from kdvlab.runner import ConfigError, parse_config, run_suite


def test_minimal_plan_fills_defaults():
    plan = parse_config({"experiment": "smoothing", "s": "0"})
    assert plan.params["s"] == 0.0
    assert plan.params["s1"] == [0.9, 1.5]
    assert plan.params["ladder"] == [256, 512]
    assert plan.params["horizon"] == 5.0
    assert plan.seed == 42


def test_plan_echo_byte_identical():
    a = parse_config({"experiment": "multiplier-scan", "K": "20"})
    b = parse_config({"experiment": "multiplier-scan", "K": "20"})
    assert a.echo() == b.echo()


def test_unknown_key_rejected_by_name():
    with pytest.raises(ConfigError, match="'bogus'"):
        parse_config({"experiment": "multiplier-scan", "bogus": "1"})


def test_unknown_experiment_rejected():
    with pytest.raises(ConfigError, match="unknown experiment"):
        parse_config({"experiment": "frobnicate"})


def test_smoothing_range_gate():
    with pytest.raises(ConfigError, match="'s1'"):
        parse_config({"experiment": "smoothing", "s": "0", "s1": "1.5",
                      "assert_smoothing": "true"})


def test_stability_gate_refuses_bad_dt():
    with pytest.raises(ConfigError, match="stability envelope"):
        parse_config({"experiment": "smoothing", "s": "0", "dt": "0.1",
                      "scheme": "IFRK4", "ladder": "256, 512"})


def test_mean_plus_homogeneous_rejected():
    with pytest.raises(ConfigError, match="'mean'"):
        parse_config({"experiment": "evolve", "mean": "1.0"})


def test_ini_config_roundtrip(tmp_path):
    cfg = tmp_path / "run.ini"
    cfg.write_text(
        "[run]\nexperiment = multiplier-scan\nseed = 7\n\n"
        "[multiplier-scan]\nK = 12\ns1 = 0.8\n"
    )
    plan = parse_config(str(cfg))
    assert plan.seed == 7
    assert plan.params["K"] == 12
    assert plan.params["s1"] == 0.8


def test_run_suite_artifacts_and_manifest(tmp_path):
    plan = parse_config({"experiment": "multiplier-scan", "K": "12",
                         "out_dir": str(tmp_path / "a")})
    assert run_suite(plan) == 0
    names = sorted(os.listdir(tmp_path / "a"))
    assert names == ["config_echo.ini", "manifest.json", "multiplier.json"]
    manifest = json.loads((tmp_path / "a" / "manifest.json").read_text())
    assert set(manifest["files"]) == {"config_echo.ini", "multiplier.json"}
    assert manifest["ok"] is True


def test_rerun_byte_identical(tmp_path):
    """Identical plans reproduce every emitted byte (timestamps live only in
    the manifest)."""
    outs = []
    for sub in ("x", "y"):
        plan = parse_config({
            "experiment": "smoothing", "s": "0", "s1": "0.9",
            "ladder": "16, 32", "horizon": "0.5", "samples": "2",
            "dt": "0.001", "scheme": "RESONANT", "amplitude": "0.01",
            "out_dir": str(tmp_path / sub),
        })
        run_suite(plan)
        blob = {}
        for name in os.listdir(tmp_path / sub):
            if name != "manifest.json":
                blob[name] = (tmp_path / sub / name).read_bytes()
        outs.append(blob)
    assert outs[0] == outs[1]


def test_evolve_suite_emits_conservation(tmp_path):
    plan = parse_config({"experiment": "evolve", "N": "16", "dt": "0.002",
                         "t_end": "1.0", "samples": "2",
                         "out_dir": str(tmp_path / "e")})
    assert run_suite(plan) == 0
    rep = json.loads((tmp_path / "e" / "conservation.json").read_text())
    assert rep["momentum_max"] == 0.0
    assert rep["l2_rel_drift"] < 1e-8
    csv = (tmp_path / "e" / "evolve.csv").read_text().splitlines()
    assert csv[0].startswith("#t,momentum,l2")
    assert os.path.exists(tmp_path / "e" / "coeffs_t0.txt")


def test_normalform_suite(tmp_path):
    plan = parse_config({"experiment": "normalform-check", "trials": "3",
                         "sweep_bound": "8", "out_dir": str(tmp_path / "n")})
    assert run_suite(plan) == 0
    rep = json.loads((tmp_path / "n" / "normalform.json").read_text())
    assert rep["max_residual"] <= 1e-11
    assert rep["identities_ok"] is True


def test_talbot_suite_csv_and_sidecar(tmp_path):
    plan = parse_config({"experiment": "talbot", "modes": "64", "grid": "512",
                         "ladder": "128, 256", "out": "probe.csv",
                         "out_dir": str(tmp_path / "t")})
    assert run_suite(plan) == 0
    side = json.loads((tmp_path / "t" / "probe.csv.json").read_text())
    assert set(side["jump_metric"]) == {"128", "256"}
    first = (tmp_path / "t" / "probe.csv").read_text().splitlines()
    assert first[0] == "#x,value"
    assert len(first) == 513


def test_cli_end_to_end(tmp_path, capsys):
    rc = cli.main(["multiplier-scan", "--K", "12", "--out-dir", str(tmp_path / "c")])
    assert rc == 0
    assert (tmp_path / "c" / "multiplier.json").exists()


def test_cli_env_overrides(tmp_path, monkeypatch):
    monkeypatch.setenv("KDVLAB_OUT_DIR", str(tmp_path / "env"))
    monkeypatch.setenv("KDVLAB_SEED", "9")
    rc = cli.main(["bilinear-ensemble", "--trials", "2", "--modes", "16"])
    assert rc == 0
    echo = (tmp_path / "env" / "config_echo.ini").read_text()
    assert "seed = 9" in echo


def test_cli_flag_beats_env(tmp_path, monkeypatch):
    monkeypatch.setenv("KDVLAB_SEED", "9")
    rc = cli.main(["bilinear-ensemble", "--trials", "2", "--modes", "16",
                   "--seed", "4", "--out-dir", str(tmp_path / "f")])
    assert rc == 0
    assert "seed = 4" in (tmp_path / "f" / "config_echo.ini").read_text()


def test_cli_config_file(tmp_path):
    cfg = tmp_path / "plan.ini"
    cfg.write_text("[run]\nexperiment = evolve\n\n[evolve]\nN = 16\n"
                   "dt = 0.002\nt_end = 0.5\nsamples = 1\n")
    rc = cli.main(["evolve", "--config", str(cfg), "--out-dir", str(tmp_path / "g")])
    assert rc == 0
    assert (tmp_path / "g" / "evolve.csv").exists()


def test_cli_bad_config_exit_code(tmp_path):
    cfg = tmp_path / "bad.ini"
    cfg.write_text("[run]\nexperiment = evolve\nbogus = 1\n")
    assert cli.main(["evolve", "--config", str(cfg)]) == 2
