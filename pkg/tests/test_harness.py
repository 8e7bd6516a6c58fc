"""Configuration layer, CLI, sweep orchestration, and report rendering."""

import json
import re

import pytest

from vortex_spectra import __version__
from vortex_spectra.errors import ConfigError
from vortex_spectra.fgr import Box2D, GaussianSpec, Model1Config, simulate_model1
from vortex_spectra.harness import build_report, load_config, run_sweep
from vortex_spectra.harness.cli import main


# --------------------------------------------------------------------------
# configuration
# --------------------------------------------------------------------------

def test_config_canonical_roundtrip(tmp_path):
    cfg = load_config(overrides={"spectrum.omega": 0.17, "grid.n": 500})
    text = cfg.canonical_text()
    path = tmp_path / "run.toml"
    path.write_text(text)
    back = load_config(path, use_defaults=False)
    assert back.tree == cfg.tree
    assert back.canonical_text() == text
    assert back.config_hash() == cfg.config_hash()
    assert re.fullmatch(r"[0-9a-f]{64}", cfg.config_hash())


def test_config_hash_tracks_values():
    a = load_config(overrides={"spectrum.omega": 0.16})
    b = load_config(overrides={"spectrum.omega": 0.161})
    assert a.config_hash() != b.config_hash()


def test_unknown_keys_named_in_error(tmp_path):
    with pytest.raises(ConfigError, match="spectrum.omga"):
        load_config(overrides={"spectrum.omga": 0.2})
    path = tmp_path / "bad.toml"
    path.write_text("[grud]\nn = 300\n")
    with pytest.raises(ConfigError, match="grud"):
        load_config(path)


def test_value_validation():
    with pytest.raises(ConfigError):
        load_config(overrides={"grid.n": -5})
    with pytest.raises(ConfigError):
        load_config(overrides={"model": "septic"})
    with pytest.raises(ConfigError):
        load_config(overrides={"omega_cr.bracket": [0.17, 0.13]})


def test_override_beats_file(tmp_path):
    path = tmp_path / "run.toml"
    path.write_text("[spectrum]\nomega = 0.15\n")
    cfg = load_config(path, overrides={"spectrum.omega": 0.17})
    assert cfg.get("spectrum.omega") == 0.17
    assert cfg.get("spectrum.m") == 1          # defaults still underneath


def test_missing_key_diagnosed():
    cfg = load_config(use_defaults=False)
    with pytest.raises(ConfigError, match="sweep.omega_min"):
        cfg.require("sweep.omega_min")
    assert cfg.get("sweep.omega_min", 0.5) == 0.5


def test_worker_resolution(monkeypatch):
    monkeypatch.delenv("VORTEX_SPECTRA_WORKERS", raising=False)
    cfg = load_config()
    assert cfg.workers(None) == 1
    monkeypatch.setenv("VORTEX_SPECTRA_WORKERS", "3")
    assert cfg.workers(None) == 3
    assert cfg.workers(2) == 2                  # explicit beats environment
    cfg2 = load_config(overrides={"sweep.workers": 5})
    assert cfg2.workers(None) == 5              # config beats environment
    monkeypatch.setenv("VORTEX_SPECTRA_WORKERS", "zero")
    with pytest.raises(ConfigError):
        cfg.workers(None)


# --------------------------------------------------------------------------
# CLI exit codes and artifacts
# --------------------------------------------------------------------------

def test_cli_profile_artifacts(tmp_path, capsys):
    out = tmp_path / "run"
    code = main(["profile", "--omega", "0.16", "--n", "200",
                 "--out", str(out)])
    assert code == 0
    stdout = capsys.readouterr().out
    assert "mass" in stdout
    assert (out / "profile.csv").exists()
    payload = json.loads((out / "profile.json").read_text())
    assert payload["omega"] == 0.16
    assert payload["residual"] < 1e-8
    assert payload["existence_window"][1] == pytest.approx(0.1875)
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["command"] == "profile"
    assert manifest["version"] == __version__
    assert re.fullmatch(r"[0-9a-f]{64}", manifest["config_hash"])
    assert manifest["tasks"][0]["status"] == "ok"
    assert manifest["wall_clock_s"] > 0


def test_cli_numerical_failure_is_exit_3(tmp_path, capsys):
    code = main(["profile", "--omega", "0.25", "--n", "200",
                 "--out", str(tmp_path / "x")])
    assert code == 3
    assert "OutsideExistenceWindow" in capsys.readouterr().err


def test_cli_config_failure_is_exit_2(tmp_path, capsys):
    code = main(["omega-cr", "--bracket", "0.17", "0.13",
                 "--out", str(tmp_path / "x")])
    assert code == 2
    assert "ConfigError" in capsys.readouterr().err


def test_cli_spectrum_with_config_file(tmp_path):
    conf = tmp_path / "run.toml"
    conf.write_text("[spectrum]\nk_max = 4\n\n[grid]\nn = 200\n")
    out = tmp_path / "spec"
    code = main(["spectrum", "--config", str(conf), "--out", str(out)])
    assert code == 0
    payload = json.loads((out / "spectrum.json").read_text())
    assert payload["spectrally_stable"] is True
    assert all(p["k"] <= 4 for p in payload["pairs"])
    header = (out / "catalog.csv").read_text().splitlines()[0]
    assert header.split(",")[:3] == ["k", "lam", "mu_re"]


def test_cli_gamma_runs_closed_form(tmp_path):
    out = tmp_path / "gamma"
    code = main(["gamma", "--samples", "16", "--seed", "3",
                 "--out", str(out)])
    assert code == 0
    payload = json.loads((out / "gamma.json").read_text())
    assert payload["n_samples"] == 16
    assert payload["all_nonpositive"] is True
    assert payload["h13_margin"] > 0
    assert max(payload["gamma_values"]) <= 0


# --------------------------------------------------------------------------
# sweep orchestration
# --------------------------------------------------------------------------

def test_sweep_parallel_byte_identical(sweep_pair):
    dir1, dir4 = sweep_pair
    assert (dir1 / "ledger.csv").read_bytes() == (dir4 / "ledger.csv").read_bytes()
    jsons1 = sorted(p.name for p in dir1.glob("spectrum_*.json"))
    jsons4 = sorted(p.name for p in dir4.glob("spectrum_*.json"))
    assert jsons1 == jsons4 and len(jsons1) == 6
    for name in jsons1:
        assert (dir1 / name).read_bytes() == (dir4 / name).read_bytes()


def test_sweep_ledger_content(sweep_ledger_rows):
    assert len(sweep_ledger_rows) == 6
    qs = [float(r["q"]) for r in sweep_ledger_rows]
    assert all(b > a for a, b in zip(qs, qs[1:]))   # mass rises with frequency
    for row in sweep_ledger_rows:
        assert row["h5"] == "true" and row["h6"] == "true"
        assert row["error"] == ""
        assert row["identity_residual"] == "0"


def test_sweep_survives_failed_frequencies(tmp_path):
    out = tmp_path / "sweep"
    cfg = load_config(overrides={
        "grid.n": 200,
        "spectrum.k_max": 4,
        "sweep.omega_min": 0.17,
        "sweep.omega_max": 0.19,
        "sweep.count": 2,
        "sweep.chain_length": 1,
        "output.directory": str(out),
    })
    result = run_sweep(cfg)
    assert result["rows"] == 2 and result["failed"] == 1
    lines = (out / "ledger.csv").read_text().strip().splitlines()
    header = lines[0].split(",")
    rows = [dict(zip(header, line.split(","))) for line in lines[1:]]
    good = [r for r in rows if r["error"] == ""]
    bad = [r for r in rows if r["error"] != ""]
    assert len(good) == 1 and float(good[0]["omega"]) == pytest.approx(0.17)
    assert len(bad) == 1 and "OutsideExistenceWindow" in bad[0]["error"]
    assert (out / "spectrum_0.170000.json").exists()
    assert not (out / "spectrum_0.190000.json").exists()
    manifest = json.loads((out / "manifest.json").read_text())
    statuses = {t["task"]: t["status"] for t in manifest["tasks"]}
    assert statuses["omega=0.190000"] == "error"


# --------------------------------------------------------------------------
# report rendering
# --------------------------------------------------------------------------

def test_report_on_sweep(sweep_pair):
    dir1, _ = sweep_pair
    result = build_report(dir1)
    assert (dir1 / "sweep_overview.png").exists()
    assert (dir1 / "spectrum_map.png").exists()
    summary = (dir1 / "report_summary.csv").read_text()
    assert summary.splitlines()[0] == "artifact,quantity,value"
    assert result["figures"]


def test_report_on_simulation_csv(tmp_path):
    series = simulate_model1(Model1Config(
        g=GaussianSpec(1.0, 1.0), box=Box2D(60.0, 64), dt=0.01,
        t_final=3.0, z0=0.3))
    series.to_csv(tmp_path / "model1.csv")
    code = main(["report", "--out", str(tmp_path)])
    assert code == 0
    assert (tmp_path / "model1.png").exists()
    summary = (tmp_path / "report_summary.csv").read_text()
    assert "max_law_deviation" in summary


def test_report_needs_artifacts(tmp_path):
    with pytest.raises(ConfigError):
        build_report(tmp_path)          # directory exists but holds nothing
    with pytest.raises(ConfigError):
        build_report(tmp_path / "missing")
