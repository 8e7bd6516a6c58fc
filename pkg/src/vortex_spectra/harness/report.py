"""Render a run directory: figures plus a delimited summary table.

``build_report`` scans an output directory for artifacts the runners
emit (ledger.csv, model1.csv / model2.csv, spectrum JSON files,
profile.csv, omega_cr.json, gamma.json), renders a PNG figure for each
family it finds, and writes ``report_summary.csv`` with one key-figure
row per artifact.  Rendering uses the Agg backend so it works headless.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from ..errors import ConfigError
from ..fgr import TimeSeries

__all__ = ["build_report"]


def _pyplot():
    import matplotlib
    matplotlib.use("Agg", force=True)
    import matplotlib.pyplot as plt
    return plt


def _read_ledger(path: Path) -> dict[str, list]:
    with path.open(newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    cols: dict[str, list] = {}
    for name in rows[0].keys() if rows else []:
        cols[name] = [r[name] for r in rows]
    return cols


def _floats(values: list[str]) -> np.ndarray:
    return np.array([float(v) if v not in ("", None) else np.nan
                     for v in values])


def _plot_ledger(path: Path, out_png: Path, summary: list) -> None:
    cols = _read_ledger(path)
    if not cols:
        return
    omega = _floats(cols["omega"])
    ok = np.array([e == "" for e in cols.get("error", [""] * len(omega))])
    plt = _pyplot()
    fig, axes = plt.subplots(1, 3, figsize=(12.5, 3.6))

    axes[0].plot(omega[ok], _floats(cols["q"])[ok], "o-", ms=3)
    axes[0].set_xlabel("omega")
    axes[0].set_ylabel("mass q")

    stable = np.array([v == "true" for v in cols["h6"]])
    axes[1].plot(omega[ok], _floats(cols["min_lambda"])[ok], "o-", ms=3,
                 label="min lambda")
    axes[1].plot(omega[ok], _floats(cols["max_lambda"])[ok], "s--", ms=3,
                 label="max lambda")
    for w, s, good in zip(omega, stable, ok):
        if good and not s:
            axes[1].axvline(w, color="red", alpha=0.15, lw=6)
    axes[1].set_xlabel("omega")
    axes[1].set_ylabel("catalog frequencies")
    axes[1].legend(fontsize=8)

    axes[2].plot(omega[ok], _floats(cols["n_neg"])[ok], "o-", ms=3,
                 label="negative directions")
    axes[2].plot(omega[ok], _floats(cols["identity_residual"])[ok], "x:",
                 label="index identity residual")
    axes[2].set_xlabel("omega")
    axes[2].legend(fontsize=8)

    fig.tight_layout()
    fig.savefig(out_png, dpi=130)
    plt.close(fig)
    n_unstable = int(np.sum(~stable[ok]))
    summary.append(("ledger.csv", "rows", str(len(omega))))
    summary.append(("ledger.csv", "unstable_rows", str(n_unstable)))
    summary.append(("ledger.csv", "failed_rows", str(int(np.sum(~ok)))))
    summary.append(("ledger.csv", "figure", out_png.name))


def _plot_timeseries(path: Path, out_png: Path, summary: list) -> None:
    series = TimeSeries.from_csv(path)
    plt = _pyplot()
    fig, axes = plt.subplots(1, 2, figsize=(10, 3.6))

    for j in range(series.z_abs2.shape[1]):
        axes[0].plot(series.t, series.z_abs2[:, j], label=f"|z{j + 1}|^2")
    if series.predicted is not None:
        axes[0].plot(series.t, series.predicted, "k--", lw=1,
                     label="predicted")
    axes[0].set_xlabel("t")
    axes[0].set_ylabel("oscillator mass")
    axes[0].legend(fontsize=8)

    ledger = series.signed_energy + series.leak_integral
    axes[1].plot(series.t, series.signed_energy, label="signed energy")
    axes[1].plot(series.t, series.leak_integral, label="leak integral")
    axes[1].plot(series.t, ledger, "k-", lw=1.2, label="sum")
    axes[1].set_xlabel("t")
    axes[1].legend(fontsize=8)

    fig.tight_layout()
    fig.savefig(out_png, dpi=130)
    plt.close(fig)
    drift = float(np.max(np.abs(ledger - ledger[0])) / max(abs(ledger[0]), 1e-300))
    summary.append((path.name, "t_final", f"{series.t[-1]:.17g}"))
    summary.append((path.name, "ledger_drift", f"{drift:.17g}"))
    if series.predicted is not None:
        rel = np.abs(series.z_abs2[:, 0] - series.predicted) / series.predicted[0]
        summary.append((path.name, "max_law_deviation", f"{float(np.max(rel)):.17g}"))
    summary.append((path.name, "figure", out_png.name))


def _plot_spectra(paths: list[Path], out_png: Path, summary: list) -> None:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6.5, 4))
    colors = {1: "tab:red", -1: "tab:blue", None: "0.6"}
    seen = set()
    for path in paths:
        payload = json.loads(path.read_text(encoding="utf-8"))
        for pair in payload["pairs"]:
            s = pair["s"]
            label = {1: "s = +1", -1: "s = -1", None: "complex/undefined"}[s]
            ax.plot(pair["k"], pair["lam"], "o", ms=4, color=colors[s],
                    label=None if label in seen else label)
            seen.add(label)
        summary.append((path.name, "spectrally_stable",
                        str(payload["spectrally_stable"]).lower()))
    ax.set_xlabel("angular block k")
    ax.set_ylabel("pair frequency")
    if seen:
        ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(out_png, dpi=130)
    plt.close(fig)
    summary.append(("spectrum", "figure", out_png.name))


def _plot_profile(path: Path, out_png: Path, summary: list) -> None:
    data = np.genfromtxt(path, delimiter=",", names=True)
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(5.5, 3.6))
    ax.plot(data["r"], data["psi"])
    ax.set_xlabel("r")
    ax.set_ylabel("psi")
    fig.tight_layout()
    fig.savefig(out_png, dpi=130)
    plt.close(fig)
    summary.append(("profile.csv", "amplitude_max",
                    f"{float(np.max(np.abs(data['psi']))):.17g}"))
    summary.append(("profile.csv", "figure", out_png.name))


def build_report(directory: str | Path) -> dict:
    """Render every known artifact in ``directory``; return what was made."""
    directory = Path(directory)
    if not directory.is_dir():
        raise ConfigError(f"report target is not a directory: {directory}")

    summary: list[tuple[str, str, str]] = []
    figures: list[str] = []

    ledger = directory / "ledger.csv"
    if ledger.exists():
        png = directory / "sweep_overview.png"
        _plot_ledger(ledger, png, summary)
        figures.append(png.name)

    for name in ("model1.csv", "model2.csv"):
        path = directory / name
        if path.exists():
            png = directory / f"{path.stem}.png"
            _plot_timeseries(path, png, summary)
            figures.append(png.name)

    spectra = sorted(directory.glob("spectrum*.json"))
    if spectra:
        png = directory / "spectrum_map.png"
        _plot_spectra(spectra, png, summary)
        figures.append(png.name)

    profile = directory / "profile.csv"
    if profile.exists():
        png = directory / "profile.png"
        _plot_profile(profile, png, summary)
        figures.append(png.name)

    for name in ("omega_cr.json", "gamma.json"):
        path = directory / name
        if path.exists():
            payload = json.loads(path.read_text(encoding="utf-8"))
            for key in sorted(payload):
                value = payload[key]
                if isinstance(value, (int, float, bool, str)):
                    summary.append((name, key, str(value)))

    if not summary:
        raise ConfigError(f"nothing to report in {directory} "
                          "(no known artifacts found)")

    summary_path = directory / "report_summary.csv"
    with summary_path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["artifact", "quantity", "value"])
        writer.writerows(summary)
    return {"out": str(directory), "figures": figures,
            "summary": str(summary_path)}
