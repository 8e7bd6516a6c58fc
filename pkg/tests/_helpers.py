"""Shared helpers for the test suite."""

from __future__ import annotations

import numpy as np

__all__ = ["criterion_line", "ledger_drift", "corrected_rate", "max_law_deviation"]


def criterion_line(num: int, name: str, ok: bool, detail: str) -> None:
    """Print one machine-greppable pass/fail line per acceptance criterion."""
    status = "PASS" if ok else "FAIL"
    print(f"[criterion {num:02d}] {status}  {name}: {detail}", flush=True)


def ledger_drift(series) -> float:
    """Worst relative drift of signed energy + leak integral from its start."""
    total = series.signed_energy + series.leak_integral
    ref = abs(total[0])
    if ref == 0.0:
        ref = max(abs(series.signed_energy).max(), 1e-300)
    return float(np.max(np.abs(total - total[0])) / ref)


def max_law_deviation(series) -> float:
    """Worst relative gap between |z|^2 and the closed-form decay curve."""
    if series.predicted is None:
        raise ValueError("series carries no closed-form reference")
    pred = series.predicted
    return float(np.max(np.abs(series.z_abs2[:, 0] - pred) / pred))


def corrected_rate(series, t1: float, t2: float, mode: int = 1) -> float:
    """Initial signed-energy production rate from a finite time window.

    The instantaneous rate scales with the cube of the draining mode's
    action, so a straight slope over [t1, t2] understates the t=0 rate
    once the mode has visibly decayed.  Fitting the signed energy against
    the integrated cube of the normalized action refers the slope back to
    the initial amplitude.
    """
    t = series.t
    m = series.z_abs2[:, mode] / series.z_abs2[0, mode]
    x = np.concatenate(
        [[0.0], np.cumsum(0.5 * (m[1:] ** 3 + m[:-1] ** 3) * np.diff(t))]
    )
    mask = (t >= t1) & (t <= t2)
    if mask.sum() < 3:
        raise ValueError("window too narrow for a slope fit")
    return float(np.polyfit(x[mask], series.signed_energy[mask], 1)[0])
