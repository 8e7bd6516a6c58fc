"""Time-series container shared by both model simulators."""

from __future__ import annotations

import dataclasses
import io
from pathlib import Path

import numpy as np

from ..errors import ConfigError

__all__ = ["TimeSeries"]


@dataclasses.dataclass
class TimeSeries:
    """Sampled diagnostics of a mode/field simulation.

    ``z_abs2`` has one column per oscillator mode.  ``signed_energy`` and
    ``leak_integral`` together form the bookkeeping pair: their sum should
    stay at its initial value up to integrator drift.  ``predicted`` holds
    closed-form reference values when the model has one (the single-mode
    decay law), otherwise ``None``.  ``hamiltonian`` is kept for drift
    checks but is not part of the CSV contract.
    """

    t: np.ndarray
    z_abs2: np.ndarray
    signed_energy: np.ndarray
    leak_integral: np.ndarray
    field_l2: np.ndarray
    predicted: np.ndarray | None = None
    hamiltonian: np.ndarray | None = None

    def __post_init__(self) -> None:
        self.t = np.asarray(self.t, dtype=float)
        self.z_abs2 = np.atleast_2d(np.asarray(self.z_abs2, dtype=float))
        if self.z_abs2.shape[0] != self.t.size:
            self.z_abs2 = self.z_abs2.T
        n = self.t.size
        for name in ("signed_energy", "leak_integral", "field_l2"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.size != n:
                raise ConfigError(f"TimeSeries column {name!r} has length "
                                  f"{arr.size}, expected {n}")
            setattr(self, name, arr)
        if self.predicted is not None:
            self.predicted = np.asarray(self.predicted, dtype=float)

    @property
    def n_modes(self) -> int:
        return self.z_abs2.shape[1]

    def column_names(self) -> list[str]:
        names = ["t"]
        names += [f"z{j + 1}_abs2" for j in range(self.n_modes)]
        names += ["signed_energy", "leak_integral", "field_l2"]
        if self.predicted is not None:
            names.append("predicted")
        return names

    def to_csv(self, path: str | Path | None = None) -> str:
        cols = [self.t] + [self.z_abs2[:, j] for j in range(self.n_modes)]
        cols += [self.signed_energy, self.leak_integral, self.field_l2]
        if self.predicted is not None:
            cols.append(self.predicted)
        buf = io.StringIO()
        buf.write(",".join(self.column_names()) + "\n")
        for row in zip(*cols):
            buf.write(",".join(format(v, ".17g") for v in row) + "\n")
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text)
        return text

    @classmethod
    def from_csv(cls, path: str | Path) -> "TimeSeries":
        lines = Path(path).read_text().strip().splitlines()
        header = lines[0].split(",")
        data = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
        cols = {name: data[:, i] for i, name in enumerate(header)}
        mode_names = [n for n in header if n.startswith("z") and n.endswith("_abs2")]
        return cls(
            t=cols["t"],
            z_abs2=np.column_stack([cols[n] for n in mode_names]),
            signed_energy=cols["signed_energy"],
            leak_integral=cols["leak_integral"],
            field_l2=cols["field_l2"],
            predicted=cols.get("predicted"),
        )
