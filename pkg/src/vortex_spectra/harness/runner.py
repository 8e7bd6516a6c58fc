"""Command runners: wire validated configs into the computational modules.

Every runner writes its artifacts (CSV/JSON) plus a ``manifest.json``
into the output directory and returns a summary dict for the CLI to
print.  Numeric payloads are deterministic for a fixed config: CSV cells
are printed with 17 significant digits and JSON objects are emitted with
sorted keys, so re-running an identical config reproduces byte-identical
files regardless of worker count.  Only the manifest carries timing.
"""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .. import __version__
from ..errors import ConfigError, NumericalError
from ..profiles import (
    NonlinearityModel,
    RadialGrid,
    RadialPotential,
    ProfileFamily,
    existence_window,
    profile_energy,
    profile_mass,
    solve_profile,
)
from ..spectra import (
    FilterConfig,
    StabilityLedger,
    detect_omega_cr,
    full_spectrum,
    hypothesis_ledger,
)
from ..fgr import (
    Box2D,
    Coupling,
    GaussianSpec,
    Model1Config,
    Model2Config,
    fgr_constant,
    gamma_model2,
    simulate_model1,
    simulate_model2,
)
from .config import RunConfig

__all__ = [
    "RunManifest",
    "run_profile", "run_spectrum", "run_sweep", "run_omega_cr",
    "run_fgr_model1", "run_fgr_model2", "run_gamma",
]


# --------------------------------------------------------------------------
# manifest
# --------------------------------------------------------------------------

@dataclass
class RunManifest:
    """Reproducibility record written next to every command's outputs."""

    command: str
    config_hash: str
    version: str
    grid: dict
    wall_clock_s: float = 0.0
    tasks: list = field(default_factory=list)

    def add_task(self, name: str, status: str, error: str | None = None):
        entry = {"task": name, "status": status}
        if error:
            entry["error"] = error
        self.tasks.append(entry)

    def write(self, out_dir: Path) -> Path:
        path = out_dir / "manifest.json"
        payload = {
            "command": self.command,
            "config_hash": self.config_hash,
            "version": self.version,
            "grid": self.grid,
            "wall_clock_s": self.wall_clock_s,
            "tasks": self.tasks,
        }
        path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n",
                        encoding="utf-8")
        return path


def _out_dir(cfg: RunConfig, out: str | None) -> Path:
    directory = Path(out if out is not None else cfg.require("output.directory"))
    directory.mkdir(parents=True, exist_ok=True)
    return directory


def _write_json(path: Path, payload: dict) -> Path:
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n",
                    encoding="utf-8")
    return path


# --------------------------------------------------------------------------
# shared builders
# --------------------------------------------------------------------------

def _model(cfg: RunConfig) -> NonlinearityModel:
    name = cfg.require("model")
    return (NonlinearityModel.cubic_quintic() if name == "cubic_quintic"
            else NonlinearityModel.cubic())


def _potential(cfg: RunConfig) -> RadialPotential:
    eps = float(cfg.get("potential.epsilon", 0.0))
    if eps == 0.0:
        return RadialPotential.none()
    return RadialPotential.gaussian_well(
        eps,
        depth=float(cfg.get("potential.depth", 1.0)),
        width=float(cfg.get("potential.width", 1.0)),
    )


def _grid(cfg: RunConfig) -> RadialGrid:
    return RadialGrid.uniform(cfg.require("grid.r_max"), cfg.require("grid.n"))


def _filter_config(cfg: RunConfig) -> FilterConfig:
    overrides = cfg.get("tolerances", {}) or {}
    return FilterConfig(**overrides)


def _grid_summary(cfg: RunConfig) -> dict:
    return {"r_max": cfg.get("grid.r_max"), "n": cfg.get("grid.n"),
            "fgr_box": cfg.get("fgr.box"), "fgr_n_grid": cfg.get("fgr.n_grid")}


def _report_payload(rep) -> dict:
    """SpectrumReport as a JSON-ready tree (vectors stripped)."""
    return {
        "omega": float(rep.omega),
        "m": int(rep.m),
        "epsilon": float(rep.epsilon),
        "spectrally_stable": bool(rep.spectrally_stable),
        "counts": {str(k): int(v) for k, v in rep.counts.items()},
        "kernel": [
            {"k": int(e["k"]), "geo": int(e["geo"]), "alg": int(e["alg"])}
            for e in rep.kernel
        ],
        "pairs": [
            {
                "k": int(p.k),
                "lam": float(p.lam),
                "mu_re": float(p.mu.real),
                "mu_im": float(p.mu.imag),
                "s": (None if p.s is None else int(p.s)),
                "residual": float(p.residual),
                "localization": float(p.localization),
                "embedded_candidate": bool(p.embedded_candidate),
            }
            for p in rep.pairs
        ],
    }


def _catalog_csv(path: Path, rep) -> Path:
    lines = ["k,lam,mu_re,mu_im,s,residual,localization,embedded_candidate"]
    for p in rep.pairs:
        s = "" if p.s is None else str(int(p.s))
        lines.append(
            f"{int(p.k)},{p.lam:.17g},{p.mu.real:.17g},{p.mu.imag:.17g},"
            f"{s},{p.residual:.17g},{p.localization:.17g},"
            f"{'true' if p.embedded_candidate else 'false'}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


# --------------------------------------------------------------------------
# profile / spectrum / omega-cr
# --------------------------------------------------------------------------

def run_profile(cfg: RunConfig, out: str | None = None) -> dict:
    t0 = time.perf_counter()
    directory = _out_dir(cfg, out)
    model = _model(cfg)
    potential = _potential(cfg)
    grid = _grid(cfg)
    omega = cfg.require("spectrum.omega")
    m = cfg.require("spectrum.m")
    prof = solve_profile(model, potential, omega, m, grid,
                         tol=cfg.get("spectrum.tol", 1e-8))

    csv_path = directory / "profile.csv"
    lines = ["r,psi"]
    lines += [f"{r:.17g},{p:.17g}" for r, p in zip(grid.r, prof.psi)]
    csv_path.write_text("\n".join(lines) + "\n", encoding="utf-8")

    window = existence_window(model)
    payload = {
        "omega": float(prof.omega),
        "m": int(prof.m),
        "epsilon": float(potential.epsilon),
        "model": model.kind,
        "mass": profile_mass(prof),
        "energy": profile_energy(prof),
        "residual": float(prof.residual_norm),
        "amplitude_max": float(np.max(np.abs(prof.psi))),
        "existence_window": [0.0, float(window.hi)],
    }
    _write_json(directory / "profile.json", payload)

    manifest = RunManifest("profile", cfg.config_hash(), __version__,
                           _grid_summary(cfg))
    manifest.add_task(f"profile omega={omega:.6f} m={m}", "ok")
    manifest.wall_clock_s = time.perf_counter() - t0
    manifest.write(directory)
    return {"out": str(directory), "mass": payload["mass"],
            "residual": payload["residual"]}


def run_spectrum(cfg: RunConfig, out: str | None = None) -> dict:
    t0 = time.perf_counter()
    directory = _out_dir(cfg, out)
    model = _model(cfg)
    potential = _potential(cfg)
    grid = _grid(cfg)
    omega = cfg.require("spectrum.omega")
    m = cfg.require("spectrum.m")
    fc = _filter_config(cfg)
    prof = solve_profile(model, potential, omega, m, grid,
                         tol=cfg.get("spectrum.tol", 1e-8))
    rep = full_spectrum(prof, cfg.require("spectrum.k_max"), fc,
                        keep_vectors=False)
    _write_json(directory / "spectrum.json", _report_payload(rep))
    _catalog_csv(directory / "catalog.csv", rep)

    manifest = RunManifest("spectrum", cfg.config_hash(), __version__,
                           _grid_summary(cfg))
    manifest.add_task(f"spectrum omega={omega:.6f} m={m}", "ok")
    manifest.wall_clock_s = time.perf_counter() - t0
    manifest.write(directory)
    return {"out": str(directory),
            "spectrally_stable": rep.spectrally_stable,
            "n_pairs": len(rep.pairs)}


def run_omega_cr(cfg: RunConfig, out: str | None = None) -> dict:
    t0 = time.perf_counter()
    directory = _out_dir(cfg, out)
    model = _model(cfg)
    potential = _potential(cfg)
    grid = _grid(cfg)
    bracket = cfg.require("omega_cr.bracket")
    result = detect_omega_cr(
        model, potential, cfg.require("omega_cr.m"),
        (bracket[0], bracket[1]), grid,
        k_max=cfg.require("spectrum.k_max"),
        tol_omega=cfg.get("omega_cr.tol", 1e-3),
        cfg=_filter_config(cfg),
        pre_scan=cfg.get("omega_cr.pre_scan", 7),
    )
    payload = {
        "omega_cr": float(result.omega_cr),
        "lambda_cr": float(result.lambda_cr),
        "k_star": int(result.k_star),
        "signatures": [int(s) for s in result.signatures],
        "bracket": [float(result.bracket[0]), float(result.bracket[1])],
        "stable_side": result.stable_side,
        "evaluations": int(result.evaluations),
    }
    _write_json(directory / "omega_cr.json", payload)

    manifest = RunManifest("omega-cr", cfg.config_hash(), __version__,
                           _grid_summary(cfg))
    manifest.add_task(f"omega-cr bracket=({bracket[0]}, {bracket[1]})", "ok")
    manifest.wall_clock_s = time.perf_counter() - t0
    manifest.write(directory)
    return {"out": str(directory), **payload}


# --------------------------------------------------------------------------
# sweep
# --------------------------------------------------------------------------

def _chain_spec(cfg: RunConfig, omegas: list[float]) -> dict:
    """Plain picklable description of one continuation chain."""
    return {
        "model": cfg.require("model"),
        "epsilon": float(cfg.get("potential.epsilon", 0.0)),
        "depth": float(cfg.get("potential.depth", 1.0)),
        "width": float(cfg.get("potential.width", 1.0)),
        "m": int(cfg.require("spectrum.m")),
        "k_max": int(cfg.require("spectrum.k_max")),
        "tol": float(cfg.get("spectrum.tol", 1e-8)),
        "r_max": float(cfg.require("grid.r_max")),
        "n": int(cfg.require("grid.n")),
        "tolerances": dict(cfg.get("tolerances", {}) or {}),
        "with_trapping": bool(cfg.get("sweep.with_trapping", True)),
        "omegas": [float(w) for w in omegas],
    }


def _row_plain(row: dict) -> dict:
    out = {}
    for key, value in row.items():
        if value is None or isinstance(value, (bool, str)):
            out[key] = value
        elif isinstance(value, (int, np.integer)):
            out[key] = int(value)
        else:
            out[key] = float(value)
    return out


def _run_chain(spec: dict) -> dict:
    """Worker entry: solve one warm-started chain and audit each member.

    Profiles are solved in order, warm-starting from the predecessor; a
    frequency that fails is recorded with its error class and the chain
    continues cold from the next one.  Mass-slope differences are taken
    over the chain's own successful members, so results depend only on
    the chain partition (fixed by the config), never on worker count.
    """
    model = (NonlinearityModel.cubic_quintic()
             if spec["model"] == "cubic_quintic" else NonlinearityModel.cubic())
    potential = (RadialPotential.none() if spec["epsilon"] == 0.0 else
                 RadialPotential.gaussian_well(spec["epsilon"], spec["depth"],
                                               spec["width"]))
    grid = RadialGrid.uniform(spec["r_max"], spec["n"])
    fc = FilterConfig(**spec["tolerances"])

    solved: list[tuple[float, object]] = []
    failures: list[tuple[float, str]] = []
    guess = None
    for omega in spec["omegas"]:
        try:
            prof = solve_profile(model, potential, omega, spec["m"], grid,
                                 initial_guess=guess, tol=spec["tol"])
        except NumericalError as exc:
            failures.append((omega, f"{type(exc).__name__}: {exc}"))
            guess = None
            continue
        solved.append((omega, prof))
        guess = prof.psi

    rows: list[dict] = []
    reports: list[dict] = []
    if solved:
        omegas = np.array([w for w, _ in solved])
        profiles = [p for _, p in solved]
        q = np.array([profile_mass(p) for p in profiles])
        q_prime = (np.gradient(q, omegas) if len(omegas) > 1
                   else np.full(1, math.nan))
        family = ProfileFamily(omegas=omegas, profiles=profiles,
                               q=q, q_prime=q_prime)
        try:
            ledger = hypothesis_ledger(family, spec["k_max"], fc,
                                       with_trapping=spec["with_trapping"])
        except NumericalError as exc:
            for omega in omegas:
                failures.append((float(omega), f"{type(exc).__name__}: {exc}"))
        else:
            rows = [_row_plain(r) for r in ledger.rows]
            reports = [_report_payload(r) for r in ledger.reports]

    error_rows = [{"omega": float(w), "error": msg} for w, msg in failures]
    return {"rows": rows, "reports": reports, "errors": error_rows}


def sweep_omegas(cfg: RunConfig) -> list[float]:
    lo = cfg.require("sweep.omega_min")
    hi = cfg.require("sweep.omega_max")
    count = cfg.require("sweep.count")
    if not lo < hi:
        raise ConfigError(f"sweep.omega_min must be below sweep.omega_max "
                          f"(got {lo} >= {hi})")
    return [float(w) for w in np.linspace(lo, hi, count)]


def run_sweep(cfg: RunConfig, out: str | None = None,
              workers: int | None = None) -> dict:
    """Audit a frequency range in parallel, chain by chain.

    The range is cut into fixed continuation chains of
    ``sweep.chain_length`` members; each chain runs on one worker
    (warm-started continuation inside, cold start at chain boundaries).
    The ledger CSV and the per-frequency JSON reports are written in
    frequency order by the parent and are byte-identical for any worker
    count.  Chains that fail contribute rows with an error marker instead
    of aborting the sweep.
    """
    t0 = time.perf_counter()
    directory = _out_dir(cfg, out)
    n_workers = cfg.workers(workers)
    omegas = sweep_omegas(cfg)
    chain_len = cfg.require("sweep.chain_length")
    chains = [omegas[i:i + chain_len] for i in range(0, len(omegas), chain_len)]
    specs = [_chain_spec(cfg, chain) for chain in chains]

    if n_workers == 1 or len(specs) == 1:
        results = [_run_chain(s) for s in specs]
    else:
        with ProcessPoolExecutor(max_workers=min(n_workers, len(specs))) as pool:
            results = list(pool.map(_run_chain, specs))

    manifest = RunManifest("sweep", cfg.config_hash(), __version__,
                           _grid_summary(cfg))
    all_rows: list[dict] = []
    all_reports: list[dict] = []
    for result in results:
        all_rows.extend(result["rows"])
        all_rows.extend(result["errors"])
        all_reports.extend(result["reports"])
        for row in result["rows"]:
            manifest.add_task(f"omega={row['omega']:.6f}", "ok")
        for row in result["errors"]:
            manifest.add_task(f"omega={row['omega']:.6f}", "error",
                              row["error"])
    all_rows.sort(key=lambda r: r["omega"])
    all_reports.sort(key=lambda r: r["omega"])

    ledger = StabilityLedger(rows=all_rows, reports=all_reports)
    ledger.to_csv(directory / "ledger.csv")
    for payload in all_reports:
        _write_json(directory / f"spectrum_{payload['omega']:.6f}.json",
                    payload)

    manifest.wall_clock_s = time.perf_counter() - t0
    manifest.write(directory)
    n_err = sum(1 for r in all_rows if r.get("error"))
    return {"out": str(directory), "rows": len(all_rows), "failed": n_err,
            "workers": n_workers}


# --------------------------------------------------------------------------
# dispersive-coupling simulations
# --------------------------------------------------------------------------

def _gaussian_from(cfg: RunConfig) -> GaussianSpec:
    preset = cfg.get("fgr.preset", "gaussian")
    if preset != "gaussian":
        raise ConfigError(f"fgr.preset: unknown preset {preset!r} "
                          "(only 'gaussian' is built in)")
    return GaussianSpec(cfg.get("fgr.amplitude", 1.0),
                        cfg.get("fgr.width", 1.0))


def _model1_config(cfg: RunConfig) -> Model1Config:
    g = _gaussian_from(cfg)
    z0_list = cfg.get("fgr.z0") or [0.3]
    if len(z0_list) != 1:
        raise ConfigError("fgr.z0: the single-oscillator model takes "
                          f"exactly one amplitude, got {len(z0_list)}")
    z0 = complex(z0_list[0])
    c = fgr_constant(g)
    t_final = cfg.get("fgr.t_final")
    if t_final is None:
        # default horizon: the predicted curve drops to half its initial
        # value, 4*pi*c*|z0|^4*T = 3
        if c <= 0 or z0 == 0:
            raise ConfigError("fgr.t_final required when the predicted decay "
                              "rate vanishes")
        t_final = 3.0 / (4.0 * math.pi * c * abs(z0) ** 4)
    box_len = cfg.get("fgr.box")
    if box_len is None:
        # radiation-tail clearance measured for Gaussian couplings of
        # unit width: the boundary monitor stays quiet for boxes >~ 10 T
        box_len = 10.5 * t_final
    box = Box2D(float(box_len), cfg.require("fgr.n_grid"))
    return Model1Config(
        g=g, box=box, dt=cfg.require("fgr.dt"), t_final=float(t_final),
        z0=z0, save_points=cfg.require("fgr.save_points"),
        wrap_tol=cfg.require("fgr.wrap_tol"),
    )


def run_fgr_model1(cfg: RunConfig, out: str | None = None) -> dict:
    t0 = time.perf_counter()
    directory = _out_dir(cfg, out)
    mcfg = _model1_config(cfg)
    series = simulate_model1(mcfg)
    series.to_csv(directory / "model1.csv")

    manifest = RunManifest("fgr-model1", cfg.config_hash(), __version__,
                           _grid_summary(cfg))
    manifest.add_task(f"model1 z0={abs(mcfg.z0):.6g} "
                      f"t_final={mcfg.t_final:.6g}", "ok")
    manifest.wall_clock_s = time.perf_counter() - t0
    manifest.write(directory)
    return {"out": str(directory), "t_final": mcfg.t_final,
            "final_mass": float(series.z_abs2[-1, 0]),
            "predicted_final": float(series.predicted[-1])}


def _model2_config(cfg: RunConfig) -> Model2Config:
    modes_cfg = cfg.get("fgr.modes")
    couplings_cfg = cfg.get("fgr.couplings")
    if not modes_cfg or not couplings_cfg:
        # default benchmark: two oscillators of opposite energy sign with
        # cubic self-channels, tuned to radiate visibly in ~30 s of compute
        modes_cfg = [{"lam": 1.75, "sign": 1}, {"lam": 1.9, "sign": -1}]
        couplings_cfg = [
            {"alpha": [3, 0], "amplitude": 0.55, "width": 1.0},
            {"alpha": [0, 3], "amplitude": 0.55, "width": 1.0},
        ]
        defaults = {"fgr.omega": 4.0, "fgr.box": 170.0, "fgr.t_final": 20.0,
                    "fgr.z0": [0.03, 0.3]}
    else:
        defaults = {}

    omega = cfg.get("fgr.omega", defaults.get("fgr.omega"))
    if omega is None:
        raise ConfigError("missing configuration key: fgr.omega")
    box_len = cfg.get("fgr.box", defaults.get("fgr.box"))
    if box_len is None:
        raise ConfigError("missing configuration key: fgr.box")
    t_final = cfg.get("fgr.t_final", defaults.get("fgr.t_final"))
    if t_final is None:
        raise ConfigError("missing configuration key: fgr.t_final")
    z0 = cfg.get("fgr.z0", defaults.get("fgr.z0"))
    if z0 is None:
        raise ConfigError("missing configuration key: fgr.z0")

    modes = [(entry["lam"], entry["sign"]) for entry in modes_cfg]
    couplings = []
    for entry in couplings_cfg:
        if len(entry["alpha"]) != len(modes):
            raise ConfigError(
                "fgr.couplings: alpha length must match the mode count "
                f"({len(entry['alpha'])} vs {len(modes)})")
        center = tuple(entry.get("center", (0.0, 0.0)))
        g1 = GaussianSpec(entry["amplitude"], entry["width"], center)
        g2 = GaussianSpec(entry.get("amplitude2", entry["amplitude"]),
                          entry.get("width2", entry["width"]), center)
        couplings.append(Coupling(tuple(entry["alpha"]), g1, g2))

    box = Box2D(float(box_len), cfg.require("fgr.n_grid"))
    return Model2Config(
        modes=modes, omega=float(omega), couplings=couplings, box=box,
        dt=cfg.require("fgr.dt"), t_final=float(t_final),
        z0=[complex(z) for z in z0],
        save_points=cfg.require("fgr.save_points"),
        wrap_tol=cfg.require("fgr.wrap_tol"),
        n_angle=cfg.require("fgr.n_angle"),
    )


def run_fgr_model2(cfg: RunConfig, out: str | None = None) -> dict:
    t0 = time.perf_counter()
    directory = _out_dir(cfg, out)
    mcfg = _model2_config(cfg)
    series = simulate_model2(mcfg)
    series.to_csv(directory / "model2.csv")

    ledger = series.signed_energy + series.leak_integral
    drift = float(np.max(np.abs(ledger - ledger[0])) / abs(ledger[0]))
    manifest = RunManifest("fgr-model2", cfg.config_hash(), __version__,
                           _grid_summary(cfg))
    manifest.add_task(f"model2 modes={len(mcfg.modes)} "
                      f"t_final={mcfg.t_final:.6g}", "ok")
    manifest.wall_clock_s = time.perf_counter() - t0
    manifest.write(directory)
    return {"out": str(directory), "t_final": mcfg.t_final,
            "ledger_drift": drift,
            "final_abs": [float(a) for a in np.sqrt(series.z_abs2[-1])]}


def run_gamma(cfg: RunConfig, out: str | None = None) -> dict:
    t0 = time.perf_counter()
    directory = _out_dir(cfg, out)
    mcfg = _model2_config(cfg)
    report = gamma_model2(
        mcfg,
        n_samples=cfg.require("fgr.gamma_samples"),
        seed=cfg.require("fgr.gamma_seed"),
    )
    payload = {
        "gamma_values": [float(g) for g in report.gamma_values],
        "h13_margin": float(report.h13_margin),
        "levels": [float(level) for level in report.levels],
        "all_nonpositive": bool(report.all_nonpositive()),
        "n_samples": len(report.samples),
    }
    _write_json(directory / "gamma.json", payload)

    manifest = RunManifest("gamma", cfg.config_hash(), __version__,
                           _grid_summary(cfg))
    manifest.add_task(f"gamma samples={payload['n_samples']}", "ok")
    manifest.wall_clock_s = time.perf_counter() - t0
    manifest.write(directory)
    return {"out": str(directory), "h13_margin": payload["h13_margin"],
            "all_nonpositive": payload["all_nonpositive"]}
