"""Session fixtures shared across the test modules.

The expensive objects -- the reference vortex profile, its full linearized
spectrum with retained eigenvectors, the two long mode/field simulations,
and the parallel-vs-serial sweep pair -- are computed once per session and
reused by both the unit tests and the acceptance gate.
"""

from __future__ import annotations

import math

import numpy as np
import pytest

from vortex_spectra.fgr import (
    Box2D,
    Coupling,
    GaussianSpec,
    Model1Config,
    Model2Config,
    fgr_constant_gaussian,
    simulate_model1,
    simulate_model2,
)
from vortex_spectra.harness import load_config, run_sweep
from vortex_spectra.profiles import (
    NonlinearityModel,
    RadialGrid,
    RadialPotential,
    solve_profile,
)
from vortex_spectra.spectra import full_spectrum


@pytest.fixture(scope="session")
def cq_model():
    return NonlinearityModel.cubic_quintic()


@pytest.fixture(scope="session")
def grid800():
    return RadialGrid.uniform(40.0, 800)


@pytest.fixture(scope="session")
def profile16(cq_model, grid800):
    """Reference vortex: omega = 0.16, m = 1, no external potential."""
    return solve_profile(cq_model, RadialPotential.none(), 0.16, 1, grid800)


@pytest.fixture(scope="session")
def profile15(cq_model, grid800):
    return solve_profile(cq_model, RadialPotential.none(), 0.15, 1, grid800)


@pytest.fixture(scope="session")
def spectrum16(profile16):
    """Full harmonic-block catalog at the reference point, with vectors.

    Returns (report, blocks, points_by_k); blocks/points feed the trapping
    probe and the raw-eigenvalue checks without re-assembling anything.
    """
    blocks: dict = {}
    points: dict = {}
    rep = full_spectrum(profile16, k_max=8, keep_vectors=True,
                        blocks_out=blocks, points_out=points)
    return rep, blocks, points


# --------------------------------------------------------------------------
# long simulations, pinned configurations
# --------------------------------------------------------------------------

@pytest.fixture(scope="session")
def model1_reference():
    """Single-mode run sized so the decay law covers an O(1) horizon.

    t_final is chosen so 4 pi c |z0|^4 t_final = 3 exactly; the box is
    sized so the switch-on burst cannot wrap back within that horizon.
    """
    g = GaussianSpec(1.0, 1.0)
    c = fgr_constant_gaussian(1.0, 1.0)
    z0 = 0.3
    t_final = 3.0 / (4.0 * math.pi * c * abs(z0) ** 4)
    cfg = Model1Config(g=g, box=Box2D(229.0, 256), dt=0.005,
                       t_final=t_final, z0=z0)
    return cfg, simulate_model1(cfg), c


@pytest.fixture(scope="session")
def model2_reference():
    """Two-mode mixed-signature run used for the bookkeeping checks."""
    g = GaussianSpec(0.55, 1.0)
    cfg = Model2Config(
        modes=[(1.75, +1), (1.9, -1)],
        omega=4.0,
        couplings=[Coupling((3, 0), g, g), Coupling((0, 3), g, g)],
        box=Box2D(170.0, 256),
        dt=0.005,
        t_final=20.0,
        z0=[0.03, 0.3],
    )
    return cfg, simulate_model2(cfg)


# --------------------------------------------------------------------------
# sweep pair for the determinism checks
# --------------------------------------------------------------------------

@pytest.fixture(scope="session")
def sweep_pair(tmp_path_factory):
    """The stable-range frequency sweep run with 1 worker and 4 workers."""
    base = tmp_path_factory.mktemp("sweeps")
    results = {}
    for workers in (1, 4):
        out = base / f"w{workers}"
        cfg = load_config(overrides={
            "grid.n": 300,
            "sweep.omega_min": 0.15,
            "sweep.omega_max": 0.175,
            "sweep.count": 6,
            "sweep.chain_length": 4,
            "output.directory": str(out),
        })
        run_sweep(cfg, workers=workers)
        results[workers] = out
    return results[1], results[4]


@pytest.fixture(scope="session")
def sweep_ledger_rows(sweep_pair):
    """Parsed ledger.csv rows from the single-worker sweep."""
    dir1, _ = sweep_pair
    lines = (dir1 / "ledger.csv").read_text().strip().splitlines()
    header = lines[0].split(",")
    rows = []
    for line in lines[1:]:
        rows.append(dict(zip(header, line.split(","))))
    return rows
