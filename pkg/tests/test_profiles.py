"""Existence window, Newton solver, continuation, and profile round-trips."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vortex_spectra.errors import (
    EmptyWindow,
    GridMismatch,
    OutsideExistenceWindow,
)
from vortex_spectra.profiles import (
    NonlinearityModel,
    RadialGrid,
    RadialPotential,
    continue_family,
    continue_in_epsilon,
    existence_window,
    load_profile,
    profile_mass,
    save_profile,
    shoot_profile,
    solve_profile,
)


# --------------------------------------------------------------------------
# existence window
# --------------------------------------------------------------------------

def test_window_cubic_quintic_exact(cq_model):
    win = existence_window(cq_model)
    assert win.lo == 0.0
    assert win.hi == 3.0 / 16.0          # closed form, no quadrature involved


def test_window_numeric_agrees_with_analytic(cq_model):
    win_a = existence_window(cq_model, method="analytic")
    win_n = existence_window(cq_model, method="numeric")
    assert abs(win_n.hi - win_a.hi) <= 1e-6


def test_window_pure_cubic_is_unbounded():
    win = existence_window(NonlinearityModel.cubic())
    assert win.lo == 0.0
    assert math.isinf(win.hi)


def test_window_defocusing_raises():
    repulsive = NonlinearityModel.custom(lambda s: s, lambda s: np.ones_like(s),
                                         lambda s: 0.5 * s**2)
    with pytest.raises(EmptyWindow):
        existence_window(repulsive)


# --------------------------------------------------------------------------
# Newton solver
# --------------------------------------------------------------------------

def test_profile_residual_and_shape(profile16):
    assert profile16.residual_norm < 1e-8
    assert np.all(profile16.psi >= -1e-12)
    # m = 1 vortex vanishes linearly toward the pole (grid is half-offset,
    # so the first node sits at h/2, not at r = 0)
    assert profile16.psi[0] < 0.01 * profile16.psi.max()
    assert profile16.boundary_value < 1e-6
    assert profile16.newton_iterations < 40


def test_profile_mass_frozen_value(profile16):
    # pinned against an independent shooting + quadrature computation
    assert profile_mass(profile16) == pytest.approx(135.84, rel=2e-3)


def test_profile_peak_interior(profile16):
    r_peak = profile16.grid.r[np.argmax(profile16.psi)]
    assert 1.0 < r_peak < 10.0


def test_outside_window_is_diagnosed(cq_model):
    grid = RadialGrid.uniform(40.0, 300)
    with pytest.raises(OutsideExistenceWindow) as err:
        solve_profile(cq_model, RadialPotential.none(), 0.25, 1, grid)
    assert "0.1875" in str(err.value)


def test_bad_guess_recovers_via_seed_scan(cq_model):
    """A hopeless initial guess falls back to the internal bump scan."""
    grid = RadialGrid.uniform(40.0, 300)
    ref = solve_profile(cq_model, RadialPotential.none(), 0.16, 1, grid)
    prof = solve_profile(cq_model, RadialPotential.none(), 0.16, 1, grid,
                         initial_guess=np.zeros(grid.n))
    assert np.max(np.abs(prof.psi - ref.psi)) < 1e-7
    with pytest.raises(GridMismatch):
        solve_profile(cq_model, RadialPotential.none(), 0.16, 1, grid,
                      initial_guess=np.zeros(17))


def test_shooting_cross_validation(cq_model, profile16):
    """Newton and shooting must produce the same radial curve."""
    amp, evaluate = shoot_profile(cq_model, RadialPotential.none(), 0.16, 1)
    r = profile16.grid.r
    inner = r <= 20.0
    diff = np.max(np.abs(evaluate(r[inner]) - profile16.psi[inner]))
    assert diff < 1e-3
    assert amp > 0


# --------------------------------------------------------------------------
# continuation
# --------------------------------------------------------------------------

def test_family_mass_slope_consistent(cq_model):
    grid = RadialGrid.uniform(40.0, 300)
    omegas = np.linspace(0.15, 0.17, 5)
    fam = continue_family(cq_model, RadialPotential.none(), omegas, 1, grid)
    assert fam.q_prime_sign_consistent()
    assert np.all(np.diff(fam.q) > 0)          # mass grows toward the window edge
    assert np.all(fam.q_prime > 0)


def test_epsilon_continuation_deforms_smoothly(cq_model):
    grid = RadialGrid.uniform(40.0, 300)
    pot = RadialPotential.gaussian_well(1.0)   # epsilon supplied per member
    fam = continue_in_epsilon(cq_model, pot, [0.0, 0.005, 0.01], 0.16, 1, grid)
    devs = fam.sup_deviation()
    assert devs[0] == 0.0
    assert 0.0 < devs[1] < devs[2] < 0.5
    assert fam.profiles[2].potential.epsilon == 0.01


def test_save_load_roundtrip(tmp_path, profile16):
    base = tmp_path / "vortex"
    csv_path, json_path = save_profile(profile16, base)
    assert csv_path.exists() and json_path.exists()
    r, psi, meta = load_profile(base)
    assert np.array_equal(r, profile16.grid.r)        # 17g is bit-faithful
    assert np.array_equal(psi, profile16.psi)
    assert meta["omega"] == profile16.omega
    assert meta["m"] == profile16.m
    assert meta["q"] == pytest.approx(profile_mass(profile16))
    assert meta["grid"] == {"r_max": 40.0, "n": 800}


def test_boundary_decay_on_wide_grid(cq_model):
    grid = RadialGrid.uniform(55.0, 900)
    prof = solve_profile(cq_model, RadialPotential.none(), 0.16, 1, grid)
    assert prof.boundary_value < 1e-8


@settings(max_examples=10, deadline=None)
@given(omega=st.floats(min_value=0.12, max_value=0.18))
def test_solution_branch_properties(omega):
    """Any solvable frequency yields a nonnegative localized profile."""
    model = NonlinearityModel.cubic_quintic()
    grid = RadialGrid.uniform(40.0, 200)
    prof = solve_profile(model, RadialPotential.none(), omega, 1, grid)
    assert prof.residual_norm < 1e-7
    assert np.all(prof.psi >= -1e-10)
    assert prof.psi.max() < 1.5
    assert profile_mass(prof) > 0
