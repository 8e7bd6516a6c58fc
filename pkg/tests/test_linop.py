"""Discrete radial operators and harmonic-block assembly."""

import numpy as np
import pytest

from vortex_spectra.linop import (
    assemble_block,
    dump_block,
    essential_band,
    load_block_dump,
    radial_operator,
)
from vortex_spectra.profiles import RadialGrid


def test_radial_operator_accuracy():
    """Apply L_j to r^j e^{-r^2/2} and compare with the analytic image.

    For f = r^j exp(-r^2/2):  -f'' - f'/r + j^2 f / r^2
    = (2j + 2 - r^2) f.  The pole-patched first rows must keep the same
    interior accuracy as the bulk stencil.
    """
    grid = RadialGrid.uniform(30.0, 1200)
    r = grid.r
    for j in (0, 1, 2, 3):
        f = r**j * np.exp(-0.5 * r**2)
        L = radial_operator(grid, j)
        exact = (2 * j + 2 - r**2) * f
        err = np.abs(L @ f - exact)
        interior = slice(1, grid.n - 6)
        assert np.max(err[interior]) < 5e-3, f"j={j}"


def test_weighted_operator_is_symmetric():
    grid = RadialGrid.uniform(30.0, 400)
    for j in (0, 1, 4):
        Lw = radial_operator(grid, j, weighted=True)
        assert np.max(np.abs(Lw - Lw.T)) < 1e-11


def test_weighted_matches_plain_spectraly():
    """Similarity transform preserves eigenvalues (smallest few compared)."""
    grid = RadialGrid.uniform(25.0, 300)
    L = radial_operator(grid, 2)
    Lw = radial_operator(grid, 2, weighted=True)
    mu_plain = np.sort(np.linalg.eigvals(L).real)[:5]
    mu_sym = np.sort(np.linalg.eigvalsh(Lw))[:5]
    assert np.allclose(mu_plain, mu_sym, atol=1e-8)


def test_block_shapes_and_band(profile16):
    block = assemble_block(profile16, 2)
    n = block.n
    assert block.S.shape == (2 * n, 2 * n)
    assert block.K.shape == (2 * n, 2 * n)
    assert block.k == 2 and block.m == 1
    assert block.j_plus == 3 and block.j_minus == 1
    upper_ray, lower_ray = essential_band(profile16.omega)
    assert upper_ray == (0.16, np.inf)
    assert lower_ray == (-np.inf, -0.16)


def test_block_S_symmetric(profile16):
    block = assemble_block(profile16, 1)
    assert np.max(np.abs(block.S - block.S.T)) < 1e-11


def test_k_reflection_antisymmetry(profile16):
    """Negating the harmonic index flips the dynamical spectrum exactly.

    Swapping the two radial components maps the -k block onto the k block
    with a sign: K_{-k} = -P K_k P.  The assembled matrices reuse the
    same entries, so the identity holds entrywise, not just spectrally.
    """
    for k in (1, 2, 5):
        bp = assemble_block(profile16, k)
        bm = assemble_block(profile16, -k)
        n = bp.n
        P = np.zeros((2 * n, 2 * n))
        P[:n, n:] = np.eye(n)
        P[n:, :n] = np.eye(n)
        assert np.max(np.abs(bm.K + P @ bp.K @ P)) < 1e-13


def test_sigma3_form_signature(profile16):
    block = assemble_block(profile16, 3)
    n = block.n
    v = np.zeros(2 * n)
    v[5] = 1.0
    assert block.sigma3_form(v) == pytest.approx(1.0)
    w = np.zeros(2 * n)
    w[n + 5] = 1.0
    assert block.sigma3_form(w) == pytest.approx(-1.0)


def test_dump_roundtrip(tmp_path, profile16):
    block = assemble_block(profile16, 2)
    for which in ("K", "S"):
        base = tmp_path / f"block_{which}"
        dump_block(block, base, which=which)
        mat, header = load_block_dump(base)
        ref = block.K if which == "K" else block.S
        assert np.array_equal(mat, ref)
        assert header["k"] == 2
        assert header["n"] == block.n
        assert header["which"] == which
        assert header["omega"] == pytest.approx(0.16)
