"""Point-spectrum catalog, signatures, index counts, and the ledger."""

import numpy as np
import pytest

from vortex_spectra.errors import NoTransition, SignatureMismatch
from vortex_spectra.profiles import (
    RadialGrid,
    RadialPotential,
    continue_family,
    solve_profile,
)
from vortex_spectra.spectra import (
    LEDGER_COLUMNS,
    FilterConfig,
    check_h12,
    detect_omega_cr,
    full_spectrum,
    hypothesis_ledger,
    negative_index,
    trapping_test,
)

# Catalog at omega = 0.16, m = 1, r_max = 40, n = 800, pinned from a
# converged reference run (values stable to the printed digits under
# grid refinement).  (k, lambda, signature)
FROZEN_PAIRS = [
    (0, 0.110227, -1),
    (1, 0.017840, +1),
    (2, 0.002380, +1),
    (2, 0.058690, -1),
    (2, 0.127325, -1),
    (3, 0.031925, -1),
    (3, 0.117043, -1),
]


def _find(rep, k, lam, tol=5e-5):
    hits = [p for p in rep.pairs
            if p.k == k and p.mu.imag == 0.0 and abs(p.lam - lam) < tol]
    return hits[0] if hits else None


def test_catalog_frozen_values(spectrum16):
    rep, _, _ = spectrum16
    for k, lam, s in FROZEN_PAIRS:
        hit = _find(rep, k, lam)
        assert hit is not None, f"missing pair k={k}, lambda={lam}"
        assert hit.s == s, f"signature of k={k}, lambda={lam}"
        assert hit.residual < 1e-7
        assert hit.localization < 0.05


def test_catalog_counts(spectrum16):
    rep, _, _ = spectrum16
    assert rep.spectrally_stable
    assert rep.counts["N_unstable"] == 0
    assert rep.counts["N_discrete_stable"] == 11
    assert rep.counts["N_negative_signature"] == 2


def test_embedded_candidate_flagged(spectrum16):
    rep, _, _ = spectrum16
    embedded = [p for p in rep.pairs if p.embedded_candidate]
    assert any(p.k == 6 and abs(p.lam - 0.18563) < 5e-4 for p in embedded)
    # embedded frequencies sit beyond the essential-band edge
    for p in embedded:
        assert p.lam > rep.omega


def test_kernel_dimensions(spectrum16):
    rep, _, _ = spectrum16
    dims = {e["k"]: (e["geo"], e["alg"]) for e in rep.kernel}
    assert dims[0] == (1, 2)     # phase rotation with a generalized partner
    assert dims[1] == (1, 2)     # translations (no external potential)


def test_negative_index_identity(profile16, spectrum16):
    rep, _, _ = spectrum16
    nix = negative_index(profile16, 8, q_prime=7679.6, report=rep)
    assert nix.n_neg == 5
    assert nix.p_slope == 1
    assert nix.n_negative_pairs == 2
    assert nix.identity_residual == 0


def test_trapping_form_matches_catalog(profile16, spectrum16):
    rep, blocks, _ = spectrum16
    res = trapping_test(profile16, rep, block=blocks.get(1))
    assert res.k == 1 and res.s == +1
    assert res.expected == pytest.approx(-2.0 * res.lam)
    assert res.form_value == pytest.approx(res.expected, rel=1e-9)
    assert res.alpha_exponent == pytest.approx(2.0, abs=0.05)
    assert res.mass_error < 1e-10
    assert res.delta_E < 0                       # energy drops at fixed mass
    assert res.energy_ratio == pytest.approx(1.0, abs=0.05)
    assert res.verdict == "not trapped"


def test_trapping_requires_vectors(profile16):
    rep = full_spectrum(profile16, k_max=2, keep_vectors=False)
    with pytest.raises((ValueError, SignatureMismatch)):
        trapping_test(profile16, rep)


def test_unstable_quartet_below_transition(cq_model, grid800):
    """omega = 0.14 sits on the unstable side: a k = 2 quartet is present."""
    prof = solve_profile(cq_model, RadialPotential.none(), 0.14, 1, grid800)
    rep = full_spectrum(prof, k_max=3)
    assert not rep.spectrally_stable
    assert rep.counts["N_unstable"] >= 1
    quartet = [p for p in rep.pairs if p.k == 2 and p.mu.imag > 0]
    assert quartet, "expected a complex pair in block k=2"
    mu = quartet[0].mu
    assert mu.real == pytest.approx(0.0599359, abs=5e-5)
    assert mu.imag == pytest.approx(0.0373117, abs=5e-5)
    assert quartet[0].s is None                  # no signature off the axis
    embedded = [p for p in rep.pairs if p.k == 3 and p.embedded_candidate]
    assert any(abs(p.lam - 0.155775) < 5e-4 for p in embedded)


def test_resonance_search():
    hits = check_h12([0.03, 0.06], bound=3)
    assert (2, -1) in hits or (-2, 1) in hits
    assert check_h12([0.0319, 0.1170], bound=3) == []
    # near-duplicates cluster to one frequency and cannot self-cancel
    assert check_h12([0.05, 0.05 * (1 + 1e-9)], bound=3) == []


def test_resonance_search_default_bound():
    hits = check_h12([0.0319, 0.1170], omega=0.16)
    assert hits == []
    with pytest.raises(ValueError):
        check_h12([0.03], bound=None)            # no omega, no bound


def test_no_transition_in_stable_bracket(cq_model):
    grid = RadialGrid.uniform(40.0, 300)
    with pytest.raises(NoTransition):
        detect_omega_cr(cq_model, RadialPotential.none(), 1,
                        (0.158, 0.166), grid=grid, pre_scan=3)


def test_ledger_rows_and_csv(tmp_path, cq_model):
    grid = RadialGrid.uniform(40.0, 300)
    fam = continue_family(cq_model, RadialPotential.none(),
                          [0.158, 0.162], 1, grid)
    ledger = hypothesis_ledger(fam, k_max=6)
    assert len(ledger.rows) == 2
    for row in ledger.rows:
        assert row["h5"] and row["h6"] and row["h8"] and row["h14"]
        assert (row["h7_geo"], row["h7_alg"]) == (1, 2)
        assert row["identity_residual"] == 0
        assert row["trap_form"] == pytest.approx(row["trap_expected"], rel=1e-8)
        assert row["min_lambda"] > 0
    # translation kernel of the potential-free run is noted, not counted
    assert any("k=1" in note["note"] for note in ledger.notes)

    path = ledger.to_csv(tmp_path / "ledger.csv")
    lines = path.read_text().strip().splitlines()
    assert lines[0] == ",".join(LEDGER_COLUMNS)
    assert len(lines) == 3
    first = dict(zip(lines[0].split(","), lines[1].split(",")))
    assert first["error"] == ""
    assert first["h6"] == "true"
    assert float(first["omega"]) == pytest.approx(0.158)


def test_filter_config_defaults():
    cfg = FilterConfig()
    assert cfg.residual_tol == 1e-8
    assert cfg.instability_tol == 1e-5
    assert cfg.zero_tol == 1e-3
