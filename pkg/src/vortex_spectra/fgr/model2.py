"""Several signed oscillators radiating through a massive 2D field.

Reduced equations (field component h on the box, amplitudes z_j, signs
s_j in {-1, +1}, field mass omega > 0, couplings g = (g1, g2) attached to
monomials z^alpha with frequency L = lambda . alpha > omega):

    i dh/dt  = (-Lap + omega) h + sum_alpha [ z^alpha g1_a - conj(z)^alpha conj(g2_a) ]
    dz_j/dt  = i lambda_j z_j - i s_j sum_alpha alpha_j conj(z)^(alpha - e_j) conj(I_a)
    I_a      = \\int ( g1_a conj(h) - g2_a h ) dx

Conserved energy:

    H = - sum_j s_j lambda_j |z_j|^2 + \\int (|grad h|^2 + omega |h|^2) dx
        + sum_alpha 2 Re( z^alpha I_a )

Each channel radiates on the circle |xi| = sqrt(L - omega); summing the
channel intensities D_L gives the secular drift of the signed energy
sum_j s_j lambda_j |z_j|^2 at rate  +2 pi sum_L L D_L >= 0.  The running
quadrature of that rate (with a minus sign) is the ``leak_integral``
column, so signed_energy + leak_integral stays at its initial value.

The same circle intensities define the leak functional

    Gamma(zeta) = -4 pi sum_{L} L D_L(zeta) <= 0

restricted to the non-cascading channels M (those with
lambda . alpha - lambda_k < omega whenever alpha_k > 0); its normalized
infimum over the unit sphere is the strict-negativity margin.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from ..errors import (BoxWrap, ConfigError, CouplingConstraint, Unstable)
from .box import Box2D, GaussianSpec, inverse_unitary_ft, unitary_ft
from .constants import circle_samples
from .series import TimeSeries

__all__ = ["Coupling", "Model2Config", "simulate_model2", "gamma_model2",
           "GammaReport"]

_LEVEL_MERGE_TOL = 1e-9


@dataclasses.dataclass
class Coupling:
    """One interaction channel: monomial exponents and a two-component profile."""

    alpha: tuple[int, ...]
    g1: object
    g2: object

    def __post_init__(self) -> None:
        self.alpha = tuple(int(a) for a in self.alpha)
        if any(a < 0 for a in self.alpha) or sum(self.alpha) == 0:
            raise ConfigError("coupling exponents must be nonnegative, not all zero")

    def fields(self, box: Box2D) -> tuple[np.ndarray, np.ndarray]:
        out = []
        for g in (self.g1, self.g2):
            if isinstance(g, GaussianSpec):
                out.append(g.render(box).astype(complex))
            else:
                arr = np.asarray(g, dtype=complex)
                if arr.shape != (box.n, box.n):
                    raise ConfigError("gridded coupling does not match the box grid")
                out.append(arr)
        return out[0], out[1]


@dataclasses.dataclass
class Model2Config:
    modes: list          # (lambda_j, s_j) pairs
    omega: float
    couplings: list      # Coupling objects
    box: Box2D
    dt: float
    t_final: float
    z0: list
    save_points: int = 400
    wrap_tol: float = 1e-4
    n_angle: int = 256

    def __post_init__(self) -> None:
        self.lambdas = np.array([float(m[0]) for m in self.modes])
        self.signs = np.array([int(m[1]) for m in self.modes])
        if np.any(self.lambdas <= 0):
            raise ConfigError("mode frequencies must be positive")
        if not set(np.unique(self.signs)) <= {-1, 1}:
            raise ConfigError("mode signs must be +1 or -1")
        if self.omega <= 0:
            raise ConfigError("field mass must be positive")
        if self.dt <= 0 or self.t_final <= self.dt:
            raise ConfigError("need 0 < dt < t_final")
        self.z0 = np.array([complex(z) for z in self.z0])
        if self.z0.size != self.lambdas.size:
            raise ConfigError("z0 length does not match the number of modes")
        for cpl in self.couplings:
            if len(cpl.alpha) != self.lambdas.size:
                raise ConfigError("coupling exponent length does not match modes")
            if self.level(cpl) <= self.omega:
                raise CouplingConstraint(
                    f"channel {cpl.alpha} has frequency {self.level(cpl):.6g} "
                    f"<= field mass {self.omega:.6g}; it cannot radiate")

    def level(self, cpl: Coupling) -> float:
        return float(np.dot(self.lambdas, cpl.alpha))

    def merged_levels(self, couplings=None) -> list[tuple[float, list[int]]]:
        """Group channel indices by frequency, merging near-collisions."""
        if couplings is None:
            couplings = self.couplings
        levels: list[tuple[float, list[int]]] = []
        for idx, cpl in enumerate(couplings):
            lv = self.level(cpl)
            for i, (l0, members) in enumerate(levels):
                if abs(lv - l0) < _LEVEL_MERGE_TOL:
                    members.append(idx)
                    break
            else:
                levels.append((lv, [idx]))
        return sorted(levels, key=lambda p: p[0])

    def non_cascading(self) -> list[int]:
        """Indices of channels with L - lambda_k < omega for every active mode."""
        out = []
        for idx, cpl in enumerate(self.couplings):
            lv = self.level(cpl)
            if all(lv - self.lambdas[k] < self.omega
                   for k in range(self.lambdas.size) if cpl.alpha[k] > 0):
                out.append(idx)
        return out


def _monomial(z: np.ndarray, alpha: tuple[int, ...]) -> complex:
    out = 1.0 + 0.0j
    for zj, aj in zip(z, alpha):
        if aj:
            out *= zj**aj
    return out


def _tail_check(field: np.ndarray, what: str) -> None:
    peak = float(np.max(np.abs(field)))
    if peak == 0.0:
        return
    edge = max(float(np.max(np.abs(field[0, :]))), float(np.max(np.abs(field[-1, :]))),
               float(np.max(np.abs(field[:, 0]))), float(np.max(np.abs(field[:, -1]))))
    if edge > 1e-10 * peak:
        raise ConfigError(f"{what} does not vanish at the box edge "
                          f"(relative tail {edge / peak:.2e})")


class _ChannelData:
    """Pre-transformed per-channel arrays used by the stepper."""

    def __init__(self, cfg: Model2Config, cpl: Coupling):
        box = cfg.box
        g1, g2 = cpl.fields(box)
        _tail_check(g1, f"channel {cpl.alpha} first component")
        _tail_check(g2, f"channel {cpl.alpha} second component")
        self.alpha = cpl.alpha
        self.level = cfg.level(cpl)
        self.g1_hat = unitary_ft(box, g1)
        self.g2c_hat = unitary_ft(box, np.conj(g2))
        rho = math.sqrt(self.level - cfg.omega)
        src = cpl.g2 if isinstance(cpl.g2, GaussianSpec) else g2
        self.circle = circle_samples(src, box, rho, cfg.n_angle)


def simulate_model2(cfg: Model2Config) -> TimeSeries:
    box = cfg.box
    channels = [_ChannelData(cfg, cpl) for cpl in cfg.couplings]
    levels = cfg.merged_levels()
    lam, s = cfg.lambdas, cfg.signs
    J = lam.size
    dxi2 = box.dxi**2
    n_angle = cfg.n_angle

    if channels:
        v_max = 2.0 * max(math.sqrt(ch.level - cfg.omega) for ch in channels)
        if v_max * cfg.t_final >= 0.5 * box.length:
            raise ConfigError(
                f"radiated waves travel ~{v_max * cfg.t_final:.1f} but the "
                f"half-box is {0.5 * box.length:.1f}")

    sym = box.laplacian_symbol() + cfg.omega
    n_steps = int(round(cfg.t_final / cfg.dt))
    dt = cfg.t_final / n_steps
    stride = max(1, n_steps // (cfg.save_points - 1))
    e_full, e_half = np.exp(-1j * sym * dt), np.exp(-1j * sym * (0.5 * dt))
    ez_full, ez_half = np.exp(1j * lam * dt), np.exp(1j * lam * (0.5 * dt))

    h_hat = np.zeros_like(sym, dtype=complex)
    z = cfg.z0.astype(complex)

    def nonlinear(hh, zz):
        n_h = np.zeros_like(hh)
        n_z = np.zeros(J, dtype=complex)
        for ch in channels:
            zp = _monomial(zz, ch.alpha)
            n_h += zp * ch.g1_hat - np.conj(zp) * ch.g2c_hat
            i_a = (np.vdot(hh, ch.g1_hat) - np.vdot(ch.g2c_hat, hh)) * dxi2
            for j in range(J):
                if ch.alpha[j]:
                    zp_red = _monomial(zz, _reduce(ch.alpha, j))
                    n_z[j] += ch.alpha[j] * np.conj(zp_red) * np.conj(i_a)
        return -1j * n_h, -1j * (s * n_z)

    def leak_rate(zz) -> float:
        total = 0.0
        for lv, members in levels:
            amp = np.zeros(n_angle, dtype=complex)
            for idx in members:
                amp += _monomial(zz, channels[idx].alpha) * channels[idx].circle
            d_l = 0.5 * (2.0 * math.pi / n_angle) * float(np.sum(np.abs(amp) ** 2))
            total += lv * d_l
        return -2.0 * math.pi * total

    def energy(hh, zz) -> float:
        field = float(np.sum(sym * np.abs(hh) ** 2)) * dxi2
        cross = 0.0
        for ch in channels:
            i_a = (np.vdot(hh, ch.g1_hat) - np.vdot(ch.g2c_hat, hh)) * dxi2
            cross += 2.0 * float(np.real(_monomial(zz, ch.alpha) * i_a))
        return float(-np.sum(s * lam * np.abs(zz) ** 2)) + field + cross

    t_out, z_out, signed_out, leak_out, field_out, ham_out = [], [], [], [], [], []
    leak = 0.0
    rate_prev = leak_rate(z)

    def record(t_now: float) -> None:
        t_out.append(t_now)
        z_out.append(np.abs(z) ** 2)
        signed_out.append(float(np.sum(s * lam * np.abs(z) ** 2)))
        leak_out.append(leak)
        field_out.append(float(np.sum(np.abs(h_hat) ** 2)) * dxi2)
        ham_out.append(energy(h_hat, z))
        frame = box.frame_mass_fraction(inverse_unitary_ft(box, h_hat))
        if frame > cfg.wrap_tol:
            raise BoxWrap(f"field mass fraction {frame:.2e} in the boundary "
                          f"frame at t={t_now:.3g}")

    record(0.0)
    z0_mag = max(float(np.max(np.abs(z))), 1e-30)
    for step in range(n_steps):
        a1h, a1z = nonlinear(h_hat, z)
        a2h, a2z = nonlinear(e_half * (h_hat + 0.5 * dt * a1h),
                             ez_half * (z + 0.5 * dt * a1z))
        a3h, a3z = nonlinear(e_half * h_hat + 0.5 * dt * a2h,
                             ez_half * z + 0.5 * dt * a2z)
        a4h, a4z = nonlinear(e_full * h_hat + dt * (e_half * a3h),
                             ez_full * z + dt * (ez_half * a3z))
        h_hat = e_full * h_hat + (dt / 6.0) * (
            e_full * a1h + 2.0 * e_half * (a2h + a3h) + a4h)
        z = ez_full * z + (dt / 6.0) * (
            ez_full * a1z + 2.0 * ez_half * (a2z + a3z) + a4z)

        rate = leak_rate(z)
        leak += 0.5 * dt * (rate_prev + rate)
        rate_prev = rate

        if not np.all(np.isfinite(z.view(float))):
            raise Unstable(f"mode amplitudes lost at step {step}")
        if float(np.max(np.abs(z))) > 1e3 * z0_mag + 1.0:
            raise Unstable(f"mode amplitudes blew up at step {step}")
        if (step + 1) % stride == 0 or step == n_steps - 1:
            record((step + 1) * dt)

    return TimeSeries(
        t=np.array(t_out),
        z_abs2=np.array(z_out),
        signed_energy=np.array(signed_out),
        leak_integral=np.array(leak_out),
        field_l2=np.array(field_out),
        predicted=None,
        hamiltonian=np.array(ham_out),
    )


def _reduce(alpha: tuple[int, ...], j: int) -> tuple[int, ...]:
    out = list(alpha)
    out[j] -= 1
    return tuple(out)


@dataclasses.dataclass
class GammaReport:
    gamma_values: np.ndarray
    h13_margin: float
    levels: list
    m_alphas: list
    samples: np.ndarray

    def all_nonpositive(self, tol: float = 0.0) -> bool:
        return bool(np.all(self.gamma_values <= tol))


def gamma_model2(cfg: Model2Config, zeta_samples=None, n_samples: int = 64,
                 seed: int = 0, n_angle: int = 512) -> GammaReport:
    """Leak functional on mode-space directions and its negativity margin.

    Only the non-cascading channels M enter (see module docstring).  For
    each sampled unit vector zeta the functional
    Gamma(zeta) = -4 pi sum_L L D_L(zeta) is evaluated by circle
    quadrature; the margin is min over samples of
    -Gamma(zeta) / sum_{alpha in M} |zeta^alpha|^2.  A zero margin means
    the strict-negativity hypothesis fails for this configuration (e.g.
    transforms vanishing on every resonant circle).
    """
    m_idx = cfg.non_cascading()
    m_cpls = [cfg.couplings[i] for i in m_idx]
    if zeta_samples is None:
        rng = np.random.default_rng(seed)
        J = cfg.lambdas.size
        raw = rng.standard_normal((n_samples, J)) + 1j * rng.standard_normal((n_samples, J))
        zeta_samples = raw / np.linalg.norm(raw, axis=1)[:, None]
    else:
        zeta_samples = np.atleast_2d(np.asarray(zeta_samples, dtype=complex))

    circles = {}
    for i in m_idx:
        cpl = cfg.couplings[i]
        lv = cfg.level(cpl)
        rho = math.sqrt(lv - cfg.omega)
        _, g2 = cpl.fields(cfg.box)
        src = cpl.g2 if isinstance(cpl.g2, GaussianSpec) else g2
        circles[i] = circle_samples(src, cfg.box, rho, n_angle)

    levels = cfg.merged_levels(m_cpls)
    gammas = np.empty(zeta_samples.shape[0])
    margins = np.empty(zeta_samples.shape[0])
    for row, zeta in enumerate(zeta_samples):
        total = 0.0
        for lv, members in levels:
            amp = np.zeros(n_angle, dtype=complex)
            for loc in members:
                gi = m_idx[loc]
                amp += _monomial(zeta, m_cpls[loc].alpha) * circles[gi]
            d_l = 0.5 * (2.0 * math.pi / n_angle) * float(np.sum(np.abs(amp) ** 2))
            total += lv * d_l
        gammas[row] = -4.0 * math.pi * total
        denom = sum(abs(_monomial(zeta, c.alpha)) ** 2 for c in m_cpls)
        margins[row] = -gammas[row] / denom if denom > 1e-300 else 0.0

    h13_margin = float(np.min(margins)) if margins.size and m_cpls else 0.0
    return GammaReport(
        gamma_values=gammas,
        h13_margin=h13_margin,
        levels=[lv for lv, _ in levels],
        m_alphas=[c.alpha for c in m_cpls],
        samples=zeta_samples,
    )
