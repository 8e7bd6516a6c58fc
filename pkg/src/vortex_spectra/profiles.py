"""Standing-wave profiles for the planar NLS with a saturating nonlinearity.

The model is i u_t = -Lap u + eps V(|x|) u + beta(|u|^2) u on R^2.  A vortex
standing wave u = e^{i omega t} e^{i m theta} psi(r) solves the radial ODE

    -psi'' - psi'/r + (m^2/r^2) psi + omega psi + eps V psi + beta(psi^2) psi = 0

with psi(0) = 0 (m != 0), psi(inf) = 0.  This module provides the
nonlinearity/potential/grid types, the existence window of admissible
frequencies, a damped-Newton collocation solver on the shared half-offset
grid, parameter continuation in omega and in eps, the mass/energy
functionals, plain-text serialization, and an independent shooting
integrator used to cross-validate the collocation answers.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from functools import partial
from pathlib import Path
from typing import Callable, NamedTuple, Sequence

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import solve_banded
from scipy.optimize import minimize_scalar

from .errors import (
    EmptyWindow,
    GridMismatch,
    NoConvergence,
    NumericalError,
    OutsideExistenceWindow,
    TrivialSolution,
)
from .linop import radial_operator

__all__ = [
    "NonlinearityModel",
    "RadialGrid",
    "RadialPotential",
    "RadialProfile",
    "ProfileFamily",
    "EpsilonFamily",
    "ExistenceWindow",
    "existence_window",
    "solve_profile",
    "continue_family",
    "continue_in_epsilon",
    "profile_mass",
    "profile_energy",
    "profile_action",
    "save_profile",
    "load_profile",
    "shoot_profile",
]


# --------------------------------------------------------------------------
# nonlinearity
# --------------------------------------------------------------------------

def _cq_beta(s):
    return -s + s * s


def _cq_beta_prime(s):
    return -1.0 + 2.0 * s


def _cq_antiderivative(s):
    return -0.5 * s * s + (s ** 3) / 3.0


def _cubic_beta(s):
    return -s


def _cubic_beta_prime(s):
    return -1.0 + 0.0 * s


def _cubic_antiderivative(s):
    return -0.5 * s * s


@dataclass(eq=False)
class NonlinearityModel:
    """Local nonlinearity beta(s), s = |u|^2, with derivative and antiderivative.

    ``antiderivative`` is B(s) = int_0^s beta; it enters the energy density.
    ``beta(0) == 0`` is required so the zero state solves the equation.
    """

    kind: str
    beta: Callable[[np.ndarray], np.ndarray]
    beta_prime: Callable[[np.ndarray], np.ndarray]
    antiderivative: Callable[[np.ndarray], np.ndarray]

    def __post_init__(self):
        b0 = float(self.beta(np.array(0.0)))
        if abs(b0) > 1e-12:
            raise ValueError(f"beta(0) must vanish, got {b0}")

    @classmethod
    def cubic_quintic(cls) -> "NonlinearityModel":
        """beta(s) = -s + s^2: focusing cubic, defocusing quintic."""
        return cls("cubic_quintic", _cq_beta, _cq_beta_prime, _cq_antiderivative)

    @classmethod
    def cubic(cls) -> "NonlinearityModel":
        """Pure focusing cubic beta(s) = -s (used for edge-case tests)."""
        return cls("cubic", _cubic_beta, _cubic_beta_prime, _cubic_antiderivative)

    @classmethod
    def custom(cls, beta, beta_prime, antiderivative, kind="custom"):
        return cls(kind, beta, beta_prime, antiderivative)


# --------------------------------------------------------------------------
# grid and potential
# --------------------------------------------------------------------------

@dataclass(eq=False)
class RadialGrid:
    """Uniform half-offset radial grid: r_i = (i + 1/2) h, i = 0..n-1.

    The nodes avoid r = 0, so 1/r terms are finite everywhere, and the
    quadrature weights w_i = h r_i integrate f(r) r dr by the midpoint rule
    (exact for constants, O(h^2) generally).
    """

    r_max: float
    n: int
    r: np.ndarray = field(repr=False)
    w: np.ndarray = field(repr=False)

    @classmethod
    def uniform(cls, r_max: float = 40.0, n: int = 2000) -> "RadialGrid":
        if n < 8:
            raise GridMismatch(f"need at least 8 radial nodes, got {n}")
        h = r_max / n
        r = (np.arange(n) + 0.5) * h
        return cls(r_max=float(r_max), n=int(n), r=r, w=h * r)

    @property
    def h(self) -> float:
        return self.r_max / self.n

    def integrate(self, values: np.ndarray) -> float:
        """Integral of ``values`` against r dr (no angular factor)."""
        return float(np.dot(self.w, values))

    def compatible(self, other: "RadialGrid") -> bool:
        return self.n == other.n and abs(self.r_max - other.r_max) < 1e-12


def _zero_shape(r):
    return np.zeros_like(np.asarray(r, dtype=float))


def _gaussian_well_shape(r, depth, width):
    rr = np.asarray(r, dtype=float)
    return -depth * np.exp(-(rr * rr) / (2.0 * width * width))


@dataclass(eq=False)
class RadialPotential:
    """External radial potential entering as eps * V(r).

    The shape V is held separately from the strength eps so continuation in
    eps can reuse one shape.  ``pole_curvature`` is V''(0), the quantity
    controlling how a trapping well splits symmetry-protected zero modes.
    """

    shape: Callable[[np.ndarray], np.ndarray]
    epsilon: float = 0.0
    name: str = "custom"

    @classmethod
    def none(cls) -> "RadialPotential":
        return cls(shape=_zero_shape, epsilon=0.0, name="none")

    @classmethod
    def gaussian_well(cls, epsilon: float, depth: float = 1.0,
                      width: float = 1.0) -> "RadialPotential":
        return cls(
            shape=partial(_gaussian_well_shape, depth=depth, width=width),
            epsilon=float(epsilon),
            name="gaussian_well",
        )

    def values(self, r: np.ndarray) -> np.ndarray:
        return np.asarray(self.shape(r), dtype=float)

    @property
    def pole_curvature(self) -> float:
        """V''(0) by fourth-order central differences on the even extension."""
        h = 1e-3
        pts = self.values(np.array([0.0, h, 2 * h]))
        # even function: V(-h) = V(h)
        return float((-2 * pts[2] + 32 * pts[1] - 30 * pts[0]) / (12 * h * h))

    def tail_value(self, r_max: float) -> float:
        return float(abs(self.epsilon) * abs(self.values(np.array([r_max]))[0]))


# --------------------------------------------------------------------------
# existence window
# --------------------------------------------------------------------------

class ExistenceWindow(NamedTuple):
    lo: float
    hi: float


def existence_window(
    model: NonlinearityModel,
    s_max: float = 6.0,
    method: str = "auto",
) -> ExistenceWindow:
    """Frequency window (0, omega_star) admitting decaying standing waves.

    omega_star = sup_{s > 0} of -B(s^2)/s^2 with B the antiderivative of
    beta.  For the cubic-quintic model the supremum is attained at s^2 = 3/4
    and equals 3/16 exactly; the analytic branch returns that value.  The
    numeric branch maximizes on a bracket and then polishes by golden
    section to 1e-8, flagging an unbounded maximizer (pure focusing cubic)
    as an infinite window.

    Raises
    ------
    EmptyWindow
        If the supremum is not positive (defocusing nonlinearities).
    """
    if method not in ("auto", "analytic", "numeric"):
        raise ValueError(f"unknown method {method!r}")
    if method in ("auto", "analytic") and model.kind == "cubic_quintic":
        return ExistenceWindow(0.0, 3.0 / 16.0)
    if method == "analytic":
        raise ValueError(f"no analytic window for model kind {model.kind!r}")

    # work in t = s^2; objective f(t) = -B(t)/t
    def f(t):
        return -float(model.antiderivative(np.array(t))) / t

    t_max = s_max * s_max
    ts = np.geomspace(1e-8, t_max, 400)
    vals = np.array([f(t) for t in ts])
    i_best = int(np.argmax(vals))
    if vals[i_best] <= 0.0:
        raise EmptyWindow(
            "no positive frequency admits decaying states for this nonlinearity"
        )
    if i_best >= len(ts) - 2 and vals[-1] >= vals[-2]:
        # still climbing at the edge of the search range: unbounded window
        return ExistenceWindow(0.0, math.inf)
    lo = ts[max(i_best - 1, 0)]
    hi = ts[min(i_best + 1, len(ts) - 1)]
    res = minimize_scalar(lambda t: -f(t), bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-10})
    return ExistenceWindow(0.0, float(-res.fun))


# --------------------------------------------------------------------------
# profile container and functionals
# --------------------------------------------------------------------------

@dataclass(eq=False)
class RadialProfile:
    """A solved (or assembled) vortex profile on a radial grid."""

    grid: RadialGrid
    psi: np.ndarray
    omega: float
    m: int
    model: NonlinearityModel
    potential: RadialPotential
    residual_norm: float = math.nan
    newton_iterations: int = 0

    @property
    def boundary_value(self) -> float:
        """|psi| at the outermost node; should sit at truncation level."""
        return float(abs(self.psi[-1]))

    def mass(self) -> float:
        return profile_mass(self)

    def energy(self) -> float:
        return profile_energy(self)

    def action(self) -> float:
        return profile_action(self)


def profile_mass(profile: RadialProfile) -> float:
    """Q = (1/2) int |u|^2 dx = pi * int psi^2 r dr."""
    return math.pi * profile.grid.integrate(profile.psi ** 2)


def profile_energy(profile: RadialProfile) -> float:
    """E = pi * int [ psi'^2 + (m^2/r^2) psi^2 + eps V psi^2 + B(psi^2) ] r dr.

    The gradient part is evaluated through the discrete operator quadratic
    form <L_m psi, psi>, which matches the integrated-by-parts Dirichlet
    form up to boundary terms at truncation level.
    """
    g = profile.grid
    psi = profile.psi
    L = radial_operator(g, profile.m)
    grad_part = float(np.dot(g.w, (L @ psi) * psi))
    pot = profile.potential
    local = pot.epsilon * pot.values(g.r) * psi ** 2 + profile.model.antiderivative(psi ** 2)
    return math.pi * (grad_part + g.integrate(local))


def profile_action(profile: RadialProfile) -> float:
    """d = E + omega Q, the functional whose critical points are profiles."""
    return profile_energy(profile) + profile.omega * profile_mass(profile)


# --------------------------------------------------------------------------
# Newton solver
# --------------------------------------------------------------------------

def _to_banded(A: np.ndarray) -> np.ndarray:
    """Pack a pentadiagonal matrix into solve_banded's (2,2) layout."""
    n = A.shape[0]
    ab = np.zeros((5, n))
    for off in range(-2, 3):
        diag = np.diagonal(A, off)
        if off >= 0:
            ab[2 - off, off:] = diag
        else:
            ab[2 - off, : n + off] = diag
    return ab


def _profile_residual(psi, L, local_lin, model):
    return L @ psi + local_lin * psi + model.beta(psi * psi) * psi


def _newton_attempt(psi0, L, local_lin, model, tol, max_iter):
    """Damped Newton iteration; returns (psi, res_norm, iters) or None."""
    psi = psi0.copy()
    F = _profile_residual(psi, L, local_lin, model)
    norm = float(np.max(np.abs(F)))
    for it in range(1, max_iter + 1):
        if norm < tol:
            return psi, norm, it - 1
        s2 = psi * psi
        jac_diag = local_lin + model.beta(s2) + 2.0 * s2 * model.beta_prime(s2)
        J = L.copy()
        J[np.diag_indices(len(psi))] += jac_diag
        try:
            step = solve_banded((2, 2), _to_banded(J), -F)
        except Exception:
            return None
        lam = 1.0
        while lam >= 1.0 / 64.0:
            trial = psi + lam * step
            Ft = _profile_residual(trial, L, local_lin, model)
            nt = float(np.max(np.abs(Ft)))
            if nt < norm * (1.0 - 1e-4 * lam) or nt < tol:
                psi, F, norm = trial, Ft, nt
                break
            lam *= 0.5
        else:
            return None  # line search stalled
    return (psi, norm, max_iter) if norm < tol else None


def _initial_guesses(grid: RadialGrid, m: int):
    """Coarse 2-parameter family of bump guesses A * g_sigma(r)."""
    out = []
    for sigma in (2.0, 3.0, 4.5, 6.5, 9.0, 1.4):
        g = grid.r ** m * np.exp(-((grid.r / sigma) ** 2))
        peak = g.max()
        if peak <= 0:
            continue
        g = g / peak
        for amp in (0.85, 0.65, 1.0, 0.5, 1.15):
            out.append(amp * g)
    return out


def _admissible(psi: np.ndarray, grid: RadialGrid) -> str | None:
    """Reject converged iterates that are not the localized positive state."""
    amp = float(np.max(np.abs(psi)))
    if amp < 1e-5:
        return "trivial"
    if float(psi.min()) < -1e-6 * max(1.0, amp):
        return "sign-changing"
    outer = grid.r > 0.85 * grid.r_max
    tot = float(np.dot(grid.w, psi * psi))
    if tot > 0:
        frac = float(np.dot(grid.w[outer], psi[outer] ** 2)) / tot
        if frac > 1e-2:
            return "boundary-pinned"
    return None


def _solve_ladder(model, potential, omega, m, grid, tol, max_iter):
    """Frequency continuation from an easier anchor up to ``omega``.

    Near the edge of the existence window the states become wide flat-top
    discs outside the basin of any fixed-shape guess; walking omega up in
    adaptive steps from a mid-window anchor reaches them reliably.
    """
    for frac in (0.92, 0.85, 0.75, 0.6, 0.45):
        try:
            cur = solve_profile(model, potential, omega * frac, m, grid,
                                tol=tol, max_iter=max_iter, _ladder=False)
        except NumericalError:
            continue
        w = omega * frac
        dw = (omega - w) / 4
        steps = 0
        while w < omega * (1 - 1e-14) and steps < 200:
            remaining = omega - w
            nw = omega if dw >= remaining * 0.999 else w + dw
            try:
                cur = solve_profile(model, potential, nw, m, grid,
                                    initial_guess=cur.psi, tol=tol,
                                    max_iter=max_iter,
                                    _ladder=False, _scan=False)
            except NumericalError:
                dw *= 0.5
                if dw < 2e-5:
                    break
                continue
            w = nw
            dw *= 1.7
            steps += 1
        if w >= omega * (1 - 1e-14):
            return cur
    return None


def solve_profile(
    model: NonlinearityModel,
    potential: RadialPotential,
    omega: float,
    m: int,
    grid: RadialGrid | None = None,
    initial_guess: np.ndarray | None = None,
    tol: float = 1e-8,
    max_iter: int = 80,
    _ladder: bool = True,
    _scan: bool = True,
) -> RadialProfile:
    """Solve the radial profile equation by damped Newton collocation.

    Without an ``initial_guess`` a small grid of bump profiles is scanned,
    ordered by initial residual, and Newton is attempted from the best few;
    if every direct attempt fails, frequency continuation from an easier
    anchor is tried before giving up.  A converged iterate is rejected
    (and the next guess tried) if it is numerically zero, changes sign
    beyond rounding level, or carries visible mass at the outer boundary
    (a box-pinned state rather than the localized profile).

    Raises
    ------
    TrivialSolution
        Every convergent attempt collapsed to zero.
    NoConvergence
        No attempt converged to an admissible profile.
    """
    if grid is None:
        grid = RadialGrid.uniform()
    if omega <= 0:
        raise NoConvergence(f"omega must be positive, got {omega}")
    if potential.epsilon == 0.0:
        window = existence_window(model)
        if omega >= window.hi:
            raise OutsideExistenceWindow(
                f"omega={omega} is at or beyond the existence window "
                f"(0, {window.hi:.6g}) of the {model.kind} model; no "
                "localized profile exists there")
    L = radial_operator(grid, m)
    local_lin = omega + potential.epsilon * potential.values(grid.r)

    candidates: list[np.ndarray] = []
    if initial_guess is not None:
        guess = np.asarray(initial_guess, dtype=float)
        if guess.shape != (grid.n,):
            raise GridMismatch("initial guess does not match the grid")
        candidates.append(guess)
    if _scan or initial_guess is None:
        cands = _initial_guesses(grid, m)
        res0 = [
            float(np.linalg.norm(np.sqrt(grid.w) * _profile_residual(c, L, local_lin, model)))
            for c in cands
        ]
        order = np.argsort(res0)
        candidates.extend(cands[i] for i in order[:6])

    reasons: set[str] = set()
    for cand in candidates:
        result = _newton_attempt(cand, L, local_lin, model, tol, max_iter)
        if result is None:
            continue
        psi, norm, iters = result
        reason = _admissible(psi, grid)
        if reason is not None:
            reasons.add(reason)
            continue
        psi = np.where(np.abs(psi) < 1e-300, 0.0, psi)  # flush denormals
        return RadialProfile(
            grid=grid, psi=psi, omega=float(omega), m=int(m),
            model=model, potential=potential,
            residual_norm=norm, newton_iterations=iters,
        )

    if _ladder:
        prof = _solve_ladder(model, potential, omega, m, grid, tol, max_iter)
        if prof is not None:
            return prof

    if reasons == {"trivial"}:
        raise TrivialSolution(
            f"Newton collapsed to the zero solution at omega={omega}, m={m}"
        )
    if "sign-changing" in reasons:
        raise NoConvergence(
            f"only sign-changing solutions found at omega={omega}, m={m}; "
            "the positive profile appears unreachable from the scanned guesses"
        )
    if "boundary-pinned" in reasons:
        raise NoConvergence(
            f"only boundary-pinned states found at omega={omega}, m={m}; "
            "the localized profile needs a larger r_max"
        )
    raise NoConvergence(f"Newton did not converge at omega={omega}, m={m}")


# --------------------------------------------------------------------------
# continuation
# --------------------------------------------------------------------------

@dataclass(eq=False)
class ProfileFamily:
    """Profiles along an omega list, with mass data for slope diagnostics."""

    omegas: np.ndarray
    profiles: list
    q: np.ndarray
    q_prime: np.ndarray

    def q_prime_sign_consistent(self) -> bool:
        signs = np.sign(self.q_prime[np.abs(self.q_prime) > 1e-12])
        return bool(len(signs) == 0 or np.all(signs == signs[0]))


def continue_family(
    model: NonlinearityModel,
    potential: RadialPotential,
    omega_list: Sequence[float],
    m: int,
    grid: RadialGrid | None = None,
    tol: float = 1e-8,
) -> ProfileFamily:
    """Solve a chain of profiles, warm-starting each from its predecessor.

    q'(omega) is estimated by centered differences on the supplied list
    (one-sided second order at the ends), which is the slope entering the
    orbital-stability bookkeeping.
    """
    omegas = np.asarray(list(omega_list), dtype=float)
    if omegas.ndim != 1 or len(omegas) == 0:
        raise ValueError("omega_list must be a non-empty 1-d sequence")
    if grid is None:
        grid = RadialGrid.uniform()
    profiles = []
    guess = None
    for om in omegas:
        prof = solve_profile(model, potential, om, m, grid,
                             initial_guess=guess, tol=tol)
        profiles.append(prof)
        guess = prof.psi
    q = np.array([profile_mass(p) for p in profiles])
    q_prime = np.gradient(q, omegas) if len(omegas) > 1 else np.full(1, math.nan)
    return ProfileFamily(omegas=omegas, profiles=profiles, q=q, q_prime=q_prime)


@dataclass(eq=False)
class EpsilonFamily:
    """Profiles along an epsilon list at fixed omega (first entry eps=0)."""

    epsilons: np.ndarray
    profiles: list

    def sup_deviation(self) -> np.ndarray:
        """sup-norm distance of each member from the eps=0 base profile."""
        base = self.profiles[0].psi
        return np.array([float(np.max(np.abs(p.psi - base))) for p in self.profiles])


def continue_in_epsilon(
    model: NonlinearityModel,
    potential: RadialPotential,
    epsilon_list: Sequence[float],
    omega: float,
    m: int,
    grid: RadialGrid | None = None,
    tol: float = 1e-8,
) -> EpsilonFamily:
    """Warm-started continuation in the potential strength, starting at 0."""
    eps = np.asarray(list(epsilon_list), dtype=float)
    if len(eps) == 0 or eps[0] != 0.0:
        raise ValueError("epsilon_list must start at 0")
    if grid is None:
        grid = RadialGrid.uniform()
    profiles = []
    guess = None
    for e in eps:
        pot = replace(potential, epsilon=float(e))
        prof = solve_profile(model, pot, omega, m, grid,
                             initial_guess=guess, tol=tol)
        profiles.append(prof)
        guess = prof.psi
    return EpsilonFamily(epsilons=eps, profiles=profiles)


# --------------------------------------------------------------------------
# serialization
# --------------------------------------------------------------------------

def save_profile(profile: RadialProfile, path_base: str | Path) -> tuple[Path, Path]:
    """Write ``<base>.csv`` (columns r,psi) and a ``<base>.json`` sidecar.

    Numbers are written with 17 significant digits so a round trip is
    bit-faithful.  Returns (csv_path, json_path).
    """
    base = Path(path_base)
    csv_path = base.with_suffix(".csv")
    json_path = base.with_suffix(".json")
    lines = ["r,psi"]
    for r, v in zip(profile.grid.r, profile.psi):
        lines.append(f"{r:.17g},{v:.17g}")
    csv_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    meta = {
        "omega": profile.omega,
        "m": profile.m,
        "epsilon": profile.potential.epsilon,
        "q": profile_mass(profile),
        "E": profile_energy(profile),
        "d": profile_action(profile),
        "residual_norm": profile.residual_norm,
        "grid": {"r_max": profile.grid.r_max, "n": profile.grid.n},
    }
    json_path.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n",
                         encoding="utf-8")
    return csv_path, json_path


def load_profile(path_base: str | Path) -> tuple[np.ndarray, np.ndarray, dict]:
    """Read back (r, psi, metadata) written by :func:`save_profile`."""
    base = Path(path_base)
    rows = base.with_suffix(".csv").read_text(encoding="utf-8").strip().splitlines()
    if rows[0].strip() != "r,psi":
        raise ValueError(f"unexpected profile CSV header: {rows[0]!r}")
    data = np.array([[float(x) for x in row.split(",")] for row in rows[1:]])
    meta = json.loads(base.with_suffix(".json").read_text(encoding="utf-8"))
    return data[:, 0], data[:, 1], meta


# --------------------------------------------------------------------------
# shooting cross-validator
# --------------------------------------------------------------------------

def _classify_shot(model, potential, omega, m, amp, r_end):
    """Integrate outward from a series start; classify the tail failure mode.

    The decaying profile is a separatrix in the initial slope.  Below it the
    tail settles at a positive minimum and regrows (the dpsi sign change
    -,+); above it the solution either crosses zero and diverges to -inf or
    (far from critical) runs away upward without ever forming a peak.
    Returns (-1, sol) for the low side, (+1, sol) for the high side,
    (0, sol) if the trajectory decayed all the way to r_end.
    """
    eps = potential.epsilon
    v0 = float(potential.values(np.array([0.0]))[0])
    r0 = 1e-4
    c = (omega + eps * v0) / (4.0 * (m + 1))
    y0 = [amp * r0 ** m * (1 + c * r0 * r0),
          amp * (m * r0 ** (m - 1) + (m + 2) * c * r0 ** (m + 1))]

    def rhs(r, y):
        psi, dpsi = y
        val = (-dpsi / r + (m * m) / (r * r) * psi + omega * psi
               + eps * float(potential.values(np.array([r]))[0]) * psi
               + float(model.beta(psi * psi)) * psi)
        return [dpsi, val]

    def cross_zero(r, y):
        return y[0]
    cross_zero.terminal = True
    cross_zero.direction = -1

    def turn_up(r, y):
        # fires only on a -,+ sign change of dpsi, i.e. a tail upturn;
        # the profile maximum crosses the other way and is ignored
        return y[1]
    turn_up.terminal = True
    turn_up.direction = 1

    def blow_up(r, y):
        return y[0] - 5.0
    blow_up.terminal = True
    blow_up.direction = 1

    sol = solve_ivp(rhs, (r0, r_end), y0, method="DOP853",
                    rtol=1e-12, atol=1e-14, dense_output=True,
                    events=[cross_zero, turn_up, blow_up])
    if (sol.t_events[0].size and sol.t_events[0][0] > 2 * r0) or sol.t_events[2].size:
        return +1, sol
    if sol.t_events[1].size:
        return -1, sol
    return 0, sol


def shoot_profile(
    model: NonlinearityModel,
    potential: RadialPotential,
    omega: float,
    m: int,
    amp_bracket: tuple[float, float] = (0.05, 3.0),
    r_end: float = 28.0,
    bisections: int = 60,
):
    """Independent profile solve: shoot on the slope coefficient A.

    Near the origin psi ~ A r^m (1 + c r^2); the decaying solution sits on
    the boundary in A between trajectories whose tail crosses zero and
    trajectories whose tail turns back up.  Bisection on that dichotomy
    pins A, and the returned dense solution evaluates psi anywhere in
    (0, r_end).  Used only as a cross-check of the collocation solver.

    Returns (A, evaluate) where ``evaluate(r)`` gives psi(r).
    """
    lo, hi = amp_bracket
    cls_lo, _ = _classify_shot(model, potential, omega, m, lo, r_end)
    cls_hi, _ = _classify_shot(model, potential, omega, m, hi, r_end)
    if cls_lo != -1 or cls_hi != +1:
        raise NoConvergence(
            f"shooting bracket ({lo}, {hi}) does not straddle a profile "
            f"(classes {cls_lo}/{cls_hi})"
        )
    best_sol = None
    for _ in range(bisections):
        mid = 0.5 * (lo + hi)
        cls_mid, sol = _classify_shot(model, potential, omega, m, mid, r_end)
        if cls_mid == 0:
            best_sol = sol
            break
        if cls_mid == cls_lo:
            lo = mid
        else:
            hi = mid
        best_sol = sol
    amp = 0.5 * (lo + hi)

    sol = best_sol

    def evaluate(r):
        rr = np.atleast_1d(np.asarray(r, dtype=float))
        out = np.zeros_like(rr)
        inside = rr <= sol.t[-1]
        if np.any(inside):
            out[inside] = sol.sol(rr[inside])[0]
        return out if np.ndim(r) else float(out[0])

    return amp, evaluate
