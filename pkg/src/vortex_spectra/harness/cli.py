"""Command-line entry point.

Subcommands map one-to-one onto the runner operations::

    vortex-spectra profile    --omega 0.16 --m 1
    vortex-spectra spectrum   --omega 0.16 --m 1 --out runs/spec
    vortex-spectra sweep      --omega-min 0.15 --omega-max 0.175 --count 6
    vortex-spectra omega-cr   --m 1 --bracket 0.13 0.17
    vortex-spectra fgr-model1 --preset gaussian --z0 0.4
    vortex-spectra fgr-model2 --config runs/two_mode.toml
    vortex-spectra gamma      --config runs/two_mode.toml
    vortex-spectra report     --out runs/spec

Every command accepts ``--config FILE`` (TOML) and ``--out DIR``;
explicit flags override file keys.  Exit codes: 0 success, 2 for
configuration errors, 3 for numerical failures (the error class name is
printed on stderr).
"""

from __future__ import annotations

import argparse
import sys

from .. import __version__
from ..errors import ConfigError, NumericalError
from .config import load_config
from .report import build_report
from . import runner

__all__ = ["main", "build_parser"]


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="FILE",
                        help="TOML configuration file")
    parser.add_argument("--out", metavar="DIR",
                        help="output directory (default: output.directory)")


def _add_radial(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--omega", type=float, help="wave frequency")
    parser.add_argument("--m", type=int, help="winding index")
    parser.add_argument("--epsilon", type=float,
                        help="external potential strength")
    parser.add_argument("--r-max", type=float, help="radial cutoff")
    parser.add_argument("--n", type=int, help="radial grid points")
    parser.add_argument("--model", choices=["cubic_quintic", "cubic"],
                        help="nonlinearity")


def _add_fgr_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--dt", type=float, help="time step")
    parser.add_argument("--t-final", type=float, help="integration horizon")
    parser.add_argument("--box", type=float, help="periodic box side length")
    parser.add_argument("--n-grid", type=int, help="grid points per side")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vortex-spectra",
        description="Vortex profiles, linearization spectra, Krein "
                    "signatures, and radiative-decay model runs.")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("profile", help="solve one radial standing-wave profile")
    _add_common(p)
    _add_radial(p)

    p = sub.add_parser("spectrum", help="catalog the linearization spectrum")
    _add_common(p)
    _add_radial(p)
    p.add_argument("--k-max", type=int, help="largest angular block")

    p = sub.add_parser("sweep", help="audit a frequency range in parallel")
    _add_common(p)
    p.add_argument("--omega-min", type=float)
    p.add_argument("--omega-max", type=float)
    p.add_argument("--count", type=int, help="number of frequencies")
    p.add_argument("--chain-length", type=int,
                   help="frequencies per continuation chain")
    p.add_argument("--workers", type=int,
                   help="process count (default: VORTEX_SPECTRA_WORKERS or 1)")
    p.add_argument("--m", type=int, help="winding index")
    p.add_argument("--epsilon", type=float, help="potential strength")
    p.add_argument("--r-max", type=float, help="radial cutoff")
    p.add_argument("--n", type=int, help="radial grid points")

    p = sub.add_parser("omega-cr",
                       help="locate the stability-transition frequency")
    _add_common(p)
    p.add_argument("--m", type=int, help="winding index")
    p.add_argument("--bracket", type=float, nargs=2, metavar=("LO", "HI"),
                   help="search bracket in omega")
    p.add_argument("--tol", type=float, help="bisection tolerance")

    p = sub.add_parser("fgr-model1",
                       help="single oscillator radiating into a free field")
    _add_common(p)
    _add_fgr_common(p)
    p.add_argument("--preset", choices=["gaussian"],
                   help="coupling shape preset")
    p.add_argument("--z0", type=float, help="initial oscillator amplitude")
    p.add_argument("--amplitude", type=float, help="coupling amplitude")
    p.add_argument("--width", type=float, help="coupling width")

    p = sub.add_parser("fgr-model2",
                       help="several signed oscillators with Gaussian couplings")
    _add_common(p)
    _add_fgr_common(p)

    p = sub.add_parser("gamma",
                       help="damping quadratic form of a multi-mode setup")
    _add_common(p)
    p.add_argument("--samples", type=int, help="unit-sphere sample count")
    p.add_argument("--seed", type=int, help="sample RNG seed")

    p = sub.add_parser("report",
                       help="render figures and a summary for a run directory")
    _add_common(p)
    return parser


_OVERRIDE_KEYS = {
    "omega": "spectrum.omega",
    "m": None,  # resolved per command below
    "epsilon": "potential.epsilon",
    "r_max": "grid.r_max",
    "n": "grid.n",
    "model": "model",
    "k_max": "spectrum.k_max",
    "omega_min": "sweep.omega_min",
    "omega_max": "sweep.omega_max",
    "count": "sweep.count",
    "chain_length": "sweep.chain_length",
    "bracket": "omega_cr.bracket",
    "tol": "omega_cr.tol",
    "dt": "fgr.dt",
    "t_final": "fgr.t_final",
    "box": "fgr.box",
    "n_grid": "fgr.n_grid",
    "preset": "fgr.preset",
    "amplitude": "fgr.amplitude",
    "width": "fgr.width",
    "samples": "fgr.gamma_samples",
    "seed": "fgr.gamma_seed",
}


def _overrides(args: argparse.Namespace) -> dict:
    pairs: dict = {}
    for attr, dotted in _OVERRIDE_KEYS.items():
        if not hasattr(args, attr) or getattr(args, attr) is None:
            continue
        value = getattr(args, attr)
        if attr == "m":
            dotted = ("omega_cr.m" if args.command == "omega-cr"
                      else "spectrum.m")
        if attr == "bracket":
            value = [float(v) for v in value]
        pairs[dotted] = value
    if getattr(args, "z0", None) is not None:
        pairs["fgr.z0"] = [float(args.z0)]
    if getattr(args, "out", None) is not None:
        pairs["output.directory"] = args.out
    return pairs


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "report":
            target = args.out
            if target is None and args.config is not None:
                target = load_config(args.config).require("output.directory")
            if target is None:
                raise ConfigError("report needs --out DIR (or a config file "
                                  "with output.directory)")
            result = build_report(target)
        else:
            cfg = load_config(args.config, overrides=_overrides(args))
            if args.command == "profile":
                result = runner.run_profile(cfg, args.out)
            elif args.command == "spectrum":
                result = runner.run_spectrum(cfg, args.out)
            elif args.command == "sweep":
                result = runner.run_sweep(cfg, args.out, args.workers)
            elif args.command == "omega-cr":
                result = runner.run_omega_cr(cfg, args.out)
            elif args.command == "fgr-model1":
                result = runner.run_fgr_model1(cfg, args.out)
            elif args.command == "fgr-model2":
                result = runner.run_fgr_model2(cfg, args.out)
            elif args.command == "gamma":
                result = runner.run_gamma(cfg, args.out)
            else:  # pragma: no cover - argparse enforces the choices
                raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"ConfigError: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 3

    for key in sorted(result):
        print(f"{key} = {result[key]}")
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
