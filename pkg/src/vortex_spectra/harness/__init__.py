"""Orchestration: validated configs, CLI, parallel sweeps, reports."""

from .config import RunConfig, load_config, default_tree
from .runner import (
    RunManifest,
    run_profile,
    run_spectrum,
    run_sweep,
    run_omega_cr,
    run_fgr_model1,
    run_fgr_model2,
    run_gamma,
)
from .report import build_report
from .cli import main, build_parser

__all__ = [
    "RunConfig", "load_config", "default_tree",
    "RunManifest",
    "run_profile", "run_spectrum", "run_sweep", "run_omega_cr",
    "run_fgr_model1", "run_fgr_model2", "run_gamma",
    "build_report", "main", "build_parser",
]
