"""Run configuration: schema-validated key tree with TOML round-trip.

A run is described by a nested key tree (model choice, grids, sweep
ranges, wave-equation settings, tolerances, output directory).  The tree
can come from a TOML file, from command-line overrides, or both; every
key is validated against the schema below, and unknown keys are rejected
with their full dotted path so typos never silently fall back to
defaults.

The canonical serialization (`RunConfig.canonical_text`) is a sorted,
normalized TOML rendering used both for reproducibility hashes and for
the parse -> serialize -> parse round-trip guarantee.
"""

from __future__ import annotations

import copy
import hashlib
import json
import os
from dataclasses import dataclass
from pathlib import Path

try:  # 3.11+
    import tomllib
except ImportError:  # pragma: no cover - environment dependent
    import tomli as tomllib

from ..errors import ConfigError

__all__ = ["RunConfig", "load_config", "default_tree", "DEFAULTS"]


# --------------------------------------------------------------------------
# leaf validators
# --------------------------------------------------------------------------

def _v_float(value, path):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}: expected a number, got {value!r}")
    return float(value)


def _v_pos_float(value, path):
    v = _v_float(value, path)
    if v <= 0:
        raise ConfigError(f"{path}: must be positive, got {v}")
    return v


def _v_int(value, path):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{path}: expected an integer, got {value!r}")
    return int(value)


def _v_pos_int(value, path):
    v = _v_int(value, path)
    if v <= 0:
        raise ConfigError(f"{path}: must be positive, got {v}")
    return v


def _v_bool(value, path):
    if not isinstance(value, bool):
        raise ConfigError(f"{path}: expected true/false, got {value!r}")
    return value


def _v_str(value, path):
    if not isinstance(value, str):
        raise ConfigError(f"{path}: expected a string, got {value!r}")
    return value


def _v_model(value, path):
    v = _v_str(value, path)
    if v not in ("cubic_quintic", "cubic"):
        raise ConfigError(f"{path}: unknown model {v!r} "
                          "(choose cubic_quintic or cubic)")
    return v


def _v_float_list(value, path):
    if not isinstance(value, (list, tuple)):
        raise ConfigError(f"{path}: expected a list of numbers, got {value!r}")
    return [_v_float(x, f"{path}[{i}]") for i, x in enumerate(value)]


def _v_bracket(value, path):
    vals = _v_float_list(value, path)
    if len(vals) != 2 or not vals[0] < vals[1]:
        raise ConfigError(f"{path}: expected [lo, hi] with lo < hi, got {vals}")
    return vals


def _v_int_list(value, path):
    if not isinstance(value, (list, tuple)):
        raise ConfigError(f"{path}: expected a list of integers, got {value!r}")
    return [_v_int(x, f"{path}[{i}]") for i, x in enumerate(value)]


def _v_modes(value, path):
    """List of {lam, sign} tables for the discrete oscillators."""
    if not isinstance(value, list):
        raise ConfigError(f"{path}: expected an array of tables")
    out = []
    for i, entry in enumerate(value):
        p = f"{path}[{i}]"
        if not isinstance(entry, dict):
            raise ConfigError(f"{p}: expected a table with keys lam, sign")
        extra = set(entry) - {"lam", "sign"}
        if extra:
            raise ConfigError(f"unknown configuration key: {p}.{sorted(extra)[0]}")
        if "lam" not in entry or "sign" not in entry:
            raise ConfigError(f"{p}: needs both lam and sign")
        lam = _v_pos_float(entry["lam"], f"{p}.lam")
        sign = _v_int(entry["sign"], f"{p}.sign")
        if sign not in (1, -1):
            raise ConfigError(f"{p}.sign: must be 1 or -1, got {sign}")
        out.append({"lam": lam, "sign": sign})
    return out


_COUPLING_KEYS = {"alpha", "amplitude", "width", "amplitude2", "width2", "center"}


def _v_couplings(value, path):
    """List of coupling tables: alpha multi-index plus Gaussian envelopes.

    ``amplitude``/``width`` describe the envelope entering linearly in the
    mode monomial; ``amplitude2``/``width2`` (defaulting to the same
    values) describe the conjugate-coupled envelope.
    """
    if not isinstance(value, list):
        raise ConfigError(f"{path}: expected an array of tables")
    out = []
    for i, entry in enumerate(value):
        p = f"{path}[{i}]"
        if not isinstance(entry, dict):
            raise ConfigError(f"{p}: expected a coupling table")
        extra = set(entry) - _COUPLING_KEYS
        if extra:
            raise ConfigError(f"unknown configuration key: {p}.{sorted(extra)[0]}")
        if "alpha" not in entry:
            raise ConfigError(f"{p}: needs an alpha multi-index")
        alpha = _v_int_list(entry["alpha"], f"{p}.alpha")
        if any(a < 0 for a in alpha) or not any(alpha):
            raise ConfigError(f"{p}.alpha: needs nonnegative entries, not all zero")
        row = {"alpha": alpha,
               "amplitude": _v_float(entry.get("amplitude", 1.0), f"{p}.amplitude"),
               "width": _v_pos_float(entry.get("width", 1.0), f"{p}.width")}
        if "amplitude2" in entry:
            row["amplitude2"] = _v_float(entry["amplitude2"], f"{p}.amplitude2")
        if "width2" in entry:
            row["width2"] = _v_pos_float(entry["width2"], f"{p}.width2")
        if "center" in entry:
            c = _v_float_list(entry["center"], f"{p}.center")
            if len(c) != 2:
                raise ConfigError(f"{p}.center: expected [x, y]")
            row["center"] = c
        out.append(row)
    return out


# --------------------------------------------------------------------------
# schema and defaults
# --------------------------------------------------------------------------

SCHEMA = {
    "model": _v_model,
    "grid": {
        "r_max": _v_pos_float,
        "n": _v_pos_int,
    },
    "potential": {
        "epsilon": _v_float,
        "depth": _v_float,
        "width": _v_pos_float,
    },
    "spectrum": {
        "omega": _v_pos_float,
        "m": _v_int,
        "k_max": _v_pos_int,
        "tol": _v_pos_float,
    },
    "sweep": {
        "omega_min": _v_pos_float,
        "omega_max": _v_pos_float,
        "count": _v_pos_int,
        "chain_length": _v_pos_int,
        "workers": _v_pos_int,
        "with_trapping": _v_bool,
    },
    "omega_cr": {
        "m": _v_int,
        "bracket": _v_bracket,
        "tol": _v_pos_float,
        "pre_scan": _v_pos_int,
    },
    "tolerances": {
        "residual_tol": _v_pos_float,
        "localization_tol": _v_pos_float,
        "localization_radius": _v_pos_float,
        "instability_tol": _v_pos_float,
        "zero_tol": _v_pos_float,
        "signature_tol": _v_pos_float,
        "cluster_tol": _v_pos_float,
        "svd_rank_tol": _v_pos_float,
        "band_cap_factor": _v_pos_float,
    },
    "output": {
        "directory": _v_str,
    },
    "fgr": {
        "box": _v_pos_float,
        "n_grid": _v_pos_int,
        "dt": _v_pos_float,
        "t_final": _v_pos_float,
        "z0": _v_float_list,
        "save_points": _v_pos_int,
        "wrap_tol": _v_pos_float,
        "omega": _v_pos_float,
        "preset": _v_str,
        "amplitude": _v_float,
        "width": _v_pos_float,
        "n_angle": _v_pos_int,
        "gamma_samples": _v_pos_int,
        "gamma_seed": _v_int,
        "modes": _v_modes,
        "couplings": _v_couplings,
    },
}

# Only genuinely global defaults live here; command-specific fallbacks
# (e.g. the automatic model-1 horizon) are decided by the runner where the
# context is known.
DEFAULTS = {
    "model": "cubic_quintic",
    "grid": {"r_max": 40.0, "n": 800},
    "potential": {"epsilon": 0.0, "depth": 1.0, "width": 1.0},
    "spectrum": {"omega": 0.16, "m": 1, "k_max": 8, "tol": 1e-8},
    "sweep": {"omega_min": 0.15, "omega_max": 0.175, "count": 6,
              "chain_length": 4, "with_trapping": True},
    "omega_cr": {"m": 1, "bracket": [0.13, 0.17], "tol": 1e-3, "pre_scan": 7},
    "tolerances": {},
    "output": {"directory": "."},
    "fgr": {"n_grid": 256, "dt": 0.005, "save_points": 400,
            "wrap_tol": 1e-4, "preset": "gaussian",
            "amplitude": 1.0, "width": 1.0, "n_angle": 256,
            "gamma_samples": 64, "gamma_seed": 0},
}


def default_tree() -> dict:
    return copy.deepcopy(DEFAULTS)


# --------------------------------------------------------------------------
# validation / merge
# --------------------------------------------------------------------------

def _validate(tree, schema, prefix=""):
    if not isinstance(tree, dict):
        where = prefix.rstrip(".") or "configuration root"
        raise ConfigError(f"{where}: expected a table")
    out = {}
    for key, value in tree.items():
        path = f"{prefix}{key}"
        if key not in schema:
            raise ConfigError(f"unknown configuration key: {path}")
        rule = schema[key]
        if isinstance(rule, dict):
            out[key] = _validate(value, rule, prefix=path + ".")
        else:
            out[key] = rule(value, path)
    return out


def _deep_merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _deep_merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def _tree_from_dotted(pairs: dict) -> dict:
    """Expand {"a.b": v} into nested {"a": {"b": v}}."""
    tree: dict = {}
    for dotted, value in pairs.items():
        parts = dotted.split(".")
        node = tree
        for part in parts[:-1]:
            node = node.setdefault(part, {})
            if not isinstance(node, dict):
                raise ConfigError(f"configuration key conflict at {dotted}")
        node[parts[-1]] = value
    return tree


# --------------------------------------------------------------------------
# canonical TOML rendering
# --------------------------------------------------------------------------

def _fmt_scalar(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_fmt_scalar(v) for v in value) + "]"
    raise ConfigError(f"cannot serialize configuration value {value!r}")


def _is_table_array(value) -> bool:
    return (isinstance(value, list) and value
            and all(isinstance(v, dict) for v in value))


def canonical_toml(tree: dict) -> str:
    """Deterministic TOML rendering: sorted keys, arrays-of-tables last.

    Element order inside arrays (modes, couplings) is semantic and kept.
    """
    lines: list[str] = []
    scalars = sorted(k for k, v in tree.items() if not isinstance(v, dict))
    tables = sorted(k for k, v in tree.items() if isinstance(v, dict))
    for key in scalars:
        lines.append(f"{key} = {_fmt_scalar(tree[key])}")
    for key in tables:
        section = tree[key]
        plain = sorted(k for k, v in section.items() if not _is_table_array(v))
        arrays = sorted(k for k, v in section.items() if _is_table_array(v))
        if plain or not arrays:
            lines.append("")
            lines.append(f"[{key}]")
            for sub in plain:
                lines.append(f"{sub} = {_fmt_scalar(section[sub])}")
        for sub in arrays:
            for entry in section[sub]:
                lines.append("")
                lines.append(f"[[{key}.{sub}]]")
                for field in sorted(entry):
                    lines.append(f"{field} = {_fmt_scalar(entry[field])}")
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# public surface
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class RunConfig:
    """Validated configuration tree with dotted-path access."""

    tree: dict

    def get(self, dotted: str, default=None):
        node = self.tree
        for part in dotted.split("."):
            if not isinstance(node, dict) or part not in node:
                return default
            node = node[part]
        return node

    def require(self, dotted: str):
        sentinel = object()
        value = self.get(dotted, sentinel)
        if value is sentinel:
            raise ConfigError(f"missing configuration key: {dotted}")
        return value

    def canonical_text(self) -> str:
        return canonical_toml(self.tree)

    def config_hash(self) -> str:
        return hashlib.sha256(self.canonical_text().encode("utf-8")).hexdigest()

    def workers(self, explicit: int | None = None) -> int:
        """Worker count: CLI flag > config > environment > 1."""
        if explicit is not None:
            if explicit < 1:
                raise ConfigError(f"worker count must be >= 1, got {explicit}")
            return explicit
        configured = self.get("sweep.workers")
        if configured is not None:
            return int(configured)
        env = os.environ.get("VORTEX_SPECTRA_WORKERS")
        if env:
            try:
                n = int(env)
            except ValueError:
                raise ConfigError(
                    f"VORTEX_SPECTRA_WORKERS must be an integer, got {env!r}")
            if n < 1:
                raise ConfigError(
                    f"VORTEX_SPECTRA_WORKERS must be >= 1, got {n}")
            return n
        return 1


def load_config(path: str | Path | None = None,
                overrides: dict | None = None,
                use_defaults: bool = True) -> RunConfig:
    """Merge defaults, an optional TOML file, and dotted CLI overrides.

    Later sources win key-by-key.  The merged tree is validated as a
    whole, so an override can never smuggle in an unknown key.
    """
    tree = default_tree() if use_defaults else {}
    if path is not None:
        path = Path(path)
        if not path.exists():
            raise ConfigError(f"configuration file not found: {path}")
        try:
            loaded = tomllib.loads(path.read_text(encoding="utf-8"))
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"malformed configuration file {path}: {exc}")
        tree = _deep_merge(tree, loaded)
    if overrides:
        tree = _deep_merge(tree, _tree_from_dotted(overrides))
    validated = _validate(tree, SCHEMA)
    return RunConfig(tree=validated)
