"""Flat key-value experiment configuration with dotted sections.

Format: one `key = value` per line, '#' comments, blank lines ignored.
Values are typed by the schema below (bool, int, float, string, or a
comma-separated list of floats).  Unknown keys are rejected with their path.
"""

from __future__ import annotations

import numpy as np


class ConfigError(ValueError):
    pass


# key -> default value; the default's type defines the parse rule.
DEFAULTS = {
    "kernel.family": "gaussian",
    "kernel.variance": 25.0,
    "growth.family": "beverton_holt",
    "growth.capacity": 1.0,
    "env.c": 3.25,
    "env.sigma_atoms": (-1.36, 1.36),
    "env.r_atoms": (4.85, 2.07),
    "env.probs": (0.5, 0.5),
    "habitat.omega0_km": (-5.0, 5.0),
    "numerics.grid_points": 512,
    "numerics.horizon": 2000,
    "numerics.replicates": 30,
    "numerics.base_seed": 20260826,
    "numerics.eigen_tol": 1e-10,
    "sweep.variance_min": 0.01,
    "sweep.variance_max": 150.0,
    "sweep.variance_points": 60,
    "sweep.variance_scale": "log",
    "sweep.sigma_spreads": (0.0, 0.34, 0.68, 1.02, 1.36, 1.7, 2.04),
    "sweep.r_spreads": (0.0, 0.35, 0.7, 1.05, 1.39, 1.7, 2.0),
    "output.dir": "out",
    "output.svg": True,
    "output.snapshot_times": (),
}

_CHOICES = {
    "kernel.family": ("gaussian", "laplace"),
    "growth.family": ("beverton_holt", "ricker"),
    "sweep.variance_scale": ("log", "linear"),
}


def _parse_value(key: str, raw: str):
    default = DEFAULTS[key]
    raw = raw.strip()
    try:
        if isinstance(default, bool):
            if raw.lower() in ("true", "1", "yes"):
                return True
            if raw.lower() in ("false", "0", "no"):
                return False
            raise ValueError("expected a boolean")
        if isinstance(default, int):
            return int(raw)
        if isinstance(default, float):
            return float(raw)
        if isinstance(default, tuple):
            if not raw:
                return ()
            return tuple(float(tok) for tok in raw.split(","))
    except ValueError as exc:
        raise ConfigError(f"{key}: cannot parse {raw!r} ({exc})") from None
    return raw  # string


def _format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, tuple):
        return ", ".join(repr(float(v)) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def parse_config_text(text: str) -> dict:
    """Parse config lines into a {key: value} dict (unknown keys rejected)."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, raw = (part.strip() for part in line.split("=", 1))
        if key not in DEFAULTS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        out[key] = _parse_value(key, raw)
    return out


def resolve(overrides: dict) -> dict:
    """Merge overrides into the defaults and validate the result."""
    cfg = dict(DEFAULTS)
    for key, value in overrides.items():
        if key not in DEFAULTS:
            raise ConfigError(f"unknown key {key!r}")
        cfg[key] = value
    _validate(cfg)
    return cfg


def _validate(cfg: dict):
    for key, choices in _CHOICES.items():
        if cfg[key] not in choices:
            raise ConfigError(f"{key}: expected one of {choices}, got {cfg[key]!r}")
    if cfg["kernel.variance"] <= 0:
        raise ConfigError("kernel.variance: must be positive")
    if cfg["growth.capacity"] <= 0:
        raise ConfigError("growth.capacity: must be positive")
    if cfg["env.c"] < 0:
        raise ConfigError("env.c: must be >= 0")
    a0, b0 = cfg["habitat.omega0_km"]
    if not a0 < b0:
        raise ConfigError("habitat.omega0_km: expected an interval a, b with a < b")
    if len(cfg["env.sigma_atoms"]) != len(cfg["env.r_atoms"]) or \
            len(cfg["env.r_atoms"]) != len(cfg["env.probs"]):
        raise ConfigError("env.sigma_atoms, env.r_atoms, env.probs: lengths differ")
    if cfg["numerics.grid_points"] < 16:
        raise ConfigError("numerics.grid_points: must be >= 16")
    if cfg["numerics.horizon"] < 1:
        raise ConfigError("numerics.horizon: must be >= 1")
    if cfg["numerics.replicates"] < 1:
        raise ConfigError("numerics.replicates: must be >= 1")
    if cfg["sweep.variance_min"] <= 0 or cfg["sweep.variance_max"] <= cfg["sweep.variance_min"]:
        raise ConfigError("sweep.variance_min/max: need 0 < min < max")
    if cfg["sweep.variance_points"] < 2:
        raise ConfigError("sweep.variance_points: must be >= 2")


def config_lines(cfg: dict) -> list[str]:
    """Canonical serialization, stable key order."""
    return [f"{key} = {_format_value(cfg[key])}" for key in DEFAULTS]


def variance_grid(cfg: dict) -> np.ndarray:
    lo, hi = cfg["sweep.variance_min"], cfg["sweep.variance_max"]
    n = cfg["sweep.variance_points"]
    if cfg["sweep.variance_scale"] == "log":
        return np.geomspace(lo, hi, n)
    return np.linspace(lo, hi, n)
