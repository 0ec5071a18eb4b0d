"""Declarative scenario configuration.

A config is a mapping with a ``scenario`` key plus any subset of that
scenario's documented keys; missing keys take the defaults below. Files
are JSON or flat ``key = value`` text with dotted keys for nesting::

    scenario = test_particle
    m_b = 1000
    packet_a.k0 = 0.8
    run.steps = 3000

Values in key=value files are parsed as JSON when possible, otherwise kept
as strings. ``#`` starts a comment.
"""

from __future__ import annotations

import copy
import json
import os
from pathlib import Path
from typing import Any, Callable

from .grid import (
    ConfigurationError,
    GaussianPacketSpec,
    Grid1D,
    GridRunSpec,
    PotentialSpec,
    TwoParticleConfig,
)

HBAR_ENV = "ENTANGLAB_HBAR"

_POTENTIAL_KEYS = {"kind", "strength", "softening", "depth", "width", "k", "value"}
_PACKET_KEYS = {"x0", "sigma", "k0", "separation"}
_SUBKEYS = {
    "grid": {"n", "dx", "origin"},
    "run": {"dt", "steps", "record_every", "order"},
    "potential": _POTENTIAL_KEYS, "external_a": _POTENTIAL_KEYS, "external_b": _POTENTIAL_KEYS,
    "packet_a": _PACKET_KEYS, "packet_b": _PACKET_KEYS,
}

DEFAULTS: dict[str, dict] = {
    "test_particle": {
        "grid": {"n": 64, "dx": 0.75},
        "m_a": 1.0, "m_b": 1000.0,
        "potential": {"kind": "soft-coulomb", "strength": 0.2, "softening": 4.0},
        "packet_a": {"x0": -12.0, "sigma": 4.0, "k0": 0.8},
        "packet_b": {"x0": 0.0, "sigma": 1.5, "k0": 0.0},
        "run": {"dt": 0.01, "steps": 3000, "record_every": 10, "order": 2},
        "control": True,
    },
    "material_point": {
        "grid": {"n": 128, "dx": 0.5},
        "m_a": 3.0, "m_b": 3.0,
        "potential": {"kind": "gaussian-well", "depth": 0.1, "width": 10.0},
        "packet_a": {"x0": -16.0, "sigma": 2.0, "k0": 3.0},
        "packet_b": {"x0": 0.0, "sigma": 2.0, "k0": 0.0},
        "run": {"dt": 0.02, "steps": 1600, "record_every": 25, "order": 2},
    },
    "hartree": {
        "grid": {"n": 32, "dx": 0.4},
        "m_a": 1.0, "m_b": 1.0,
        "potential": {"kind": "soft-coulomb", "strength": 0.5, "softening": 1.0},
        "external_a": {"kind": "harmonic", "k": 1.0},
        "external_b": {"kind": "harmonic", "k": 1.0},
        "exact": "lanczos",
        "tol": 1e-9,
        "max_iter": 500,
    },
    "oscillators": {
        "cutoff": 30, "omega_a": 1.0, "omega_b": 1.0, "g": 1.0,
        "alpha_a": 1.0, "alpha_b": 0.0,
        "steps": 400, "record_every": 4, "mean_field": True,
    },
    "counterexample": {
        "d_a": 2, "d_b": 2, "seed": None,
        "dt": 0.5, "steps": 40, "record_every": 1,
    },
}

KNOWN_SCENARIOS = tuple(sorted(DEFAULTS))


def default_hbar() -> float:
    raw = os.environ.get(HBAR_ENV)
    if raw is None or raw == "":
        return 1.0
    try:
        value = float(raw)
    except ValueError:
        raise ConfigurationError(f"{HBAR_ENV}={raw!r} is not a number") from None
    if not value > 0:
        raise ConfigurationError(f"{HBAR_ENV} must be positive")
    return value


def _parse_value(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def parse_config_text(text: str) -> dict:
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"malformed JSON config: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigurationError("config JSON must be an object")
        return data
    data: dict = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"line {lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        node = data
        parts = key.split(".")
        for p in parts[:-1]:
            node = node.setdefault(p, {})
            if not isinstance(node, dict):
                raise ConfigurationError(f"line {lineno}: key {key!r} conflicts with a scalar")
        node[parts[-1]] = _parse_value(value)
    return data


def load_config(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config_text(text)


def _merge(base: dict, override: dict, where: str) -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        if key not in base:
            raise ConfigurationError(f"unknown key {where}{key!r}")
        if isinstance(base[key], dict):
            if not isinstance(value, dict):
                raise ConfigurationError(f"key {where}{key!r} must be a mapping")
            sub = dict.fromkeys(_SUBKEYS.get(key, ()), None)
            sub.update(base[key])
            merged = _merge(sub, value, f"{where}{key}.")
            out[key] = {k: v for k, v in merged.items() if v is not None}
        else:
            out[key] = value
    return out


def resolve(config: dict) -> tuple[str, dict]:
    """Validate the scenario key and fill defaults. Returns (name, params)."""
    if "scenario" not in config:
        raise ConfigurationError("config has no 'scenario' key; known: " + ", ".join(KNOWN_SCENARIOS))
    name = str(config["scenario"]).replace("-", "_")
    if name not in DEFAULTS:
        raise ConfigurationError(
            f"unknown scenario {config['scenario']!r}; known: " + ", ".join(KNOWN_SCENARIOS))
    base = dict(DEFAULTS[name])
    if name in ("test_particle", "material_point", "hartree"):
        base.setdefault("hbar", None)
        base.setdefault("kinetic", "spectral")
        base.setdefault("external_a", {"kind": "none"})
        base.setdefault("external_b", {"kind": "none"})
        base.setdefault("packet_a", {"x0": 0.0, "sigma": 1.0, "k0": 0.0})
        base.setdefault("packet_b", {"x0": 0.0, "sigma": 1.0, "k0": 0.0})
    else:
        base.setdefault("hbar", None)
    params = _merge(base, {k: v for k, v in config.items() if k != "scenario"}, "")
    if params.get("hbar") is None:
        params["hbar"] = default_hbar()
    return name, params


def _number(value, name: str, kind: Callable = float):
    if isinstance(value, bool) or value is None:
        raise ConfigurationError(f"{name} must be a number")
    try:
        return kind(value)
    except (TypeError, ValueError):
        raise ConfigurationError(f"{name} must be a number, got {value!r}") from None


def complex_value(value, name: str) -> complex:
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(_number(value[0], name), _number(value[1], name))
    if isinstance(value, str):
        try:
            return complex(value.replace(" ", ""))
        except ValueError:
            raise ConfigurationError(f"{name} must be a complex number") from None
    return complex(_number(value, name))


def _potential(d: dict, name: str) -> PotentialSpec:
    kw = {k: (v if k == "kind" else _number(v, f"{name}.{k}")) for k, v in d.items()}
    return PotentialSpec(**kw)


def _packet(d: dict, name: str) -> GaussianPacketSpec:
    return GaussianPacketSpec(**{k: _number(v, f"{name}.{k}") for k, v in d.items()})


def two_particle_config(params: dict) -> TwoParticleConfig:
    grid = Grid1D(_number(params["grid"].get("n"), "grid.n", int),
                  _number(params["grid"].get("dx"), "grid.dx"),
                  params["grid"].get("origin"))
    return TwoParticleConfig(
        grid,
        _number(params["m_a"], "m_a"), _number(params["m_b"], "m_b"),
        _potential(params["potential"], "potential"),
        _packet(params["packet_a"], "packet_a"), _packet(params["packet_b"], "packet_b"),
        _number(params["hbar"], "hbar"),
        _potential(params["external_a"], "external_a"),
        _potential(params["external_b"], "external_b"),
        params["kinetic"],
    )


def grid_run_spec(params: dict) -> GridRunSpec:
    r = params["run"]
    return GridRunSpec(_number(r.get("dt"), "run.dt"), _number(r.get("steps"), "run.steps", int),
                       _number(r.get("record_every", 10), "run.record_every", int),
                       _number(r.get("order", 2), "run.order", int))
