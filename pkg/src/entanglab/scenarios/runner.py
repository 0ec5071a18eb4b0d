"""Dispatch a declarative config to the matching scenario."""

from __future__ import annotations

from dataclasses import replace

import numpy as np

from ..dynamics import PropagatorSpec, Trajectory
from .config import (
    complex_value,
    grid_run_spec,
    resolve,
    two_particle_config,
)
from .counterexample import run_theorem2_counterexample
from .grid import ConfigurationError, TwoParticleHamiltonian, grid_record
from .hartree import exact_ground_state, hartree_static
from .oscillators import OscillatorConfig, run_coupled_oscillators
from .regimes import RegimeReport, _config_parameters, run_material_point, run_test_particle


def _bool(value, name):
    if isinstance(value, bool):
        return value
    raise ConfigurationError(f"{name} must be true or false")


def _hartree(params: dict) -> RegimeReport:
    config = two_particle_config(params)
    exact = params["exact"]
    if exact not in (None, "none", "lanczos", "imaginary-time"):
        raise ConfigurationError(f"unknown exact method {exact!r}")
    res = hartree_static(config, tol=float(params["tol"]), max_iter=int(params["max_iter"]))
    h = TwoParticleHamiltonian(config)
    product = np.outer(res.orbital_a, res.orbital_b)
    overlap = None
    if exact in ("lanczos", "imaginary-time"):
        e0, psi0 = exact_ground_state(config, method=exact)
        res.exact_energy = e0
        overlap = float(abs(np.vdot(psi0.reshape(-1), product.reshape(-1))) ** 2)
    rec = grid_record(0.0, product, h)
    traj = Trajectory(np.array([0.0]), [replace(rec, meanfield_fidelity=overlap)])
    metrics = {
        "hartree_energy": res.energy,
        "exact_energy": res.exact_energy,
        "exact_gap": res.exact_gap,
        "scf_iterations": res.scf_iterations,
        "converged": res.converged,
        "consistency_residual": res.consistency_residual,
        "ground_state_overlap": overlap,
    }
    out = {**_config_parameters(config), "exact": exact, "tol": params["tol"],
           "max_iter": params["max_iter"]}
    return RegimeReport("hartree", out, metrics, traj)


def _oscillators(params: dict) -> RegimeReport:
    cfg = OscillatorConfig(
        cutoff=int(params["cutoff"]), omega_a=float(params["omega_a"]),
        omega_b=float(params["omega_b"]), g=float(params["g"]),
        alpha_a=complex_value(params["alpha_a"], "alpha_a"),
        alpha_b=complex_value(params["alpha_b"], "alpha_b"))
    if cfg.g == 0:
        raise ConfigurationError("g = 0 has no swap period; set steps via a coupled run")
    steps = int(params["steps"])
    spec = PropagatorSpec(cfg.swap_period / steps, steps, "exact", float(params["hbar"]),
                          int(params["record_every"]))
    return run_coupled_oscillators(cfg, spec, mean_field=_bool(params["mean_field"], "mean_field"))


def run_scenario(config: dict, seed: int = 0) -> RegimeReport:
    """Run the scenario named by ``config['scenario']``.

    ``seed`` only matters for randomized scenarios (the counterexample);
    an explicit ``seed`` key in the config takes precedence.
    """
    name, params = resolve(config)
    if name == "test_particle":
        report = run_test_particle(two_particle_config(params), grid_run_spec(params),
                                   control=_bool(params["control"], "control"))
    elif name == "material_point":
        report = run_material_point(two_particle_config(params), grid_run_spec(params))
    elif name == "hartree":
        report = _hartree(params)
    elif name == "oscillators":
        report = _oscillators(params)
    else:
        used = seed if params["seed"] is None else int(params["seed"])
        spec = PropagatorSpec(float(params["dt"]), int(params["steps"]), "exact",
                              float(params["hbar"]), int(params["record_every"]))
        report = run_theorem2_counterexample((int(params["d_a"]), int(params["d_b"])), used, spec)
    report.parameters["seed"] = seed
    return report
