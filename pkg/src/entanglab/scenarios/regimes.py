"""Quasi-classical regimes of two interacting particles on a grid.

Each run returns a :class:`RegimeReport` with a trajectory of
:class:`~entanglab.dynamics.TimeSeriesRecord` rows and a flat dict of
scalar metrics. The ``meanfield_fidelity`` column carries whichever
factorized approximation the regime compares against.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np
from scipy.integrate import solve_ivp

from ..dynamics import Trajectory
from .grid import (
    GaussianPacketSpec,
    GridRunSpec,
    TwoParticleConfig,
    TwoParticleHamiltonian,
    circular_mean,
    grid_record,
    kinetic_symbol,
    marginal_fidelity,
    positions,
    single_particle_propagator,
    total_momentum,
    two_particle_propagator,
)


@dataclass
class RegimeReport:
    scenario: str
    parameters: dict
    metrics: dict
    trajectory: Trajectory
    control: Optional[Trajectory] = field(default=None, repr=False)


@dataclass
class GridRun:
    trajectory: Trajectory
    final_state: np.ndarray
    momentum_drift: float
    centers: np.ndarray  # rows (t, <x_a>, <x_b>)


def propagate_grid(config: TwoParticleConfig, spec: GridRunSpec,
                   observer: Optional[Callable] = None, *, gamma: bool = True) -> GridRun:
    """Exact split-step evolution of the product of the configured packets.

    ``observer(k, psi)`` is called after every step and may return a value
    for the ``meanfield_fidelity`` column on record steps.
    """
    g = config.grid
    h = TwoParticleHamiltonian(config)
    prop = two_particle_propagator(h, spec.dt, spec.order)
    psi = config.initial_state()
    p0 = total_momentum(g, psi, config.hbar)
    drift = 0.0
    times, records, centers = [], [], []

    def record(k, extra):
        t = k * spec.dt
        r = grid_record(t, psi, h if gamma else None)
        records.append(replace(r, meanfield_fidelity=extra))
        times.append(t)
        centers.append((t, *positions(g, psi)))

    record(0, observer(0, psi) if observer else None)
    for k in range(1, spec.steps + 1):
        psi = prop.step(psi)
        extra = observer(k, psi) if observer else None
        if spec.is_record_step(k):
            drift = max(drift, abs(total_momentum(g, psi, config.hbar) - p0))
            record(k, extra)
    return GridRun(Trajectory(np.array(times), records), psi, drift, np.array(centers))


def _max_entropy(tr: Trajectory) -> float:
    return float(np.nanmax(tr.column("linear_entropy")))


def _config_parameters(config: TwoParticleConfig) -> dict:
    def packet(p: GaussianPacketSpec):
        return {"x0": p.x0, "sigma": p.sigma, "k0": p.k0, "separation": p.separation}

    def pot(p):
        return {k: getattr(p, k) for k in ("kind", "strength", "softening", "depth", "width", "k", "value")}

    return {
        "n": config.grid.n, "dx": config.grid.dx, "origin": config.grid.origin,
        "m_a": config.m_a, "m_b": config.m_b, "hbar": config.hbar,
        "potential": pot(config.potential),
        "external_a": pot(config.external_a), "external_b": pot(config.external_b),
        "packet_a": packet(config.packet_a), "packet_b": packet(config.packet_b),
        "kinetic": config.kinetic,
    }


def _spec_parameters(spec: GridRunSpec) -> dict:
    return {"dt": spec.dt, "steps": spec.steps, "record_every": spec.record_every,
            "order": spec.order}


# -- test particle ------------------------------------------------------------

def _frozen_potential_pass(config: TwoParticleConfig, spec: GridRunSpec) -> GridRun:
    """Exact run alongside A alone in the potential of B frozen at x_b0."""
    g = config.grid
    v = config.potential(g.wrap(g.x - config.packet_b.x0)) + config.external_a(g.x)
    single = single_particle_propagator(g, config.m_a, v, spec.dt, config.hbar,
                                        spec.order, config.kinetic)
    state = {"phi": config.packet_a.on(g)}

    def observer(k, psi):
        if k > 0:
            state["phi"] = single.step(state["phi"])
        if spec.is_record_step(k) or k == 0:
            return marginal_fidelity(psi, state["phi"])
        return None

    return propagate_grid(config, spec, observer)


def run_test_particle(config: TwoParticleConfig, spec: GridRunSpec, *,
                      control: bool = True) -> RegimeReport:
    """Light A scattering off a localized B at rest.

    Compares the configured masses with a 1:1 control and measures how well
    A's reduced state follows a single-particle evolution in B's frozen
    potential V(x - x_b0).
    """
    g = config.grid
    pb = config.packet_b
    if pb.k0 != 0 or pb.total_width > 4 * g.dx:
        warnings.warn("test-particle regime expects B at rest with width <= 4*dx",
                      stacklevel=2)
    main = _frozen_potential_pass(config, spec)
    metrics = {
        "mass_ratio": config.m_b / config.m_a,
        "reduced_mass": config.reduced_mass,
        "max_linear_entropy": _max_entropy(main.trajectory),
        "min_frozen_fidelity": float(np.nanmin(main.trajectory.column("meanfield_fidelity"))),
        "max_momentum_drift": main.momentum_drift,
    }
    ctrl = None
    if control:
        ctrl = _frozen_potential_pass(config.with_masses(config.m_a, config.m_a), spec)
        s_ctrl = _max_entropy(ctrl.trajectory)
        metrics["control_max_linear_entropy"] = s_ctrl
        metrics["control_min_frozen_fidelity"] = float(
            np.nanmin(ctrl.trajectory.column("meanfield_fidelity")))
        s = metrics["max_linear_entropy"]
        metrics["suppression_factor"] = s_ctrl / s if s > 0 else None
    params = {**_config_parameters(config), **_spec_parameters(spec)}
    return RegimeReport("test_particle", params, metrics, main.trajectory,
                        None if ctrl is None else ctrl.trajectory)


# -- material point -----------------------------------------------------------

def _mean_momentum(grid, psi: np.ndarray, hbar: float) -> float:
    p = np.abs(np.fft.fft(psi)) ** 2
    return float(hbar * np.sum(p * grid.k) / p.sum())


class LinearizedPropagator:
    """Product evolution with V_AB replaced by its first-order expansion.

    A feels V'(R)(x_a - c_a) and B feels -V'(R)(x_b - c_b), with
    R = c_a - c_b built from the current packet centers. The centers are
    predicted at the half step from <p>/m so the scheme stays second order.
    The constant V(R) only contributes a global phase and is dropped.
    """

    def __init__(self, config: TwoParticleConfig, dt: float):
        g = config.grid
        self.config, self.dt = config, dt
        hbar = config.hbar
        self._t_a = np.exp(-1j * dt * kinetic_symbol(g, config.m_a, hbar, config.kinetic) / hbar)
        self._t_b = np.exp(-1j * dt * kinetic_symbol(g, config.m_b, hbar, config.kinetic) / hbar)
        self._v_a = config.external_a(g.x)
        self._v_b = config.external_b(g.x)

    def centers(self, a: np.ndarray, b: np.ndarray) -> tuple[float, float]:
        g = self.config.grid
        return circular_mean(g, np.abs(a) ** 2), circular_mean(g, np.abs(b) ** 2)

    def step(self, a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        c = self.config
        g, hbar, dt = c.grid, c.hbar, self.dt
        c_a, c_b = self.centers(a, b)
        c_a += 0.5 * dt * _mean_momentum(g, a, hbar) / c.m_a
        c_b += 0.5 * dt * _mean_momentum(g, b, hbar) / c.m_b
        force = float(c.potential.derivative(g.wrap(c_a - c_b)))
        w_a = self._v_a + force * g.wrap(g.x - c_a)
        w_b = self._v_b - force * g.wrap(g.x - c_b)
        out = []
        for psi, w, t in ((a, w_a, self._t_a), (b, w_b, self._t_b)):
            half = np.exp(-0.5j * dt * w / hbar)
            out.append(half * np.fft.ifft(t * np.fft.fft(half * psi)))
        return out[0], out[1]


def classical_trajectories(config: TwoParticleConfig, times: np.ndarray) -> np.ndarray:
    """Point-particle Newton equations for the same potentials.

    Returns rows (x_a, x_b) at ``times``; starts from the packet centers and
    momenta hbar*k0.
    """
    c = config
    g = c.grid

    def rhs(t, y):
        x_a, x_b, p_a, p_b = y
        f = -float(c.potential.derivative(g.wrap(x_a - x_b)))
        f_a = f - float(c.external_a.derivative(x_a))
        f_b = -f - float(c.external_b.derivative(x_b))
        return [p_a / c.m_a, p_b / c.m_b, f_a, f_b]

    y0 = [c.packet_a.x0, c.packet_b.x0, c.hbar * c.packet_a.k0, c.hbar * c.packet_b.k0]
    sol = solve_ivp(rhs, (0.0, float(times[-1])), y0, t_eval=times, method="DOP853",
                    rtol=1e-10, atol=1e-12)
    if not sol.success:
        raise RuntimeError(f"classical integration failed: {sol.message}")
    return sol.y[:2].T


def run_material_point(config: TwoParticleConfig, spec: GridRunSpec) -> RegimeReport:
    """Exact two-body run against the linearized-separable evolution and
    against classical point-particle trajectories."""
    scale = config.potential.scale
    width = max(config.packet_a.total_width, config.packet_b.total_width)
    if width >= scale:
        warnings.warn(f"packet width {width} is not small against the potential scale {scale}",
                      stacklevel=2)
    g = config.grid
    lin = LinearizedPropagator(config, spec.dt)
    state = {"a": config.packet_a.on(g), "b": config.packet_b.on(g)}
    lin_centers = []

    def observer(k, psi):
        if k > 0:
            state["a"], state["b"] = lin.step(state["a"], state["b"])
        if k == 0 or spec.is_record_step(k):
            lin_centers.append(lin.centers(state["a"], state["b"]))
            overlap = np.vdot(state["a"], psi @ state["b"].conj())
            return float(abs(overlap) ** 2)
        return None

    run = propagate_grid(config, spec, observer)
    times = run.centers[:, 0]
    classical = classical_trajectories(config, times)
    exact_err = np.abs(g.wrap(run.centers[:, 1:] - classical)).max()
    lin_err = np.abs(g.wrap(np.array(lin_centers) - classical)).max()
    rel = scale if np.isfinite(scale) else g.length
    metrics = {
        "min_linearized_fidelity": float(np.nanmin(run.trajectory.column("meanfield_fidelity"))),
        "max_linear_entropy": _max_entropy(run.trajectory),
        "center_error_exact": float(exact_err),
        "center_error_linearized": float(lin_err),
        "relative_center_error": float(max(exact_err, lin_err) / rel),
        "potential_scale": float(rel),
        "max_momentum_drift": run.momentum_drift,
        "reduced_mass": config.reduced_mass,
        "final_classical_x_a": float(classical[-1, 0]),
        "final_classical_x_b": float(classical[-1, 1]),
    }
    params = {**_config_parameters(config), **_spec_parameters(spec)}
    return RegimeReport("material_point", params, metrics, run.trajectory)


# -- delocalization -----------------------------------------------------------

def delocalization_contrast(config: TwoParticleConfig, spec: GridRunSpec,
                            separation: float) -> dict:
    """Max linear entropy with B split into two humps vs a single hump.

    Both B packets use the configured hump width; the two-hump one places
    humps at x0 +- separation/2.
    """
    pb = config.packet_b
    single = replace(config, packet_b=replace(pb, separation=0.0))
    split = replace(config, packet_b=replace(pb, separation=separation))
    s1 = _max_entropy(propagate_grid(single, spec, gamma=False).trajectory)
    s2 = _max_entropy(propagate_grid(split, spec, gamma=False).trajectory)
    return {"single_hump_entropy": s1, "two_hump_entropy": s2,
            "ratio": s2 / s1 if s1 > 0 else None}
