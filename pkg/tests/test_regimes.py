from dataclasses import replace

import numpy as np
import pytest

from entanglab.scenarios.config import grid_run_spec, resolve, two_particle_config
from entanglab.scenarios.grid import (
    GaussianPacketSpec,
    Grid1D,
    GridRunSpec,
    PotentialSpec,
    TwoParticleConfig,
)
from entanglab.scenarios.regimes import (
    LinearizedPropagator,
    classical_trajectories,
    delocalization_contrast,
    propagate_grid,
    run_material_point,
    run_test_particle,
)


def defaults(name):
    _, params = resolve({"scenario": name})
    return two_particle_config(params), grid_run_spec(params)


def short_scattering(m_b, potential=None):
    return TwoParticleConfig(
        Grid1D(32, 0.75), 1.0, m_b,
        potential or PotentialSpec("soft-coulomb", strength=0.5, softening=2.0),
        GaussianPacketSpec(-6.0, 2.0, 0.8), GaussianPacketSpec(0.0, 1.5))


@pytest.mark.parametrize("m_b", [1.0, 10.0, 1000.0])
def test_no_interaction_no_entropy(m_b):
    run = propagate_grid(short_scattering(m_b, PotentialSpec()), GridRunSpec(0.05, 100, 20))
    assert run.trajectory.column("linear_entropy").max() <= 1e-10
    assert run.trajectory.column("gamma").max() <= 1e-10


def test_equal_masses_entangle():
    run = propagate_grid(short_scattering(1.0), GridRunSpec(0.05, 200, 20), gamma=False)
    assert run.trajectory.column("linear_entropy").max() > 1e-4


def test_heavier_b_entangles_less():
    spec = GridRunSpec(0.05, 200, 20)
    light = propagate_grid(short_scattering(1.0), spec, gamma=False)
    heavy = propagate_grid(short_scattering(1000.0), spec, gamma=False)
    assert (heavy.trajectory.column("linear_entropy").max()
            < light.trajectory.column("linear_entropy").max())


def test_test_particle_defaults():
    config, spec = defaults("test_particle")
    report = run_test_particle(config, spec)
    m = report.metrics
    assert m["mass_ratio"] == 1000.0
    assert m["suppression_factor"] >= 10
    assert m["min_frozen_fidelity"] >= 0.99
    assert m["max_momentum_drift"] <= 1e-7
    assert m["control_min_frozen_fidelity"] < m["min_frozen_fidelity"]
    assert report.control is not None
    assert len(report.trajectory.times) == spec.steps // spec.record_every + 1


def test_test_particle_warns_on_moving_b():
    c = replace(short_scattering(100.0), packet_b=GaussianPacketSpec(0.0, 1.5, 0.5))
    with pytest.warns(UserWarning, match="at rest"):
        run_test_particle(c, GridRunSpec(0.05, 10, 5), control=False)


def test_material_point_free_packets_stay_product():
    c = TwoParticleConfig(Grid1D(64, 0.5), 3.0, 3.0, PotentialSpec(),
                          GaussianPacketSpec(-6.0, 2.0, 1.0), GaussianPacketSpec(6.0, 2.0, -1.0))
    m = run_material_point(c, GridRunSpec(0.02, 200, 50)).metrics
    assert m["min_linearized_fidelity"] == pytest.approx(1.0, abs=1e-9)
    assert m["max_linear_entropy"] <= 1e-12


def test_material_point_defaults():
    config, spec = defaults("material_point")
    m = run_material_point(config, spec).metrics
    assert m["min_linearized_fidelity"] >= 0.99
    assert m["relative_center_error"] <= 0.02
    assert m["center_error_linearized"] <= 1e-6


def test_wide_packets_break_material_point():
    config, spec = defaults("material_point")
    wide = replace(config, grid=Grid1D(256, 0.5),
                   packet_a=replace(config.packet_a, sigma=16.0),
                   packet_b=replace(config.packet_b, sigma=16.0))
    with pytest.warns(UserWarning):
        m = run_material_point(wide, spec).metrics
    assert m["min_linearized_fidelity"] < 0.9


def test_classical_oracle_free_motion():
    config, _ = defaults("material_point")
    times = np.linspace(0, 30, 61)
    assert classical_trajectories(config, times).shape[0] == len(times)
    # with no potential the centers move at hbar k0 / m
    free = replace(config, potential=PotentialSpec())
    xs = classical_trajectories(free, times)
    np.testing.assert_allclose(xs[:, 0], config.packet_a.x0 + times * config.packet_a.k0 / 3.0,
                               atol=1e-8)


def test_linearized_propagator_preserves_norm():
    config, _ = defaults("material_point")
    lin = LinearizedPropagator(config, 0.02)
    a, b = config.packet_a.on(config.grid), config.packet_b.on(config.grid)
    for _ in range(50):
        a, b = lin.step(a, b)
    assert np.linalg.norm(a) == pytest.approx(1.0, abs=1e-12)
    assert np.linalg.norm(b) == pytest.approx(1.0, abs=1e-12)


def test_delocalized_b_entangles_more():
    config, spec = defaults("test_particle")
    short = replace(spec, steps=1500)
    out = delocalization_contrast(config, short, 12.0)
    assert out["ratio"] >= 5
    assert out["two_hump_entropy"] > out["single_hump_entropy"]
