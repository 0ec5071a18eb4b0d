"""Scan the mass of B in the test-particle scattering setup and print the
peak linear entropy of the pair: heavier B entangles less."""

from dataclasses import replace

from entanglab.scenarios.config import grid_run_spec, resolve, two_particle_config
from entanglab.scenarios.regimes import propagate_grid

_, params = resolve({"scenario": "test_particle"})
config, spec = two_particle_config(params), grid_run_spec(params)
for m_b in (1, 10, 100, 1000):
    run = propagate_grid(replace(config, m_b=float(m_b)), spec, gamma=False)
    print(f"m_b/m_a = {m_b:>5}: max linear entropy {run.trajectory.column('linear_entropy').max():.5f}")
