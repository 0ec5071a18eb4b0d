"""Product (Hartree) ground energy vs the exact two-body ground energy for
two particles in separate harmonic wells, as the repulsion grows."""

from dataclasses import replace

from entanglab.scenarios.config import resolve, two_particle_config
from entanglab.scenarios.hartree import hartree_static

base = two_particle_config(resolve({"scenario": "hartree"})[1])
for s in (0.0, 0.25, 0.5, 1.0, 2.0):
    cfg = replace(base, potential=replace(base.potential, strength=s))
    res = hartree_static(cfg, exact="lanczos")
    print(f"strength {s:4.2f}: E_hartree {res.energy:.6f}  E_exact {res.exact_energy:.6f}  "
          f"gap {res.exact_gap:.2e}  SCF iterations {res.scf_iterations}")
