"""Named, reproducible experiments built on the core modules."""

from .config import DEFAULTS, KNOWN_SCENARIOS, load_config, parse_config_text, resolve
from .counterexample import run_theorem2_counterexample
from .grid import (
    ConfigurationError,
    GaussianPacketSpec,
    Grid1D,
    GridRunSpec,
    PotentialSpec,
    TwoParticleConfig,
    TwoParticleHamiltonian,
    build_two_particle_hamiltonian,
)
from .hartree import HartreeResult, exact_ground_energy, exact_ground_state, hartree_static
from .oscillators import OscillatorConfig, run_coupled_oscillators
from .regimes import (
    RegimeReport,
    delocalization_contrast,
    propagate_grid,
    run_material_point,
    run_test_particle,
)
from .runner import run_scenario
