import numpy as np
import pytest

from entanglab.scenarios.grid import (
    GaussianPacketSpec,
    Grid1D,
    PotentialSpec,
    TwoParticleConfig,
    TwoParticleHamiltonian,
)
from entanglab.scenarios.hartree import (
    consistency_residual,
    exact_ground_energy,
    exact_ground_state,
    hartree_static,
    kinetic_matrix,
)


def wells(potential, n=32, dx=0.4):
    trap = PotentialSpec("harmonic", k=1.0)
    return TwoParticleConfig(Grid1D(n, dx), 1.0, 1.0, potential, GaussianPacketSpec(0, 1.5),
                             GaussianPacketSpec(0, 1.5), external_a=trap, external_b=trap)


def test_kinetic_matrix_matches_spectral_action(rng):
    c = wells(PotentialSpec())
    t = kinetic_matrix(c, 1.0)
    np.testing.assert_allclose(t, t.T, atol=1e-12)
    v = rng.normal(size=32)
    sym = TwoParticleHamiltonian(c).t_a
    np.testing.assert_allclose(t @ v, np.fft.ifft(sym * np.fft.fft(v)).real, atol=1e-10)


def test_no_interaction_is_sum_of_single_energies():
    c = wells(PotentialSpec())
    res = hartree_static(c, exact="lanczos")
    h1 = kinetic_matrix(c, 1.0) + np.diag(c.external_a(c.grid.x))
    e1 = np.linalg.eigvalsh(h1)[0]
    assert res.energy == pytest.approx(2 * e1, abs=1e-10)
    assert res.exact_energy == pytest.approx(2 * e1, abs=1e-9)
    assert res.consistency_residual <= 1e-10


@pytest.mark.parametrize("pot", [PotentialSpec(), PotentialSpec("constant", value=0.7)])
def test_flat_coupling_residual_vanishes(pot):
    assert hartree_static(wells(pot)).consistency_residual <= 1e-10


def test_residual_detects_non_separable_coupling():
    res = hartree_static(wells(PotentialSpec("soft-coulomb", strength=1.0, softening=1.0)))
    assert res.consistency_residual > 1e-4


def test_residual_zero_for_additive_potential(rng):
    x = rng.normal(size=20)
    y = rng.normal(size=20)
    v = x[:, None] + y[None, :]
    a = rng.normal(size=20)
    b = rng.normal(size=20)
    a, b = a / np.linalg.norm(a), b / np.linalg.norm(b)
    assert consistency_residual(v, a, b) <= 1e-12


def test_variational_gap_monotone_in_coupling():
    gaps = []
    for s in (0.25, 0.5, 1.0):
        res = hartree_static(wells(PotentialSpec("soft-coulomb", strength=s, softening=1.0)),
                             exact="lanczos")
        assert res.converged
        gaps.append(res.exact_gap)
    assert min(gaps) >= 0
    assert np.all(np.diff(gaps) > 0)


def test_hartree_energy_above_dense_ground_state():
    c = wells(PotentialSpec("soft-coulomb", strength=1.0, softening=1.0), n=16, dx=0.6)
    e_dense = np.linalg.eigvalsh(TwoParticleHamiltonian(c).dense())[0]
    res = hartree_static(c)
    assert res.energy >= e_dense - 1e-10
    assert exact_ground_energy(c) == pytest.approx(e_dense, abs=1e-9)


def test_two_exact_oracles_agree():
    c = wells(PotentialSpec("soft-coulomb", strength=0.5, softening=1.0), n=24, dx=0.5)
    e_l, psi_l = exact_ground_state(c, "lanczos")
    e_i, psi_i = exact_ground_state(c, "imaginary-time")
    assert e_i == pytest.approx(e_l, abs=1e-6)
    assert abs(np.vdot(psi_l, psi_i)) == pytest.approx(1.0, abs=1e-5)


def test_unknown_exact_method():
    with pytest.raises(ValueError):
        exact_ground_state(wells(PotentialSpec()), "dmrg")
