"""Two distinguishable particles on a periodic 1D grid.

The joint wavefunction is an (n, n) array ``psi[i, j]`` with ``i`` the grid
index of particle A and ``j`` that of particle B, i.e. the same A-major
layout as :mod:`entanglab.hilbert` with d_a = d_b = n. Amplitudes are
normalized as plain vectors (sum |psi|^2 = 1), not with a dx weight.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
import scipy.sparse.linalg

from ..dynamics import TimeSeriesRecord, pure_record


class ConfigurationError(ValueError):
    """Scenario parameters violate a validity condition."""


@dataclass(frozen=True)
class Grid1D:
    n: int
    dx: float
    origin: Optional[float] = None

    def __post_init__(self):
        if self.n < 16:
            raise ConfigurationError(f"grid needs n >= 16 points, got {self.n}")
        if not self.dx > 0:
            raise ConfigurationError("grid spacing must be positive")
        if self.origin is None:
            object.__setattr__(self, "origin", -0.5 * self.n * self.dx)

    @property
    def length(self) -> float:
        return self.n * self.dx

    @property
    def x(self) -> np.ndarray:
        return self.origin + self.dx * np.arange(self.n)

    @property
    def k(self) -> np.ndarray:
        return 2 * np.pi * np.fft.fftfreq(self.n, d=self.dx)

    def wrap(self, r) -> np.ndarray:
        """Minimum-image displacement in [-L/2, L/2)."""
        L = self.length
        return (np.asarray(r) + 0.5 * L) % L - 0.5 * L

    def separation(self) -> np.ndarray:
        """Matrix of wrapped x_a - x_b, shape (n, n)."""
        x = self.x
        return self.wrap(x[:, None] - x[None, :])


@dataclass(frozen=True)
class PotentialSpec:
    """Pair or external potential as a function of one displacement.

    kinds: ``none``, ``constant`` (value), ``soft-coulomb`` (strength,
    softening), ``gaussian-well`` (depth, width), ``harmonic`` (k).
    """

    kind: str = "none"
    strength: float = 0.0
    softening: float = 1.0
    depth: float = 0.0
    width: float = 1.0
    k: float = 0.0
    value: float = 0.0

    def __post_init__(self):
        if self.kind not in ("none", "constant", "soft-coulomb", "gaussian-well", "harmonic"):
            raise ConfigurationError(f"unknown potential kind {self.kind!r}")
        if self.kind == "soft-coulomb" and not self.softening > 0:
            raise ConfigurationError("soft-coulomb softening must be positive")
        if self.kind == "gaussian-well" and not self.width > 0:
            raise ConfigurationError("gaussian-well width must be positive")

    def __call__(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        if self.kind == "none":
            return np.zeros_like(r)
        if self.kind == "constant":
            return np.full_like(r, self.value)
        if self.kind == "soft-coulomb":
            return self.strength / np.sqrt(r * r + self.softening ** 2)
        if self.kind == "gaussian-well":
            return -self.depth * np.exp(-0.5 * (r / self.width) ** 2)
        return 0.5 * self.k * r * r

    def derivative(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        if self.kind in ("none", "constant"):
            return np.zeros_like(r)
        if self.kind == "soft-coulomb":
            return -self.strength * r / (r * r + self.softening ** 2) ** 1.5
        if self.kind == "gaussian-well":
            return self.depth * r / self.width ** 2 * np.exp(-0.5 * (r / self.width) ** 2)
        return self.k * r

    @property
    def is_zero(self) -> bool:
        return self.kind == "none" or (self.kind == "constant" and self.value == 0)

    @property
    def scale(self) -> float:
        """Length over which the potential varies appreciably."""
        if self.kind == "soft-coulomb":
            return self.softening
        if self.kind == "gaussian-well":
            return self.width
        return np.inf


@dataclass(frozen=True)
class GaussianPacketSpec:
    """exp(-(x - x0)^2 / (4 sigma^2) + i k0 x); sigma is the std of |psi|^2.

    ``separation > 0`` makes a two-hump (bilocated) packet with humps at
    x0 +- separation / 2.
    """

    x0: float = 0.0
    sigma: float = 1.0
    k0: float = 0.0
    separation: float = 0.0

    def on(self, grid: Grid1D) -> np.ndarray:
        x = grid.x
        humps = [self.x0] if self.separation == 0 else [
            self.x0 - 0.5 * self.separation, self.x0 + 0.5 * self.separation]
        psi = np.zeros(grid.n, dtype=complex)
        for c in humps:
            d = grid.wrap(x - c)
            psi += np.exp(-d * d / (4 * self.sigma ** 2))
        # phase referenced to x0 so the seam sits opposite the packet
        psi *= np.exp(1j * self.k0 * grid.wrap(x - self.x0))
        return psi / np.linalg.norm(psi)

    @property
    def total_width(self) -> float:
        """Standard deviation of |psi|^2 (humps assumed well separated)."""
        return float(np.hypot(self.sigma, 0.5 * self.separation))


@dataclass(frozen=True)
class TwoParticleConfig:
    grid: Grid1D
    m_a: float = 1.0
    m_b: float = 1.0
    potential: PotentialSpec = field(default_factory=PotentialSpec)
    packet_a: GaussianPacketSpec = field(default_factory=GaussianPacketSpec)
    packet_b: GaussianPacketSpec = field(default_factory=GaussianPacketSpec)
    hbar: float = 1.0
    external_a: PotentialSpec = field(default_factory=PotentialSpec)
    external_b: PotentialSpec = field(default_factory=PotentialSpec)
    kinetic: str = "spectral"

    def __post_init__(self):
        if not (self.m_a > 0 and self.m_b > 0):
            raise ConfigurationError("masses must be positive")
        if not self.hbar > 0:
            raise ConfigurationError("hbar must be positive")
        for name, p in (("packet_a", self.packet_a), ("packet_b", self.packet_b)):
            if p.sigma < 2 * self.grid.dx:
                raise ConfigurationError(
                    f"{name} width {p.sigma} is below 2*dx = {2 * self.grid.dx}: grid too coarse")
        if self.kinetic not in ("spectral", "fd3"):
            raise ConfigurationError(f"unknown kinetic discretization {self.kinetic!r}")

    @property
    def reduced_mass(self) -> float:
        return self.m_a * self.m_b / (self.m_a + self.m_b)

    @property
    def total_mass(self) -> float:
        return self.m_a + self.m_b

    def with_masses(self, m_a: float, m_b: float) -> "TwoParticleConfig":
        return replace(self, m_a=m_a, m_b=m_b)

    def initial_state(self) -> np.ndarray:
        return np.outer(self.packet_a.on(self.grid), self.packet_b.on(self.grid))


def kinetic_symbol(grid: Grid1D, mass: float, hbar: float, kind: str = "spectral") -> np.ndarray:
    """Fourier multiplier of -hbar^2/(2m) d^2/dx^2."""
    if kind == "spectral":
        k2 = grid.k ** 2
    else:
        # 3-point stencil eigenvalues on the periodic lattice
        k2 = (2 - 2 * np.cos(grid.k * grid.dx)) / grid.dx ** 2
    return hbar ** 2 * k2 / (2 * mass)


class TwoParticleHamiltonian:
    """Matrix-free H = T_A + T_B + V_A(x_a) + V_B(x_b) + V_AB(x_a - x_b)."""

    def __init__(self, config: TwoParticleConfig):
        self.config = config
        g = config.grid
        self.n = g.n
        self.t_a = kinetic_symbol(g, config.m_a, config.hbar, config.kinetic)
        self.t_b = kinetic_symbol(g, config.m_b, config.hbar, config.kinetic)
        self.v_pair = config.potential(g.separation())
        self.v_ext_a = config.external_a(g.x)
        self.v_ext_b = config.external_b(g.x)
        self.v = self.v_pair + self.v_ext_a[:, None] + self.v_ext_b[None, :]
        self.kinetic_grid = self.t_a[:, None] + self.t_b[None, :]

    @property
    def dims(self) -> tuple[int, int]:
        return (self.n, self.n)

    def kinetic(self, psi: np.ndarray) -> np.ndarray:
        return np.fft.ifft2(self.kinetic_grid * np.fft.fft2(psi))

    def apply(self, psi: np.ndarray) -> np.ndarray:
        shape = np.shape(psi)
        psi = np.reshape(psi, self.dims)
        return np.reshape(self.kinetic(psi) + self.v * psi, shape)

    __call__ = apply

    def expectation(self, psi: np.ndarray) -> float:
        psi = np.reshape(psi, self.dims)
        return float(np.vdot(psi, self.apply(psi)).real / np.vdot(psi, psi).real)

    def as_linear_operator(self) -> scipy.sparse.linalg.LinearOperator:
        n2 = self.n * self.n
        return scipy.sparse.linalg.LinearOperator(
            (n2, n2), matvec=lambda v: self.apply(v.reshape(self.dims)).reshape(-1),
            dtype=complex)

    def dense(self) -> np.ndarray:
        """Full n^2 x n^2 matrix; only for small grids."""
        if self.n > 64:
            raise ConfigurationError("dense matrix requested for n > 64")
        n2 = self.n * self.n
        eye = np.eye(n2, dtype=complex)
        return np.column_stack([self.apply(eye[:, c].reshape(self.dims)).reshape(-1)
                                for c in range(n2)])


def build_two_particle_hamiltonian(config: TwoParticleConfig) -> TwoParticleHamiltonian:
    return TwoParticleHamiltonian(config)


class SplitStepPropagator:
    """Strang splitting exp(-iV dt/2) exp(-iT dt) exp(-iV dt/2).

    ``order=4`` composes three Strang steps with the Yoshida triple-jump
    weights. Both commute with global translations, so the total momentum
    of a translation-invariant problem is conserved to round-off.
    """

    _YOSHIDA = (1 / (2 - 2 ** (1 / 3)), -2 ** (1 / 3) / (2 - 2 ** (1 / 3)),
                1 / (2 - 2 ** (1 / 3)))

    def __init__(self, kinetic_grid: np.ndarray, potential: np.ndarray, dt: float,
                 hbar: float = 1.0, order: int = 2):
        if not dt > 0:
            raise ValueError("dt must be positive")
        if order not in (2, 4):
            raise ValueError("order must be 2 or 4")
        weights = (1.0,) if order == 2 else self._YOSHIDA
        self._factors = [
            (np.exp(-0.5j * w * dt * potential / hbar), np.exp(-1j * w * dt * kinetic_grid / hbar))
            for w in weights
        ]
        self.dt = dt

    def step(self, psi: np.ndarray) -> np.ndarray:
        axes = tuple(range(-np.ndim(self._factors[0][1]), 0))
        for half_v, full_t in self._factors:
            psi = half_v * psi
            psi = np.fft.ifftn(full_t * np.fft.fftn(psi, axes=axes), axes=axes)
            psi = half_v * psi
        return psi


def single_particle_propagator(grid: Grid1D, mass: float, potential: np.ndarray, dt: float,
                               hbar: float = 1.0, order: int = 2,
                               kind: str = "spectral") -> SplitStepPropagator:
    return SplitStepPropagator(kinetic_symbol(grid, mass, hbar, kind), potential, dt, hbar, order)


def two_particle_propagator(h: TwoParticleHamiltonian, dt: float,
                            order: int = 2) -> SplitStepPropagator:
    return SplitStepPropagator(h.kinetic_grid, h.v, dt, h.config.hbar, order)


# -- diagnostics ----------------------------------------------------------

def marginal_a(psi: np.ndarray) -> np.ndarray:
    """Reduced density matrix of particle A."""
    return psi @ psi.conj().T


def marginal_fidelity(psi: np.ndarray, phi_a: np.ndarray) -> float:
    """<phi| rho_A |phi> for a pure single-particle state phi."""
    v = phi_a.conj() @ psi
    return float(np.vdot(v, v).real / np.vdot(psi, psi).real / np.vdot(phi_a, phi_a).real)


def positions(grid: Grid1D, psi: np.ndarray) -> tuple[float, float]:
    """<x_a>, <x_b> using minimum-image coordinates around each packet."""
    p = np.abs(psi) ** 2
    p = p / p.sum()
    out = []
    for marg in (p.sum(axis=1), p.sum(axis=0)):
        out.append(circular_mean(grid, marg))
    return out[0], out[1]


def circular_mean(grid: Grid1D, density: np.ndarray) -> float:
    """Mean of a localized density on the ring, insensitive to the seam."""
    density = density / density.sum()
    ref = grid.x[int(np.argmax(density))]
    return float(ref + np.sum(density * grid.wrap(grid.x - ref)))


def total_momentum(grid: Grid1D, psi: np.ndarray, hbar: float = 1.0) -> float:
    phi = np.fft.fft2(psi)
    p = np.abs(phi) ** 2
    p = p / p.sum()
    k = grid.k
    return float(hbar * np.sum(p * (k[:, None] + k[None, :])))


def grid_record(t: float, psi: np.ndarray, h: TwoParticleHamiltonian | None = None) -> TimeSeriesRecord:
    apply_h = None if h is None else (lambda v: h.apply(v.reshape(h.dims)).reshape(-1))
    return pure_record(t, psi.reshape(-1), (psi.shape[0], psi.shape[1]), apply_h)


@dataclass(frozen=True)
class GridRunSpec:
    """Time stepping for grid scenarios (split-step, order 2 or 4)."""

    dt: float
    steps: int
    record_every: int = 10
    order: int = 2

    def __post_init__(self):
        if not self.dt > 0:
            raise ConfigurationError("dt must be positive")
        if int(self.steps) < 1 or int(self.record_every) < 1:
            raise ConfigurationError("steps and record_every must be positive integers")
        if self.order not in (2, 4):
            raise ConfigurationError("split-step order must be 2 or 4")

    @property
    def duration(self) -> float:
        return self.dt * self.steps

    def is_record_step(self, k: int) -> bool:
        return k % self.record_every == 0 or k == self.steps
