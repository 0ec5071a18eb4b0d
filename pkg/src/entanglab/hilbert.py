"""Bipartite state algebra on C^d_a (x) C^d_b.

Vectors use the A-major flattening ``k = i * d_b + j`` (``i`` indexes A,
``j`` indexes B), so ``amplitudes.reshape(d_a, d_b)`` is the coefficient
matrix used by the Schmidt step.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

NORM_TOL = 1e-10
HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-8
PRODUCT_TOL = 1e-8


class BipartiteDims(NamedTuple):
    d_a: int
    d_b: int

    @property
    def total(self) -> int:
        return self.d_a * self.d_b


def as_dims(dims) -> BipartiteDims:
    d_a, d_b = (int(d) for d in dims)
    if d_a < 1 or d_b < 1:
        raise ValueError(f"dimensions must be positive, got ({d_a}, {d_b})")
    return BipartiteDims(d_a, d_b)


@dataclass(frozen=True)
class PureState:
    """Normalized pure state of the composite system."""

    dims: BipartiteDims
    amplitudes: np.ndarray

    def __post_init__(self):
        dims = as_dims(self.dims)
        amp = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amp.size != dims.total:
            raise ValueError(
                f"amplitude length {amp.size} does not match dims {tuple(dims)}")
        norm = np.linalg.norm(amp)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized (norm = {norm!r})")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "amplitudes", amp)

    @classmethod
    def from_vector(cls, dims, vector) -> "PureState":
        """Build a state from an arbitrary nonzero vector, normalizing it."""
        v = np.asarray(vector, dtype=complex).reshape(-1)
        norm = np.linalg.norm(v)
        if norm == 0:
            raise ValueError("cannot normalize the zero vector")
        return cls(dims, v / norm)

    def matrix(self) -> np.ndarray:
        """Coefficient matrix ``c[i, j]`` of shape (d_a, d_b)."""
        return self.amplitudes.reshape(self.dims)

    def projector(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())

    def reduced(self, keep: str = "A") -> np.ndarray:
        c = self.matrix()
        if _side(keep) == "A":
            return c @ c.conj().T
        return c.T @ c.conj()


@dataclass(frozen=True)
class SchmidtDecomposition:
    coefficients: np.ndarray
    left_basis: np.ndarray
    right_basis: np.ndarray

    def reconstruct(self) -> np.ndarray:
        """Return sum_i alpha_i u_i (x) v_i as a flat vector."""
        m = (self.left_basis * self.coefficients) @ self.right_basis.T
        return m.reshape(-1)

    @property
    def rank(self) -> int:
        return int(np.count_nonzero(self.coefficients > PRODUCT_TOL))

    def is_product(self, tol: float = PRODUCT_TOL) -> bool:
        return self.coefficients.size < 2 or self.coefficients[1] <= tol


def _side(keep: str) -> str:
    side = str(keep).upper()
    if side not in ("A", "B"):
        raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")
    return side


def _local_vector(v, name: str) -> np.ndarray:
    v = np.asarray(v, dtype=complex).reshape(-1)
    if v.size == 0 or not np.any(v):
        raise ValueError(f"{name} must be a nonzero vector")
    return v


def normalize(v) -> np.ndarray:
    v = _local_vector(v, "vector")
    return v / np.linalg.norm(v)


def tensor_product(a, b) -> PureState:
    """Normalized product state a (x) b."""
    a = _local_vector(a, "a")
    b = _local_vector(b, "b")
    return PureState.from_vector((a.size, b.size), np.kron(a, b))


def check_density(rho, tol_psd: float = PSD_TOL) -> np.ndarray:
    """Validate and return ``rho`` as a complex square array.

    Raises ValueError naming the first violated invariant.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"density matrix must be square, got shape {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T), initial=0.0) > HERMITIAN_TOL:
        raise ValueError("density matrix is not Hermitian")
    tr = np.trace(rho).real
    if abs(tr - 1.0) > TRACE_TOL:
        raise ValueError(f"density matrix trace is {tr!r}, expected 1")
    if np.linalg.eigvalsh(rho)[0] < -tol_psd:
        raise ValueError("density matrix has a negative eigenvalue")
    return rho


def partial_trace(rho, dims, keep: str = "A") -> np.ndarray:
    """Reduced operator on the kept side.

    Works for any square operator on the product space, not only states;
    the operator-level analysis relies on that.
    """
    dims = as_dims(dims)
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (dims.total, dims.total):
        raise ValueError(
            f"operator shape {rho.shape} does not match dims {tuple(dims)}")
    r = rho.reshape(dims.d_a, dims.d_b, dims.d_a, dims.d_b)
    if _side(keep) == "A":
        return np.einsum("ijkj->ik", r)
    return np.einsum("ijil->jl", r)


def schmidt_decompose(psi: PureState) -> SchmidtDecomposition:
    """Bi-orthogonal decomposition via SVD of the coefficient matrix.

    The singular vectors are returned so that ``psi = sum_i s_i u_i (x) v_i``
    holds exactly (``v_i`` are the conjugated right singular vectors).
    """
    u, s, vh = np.linalg.svd(psi.matrix(), full_matrices=False)
    return SchmidtDecomposition(s, u, vh.T)


def schmidt_coefficients(amplitudes, dims) -> np.ndarray:
    dims = as_dims(dims)
    return np.linalg.svd(np.asarray(amplitudes).reshape(dims), compute_uv=False)


def linear_entropy_from_schmidt(coefficients) -> float:
    """1 - sum(p_i^2) with p_i = alpha_i^2, computed without cancellation.

    Near product states the direct formula loses all digits below ~1e-16;
    this form keeps relative accuracy in the small tail.
    """
    p = np.asarray(coefficients, dtype=float) ** 2
    total = p.sum()
    if total == 0:
        raise ValueError("zero state")
    p = p / total
    head, tail = p[0], p[1:]
    ts = tail.sum()
    return float(2.0 * head * ts + ts * ts - np.dot(tail, tail))


def purity_and_linear_entropy(rho) -> tuple[float, float]:
    """Return (Tr rho^2, 1 - Tr rho^2)."""
    rho = np.asarray(rho, dtype=complex)
    purity = float(np.real(np.vdot(rho.conj().T, rho)))
    return purity, 1.0 - purity


def von_neumann_entropy(rho) -> float:
    w = np.linalg.eigvalsh(np.asarray(rho, dtype=complex))
    w = w[w > 1e-15]
    return float(-np.sum(w * np.log(w)))


def haar_vector(dim: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def random_density(dim: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Random full-rank (by default) density matrix from a Ginibre draw."""
    rank = dim if rank is None else rank
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ g.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return rho / np.trace(rho).real


def random_state(dims, seed: int, kind: str = "product"):
    """Deterministic random input for tests and sweeps.

    ``kind`` is one of ``product`` and ``global`` (returning a PureState) or
    ``mixed-product`` (returning the density matrix rho_A (x) rho_B).
    """
    dims = as_dims(dims)
    rng = np.random.default_rng(seed)
    if kind == "product":
        return tensor_product(haar_vector(dims.d_a, rng), haar_vector(dims.d_b, rng))
    if kind == "global":
        return PureState(dims, haar_vector(dims.total, rng))
    if kind == "mixed-product":
        return np.kron(random_density(dims.d_a, rng), random_density(dims.d_b, rng))
    raise ValueError(f"unknown kind {kind!r}")
