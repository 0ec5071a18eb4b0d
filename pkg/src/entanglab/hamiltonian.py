"""Operator-level entanglement analysis of bipartite Hamiltonians.

Everything here works on dense (d_a*d_b) x (d_a*d_b) matrices in the
A-major basis of :mod:`entanglab.hilbert`. The Hilbert-Schmidt inner
product <X, Y> = Tr(X^dagger Y) is the metric for every residual.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hilbert import (
    BipartiteDims,
    as_dims,
    check_density,
    haar_vector,
    partial_trace,
)

HERMITIAN_TOL = 1e-10
NON_ENTANGLING_TOL = 1e-9

# Test hook: a nonzero value breaks the trace gauge of local_split so that the
# verification suite can demonstrate that it catches the fault.
_GAUGE_FAULT = 0.0


@dataclass(frozen=True)
class BipartiteOperator:
    dims: BipartiteDims
    matrix: np.ndarray
    hermitian: bool = True

    def __post_init__(self):
        dims = as_dims(self.dims)
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (dims.total, dims.total):
            raise ValueError(
                f"operator shape {m.shape} does not match dims {tuple(dims)}")
        if self.hermitian and hermiticity_error(m) > HERMITIAN_TOL:
            raise ValueError("operator flagged Hermitian is not Hermitian")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "matrix", m)

    def __add__(self, other: "BipartiteOperator") -> "BipartiteOperator":
        return BipartiteOperator(self.dims, self.matrix + other.matrix,
                                 self.hermitian and other.hermitian)

    def scaled(self, c: float) -> "BipartiteOperator":
        return BipartiteOperator(self.dims, c * self.matrix, self.hermitian)

    def hs_norm(self) -> float:
        return float(np.linalg.norm(self.matrix))


def hermiticity_error(m) -> float:
    m = np.asarray(m)
    return float(np.max(np.abs(m - m.conj().T), initial=0.0))


def as_operator(h, dims=None) -> BipartiteOperator:
    if isinstance(h, BipartiteOperator):
        return h
    if dims is None:
        raise ValueError("dims are required for a bare matrix")
    return BipartiteOperator(as_dims(dims), h)


def local_operator(h_a, h_b) -> np.ndarray:
    """h_a (x) I + I (x) h_b."""
    h_a = np.asarray(h_a, dtype=complex)
    h_b = np.asarray(h_b, dtype=complex)
    return np.kron(h_a, np.eye(h_b.shape[0])) + np.kron(np.eye(h_a.shape[0]), h_b)


def hs_inner(x, y) -> complex:
    return complex(np.vdot(x, y))


@dataclass(frozen=True)
class LocalSplit:
    h_a: np.ndarray
    h_b: np.ndarray
    residual: BipartiteOperator
    residual_hs_norm: float

    def local_part(self) -> np.ndarray:
        return local_operator(self.h_a, self.h_b)


def local_split(h) -> LocalSplit:
    """Orthogonal projection of H onto {A (x) I + I (x) B}.

    The identity component is shared equally between the two local parts,
    which makes the split unique and idempotent.
    """
    h = as_operator(h)
    if not h.hermitian or hermiticity_error(h.matrix) > HERMITIAN_TOL:
        raise ValueError("local_split requires a Hermitian operator")
    d_a, d_b = h.dims
    shift = np.trace(h.matrix) / (2 * d_a * d_b) * (1.0 + _GAUGE_FAULT)
    h_a = partial_trace(h.matrix, h.dims, "A") / d_b - shift * np.eye(d_a)
    h_b = partial_trace(h.matrix, h.dims, "B") / d_a - shift * np.eye(d_b)
    h_a = 0.5 * (h_a + h_a.conj().T)
    h_b = 0.5 * (h_b + h_b.conj().T)
    residual = h.matrix - local_operator(h_a, h_b)
    residual = 0.5 * (residual + residual.conj().T)
    return LocalSplit(h_a, h_b, BipartiteOperator(h.dims, residual),
                      float(np.linalg.norm(residual)))


def relative_residual(h) -> float:
    h = as_operator(h)
    norm = h.hs_norm()
    return 0.0 if norm == 0 else local_split(h).residual_hs_norm / norm


def is_non_entangling(h, tol: float = NON_ENTANGLING_TOL) -> bool:
    """True when H is of the form h_a (x) I + I (x) h_b up to ``tol``.

    The test is relative to ||H||_HS, so it is invariant under H -> cH.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    h = as_operator(h)
    return local_split(h).residual_hs_norm <= tol * h.hs_norm()


@dataclass(frozen=True)
class RateReport:
    gamma: float
    biorthogonal_vector: np.ndarray


def _check_normalized(v, name: str, tol: float = 1e-8) -> np.ndarray:
    v = np.asarray(v, dtype=complex).reshape(-1)
    norm = np.linalg.norm(v)
    if abs(norm - 1.0) > tol:
        raise ValueError(f"{name} must be normalized (norm = {norm!r})")
    return v


def _perp(v: np.ndarray) -> np.ndarray:
    return np.eye(v.size) - np.outer(v, v.conj())


def biorthogonal_rate(h, psi_a, psi_b) -> RateReport:
    """Squared norm of the part of H (psi_a (x) psi_b) bi-orthogonal to it.

    The short-time loss of purity of a product state is 2*gamma*dt^2/hbar^2.
    """
    h = as_operator(h)
    psi_a = _check_normalized(psi_a, "psi_a")
    psi_b = _check_normalized(psi_b, "psi_b")
    if (psi_a.size, psi_b.size) != tuple(h.dims):
        raise ValueError("local state sizes do not match operator dims")
    hpsi = (h.matrix @ np.kron(psi_a, psi_b)).reshape(h.dims)
    # (P_a (x) P_b) acting on a reshaped vector M is P_a M P_b^T
    w = _perp(psi_a) @ hpsi @ _perp(psi_b).T
    return RateReport(float(np.vdot(w, w).real), w.reshape(-1))


def adapted_basis(v: np.ndarray, rng: np.random.Generator | None = None) -> np.ndarray:
    """Orthonormal basis (as columns) whose first element is ``v``.

    Classical Gram-Schmidt on v followed by random vectors.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    v = np.asarray(v, dtype=complex)
    basis = [v / np.linalg.norm(v)]
    while len(basis) < v.size:
        w = haar_vector(v.size, rng)
        for e in basis:
            w = w - np.vdot(e, w) * e
        for e in basis:
            w = w - np.vdot(e, w) * e
        norm = np.linalg.norm(w)
        if norm > 1e-6:
            basis.append(w / norm)
    return np.column_stack(basis)


def gamma_in_adapted_basis(h, psi_a, psi_b, rng=None) -> float:
    """sum_{i>=2, j>=2} |H_{i1j1}|^2 from explicit matrix elements."""
    h = as_operator(h)
    ua = adapted_basis(psi_a, rng)
    ub = adapted_basis(psi_b, rng)
    u = np.kron(ua, ub)
    elements = (u.conj().T @ h.matrix @ u[:, 0]).reshape(h.dims)
    return float(np.sum(np.abs(elements[1:, 1:]) ** 2))


@dataclass(frozen=True)
class EffectivePair:
    """Mean-field generators seen by each party at a given product state.

    ``eff_a`` is <psi_b| H |psi_b> (an operator on A); ``eff_b`` is
    <psi_a| H |psi_a> - <H> I_b, the B generator with the shared energy
    removed so that the product evolves with total energy <H>.
    """

    eff_a: np.ndarray
    eff_b: np.ndarray
    gauge_constant: float

    def eff_a_action(self, v) -> np.ndarray:
        return self.eff_a @ np.asarray(v)

    def eff_b_action(self, v) -> np.ndarray:
        return self.eff_b @ np.asarray(v)

    def product_generator(self, psi_a, psi_b) -> np.ndarray:
        """(eff_a psi_a) (x) psi_b + psi_a (x) (eff_b psi_b)."""
        return (np.kron(self.eff_a_action(psi_a), psi_b)
                + np.kron(psi_a, self.eff_b_action(psi_b)))


def mean_field_operators(h, psi_a, psi_b) -> tuple[np.ndarray, np.ndarray, float]:
    """Unchecked core of :func:`effective_hamiltonians_pure`."""
    d_a, d_b = h.dims
    t = h.matrix.reshape(d_a, d_b, d_a, d_b)
    # two tensordots instead of one einsum: same contraction, BLAS speed
    eff_a = np.tensordot(psi_b.conj(), t @ psi_b, axes=(0, 1))
    m_b = np.tensordot(np.tensordot(psi_a.conj(), t, axes=(0, 0)), psi_a, axes=(1, 0))
    energy = float(np.vdot(psi_b, m_b @ psi_b).real)
    return eff_a, m_b - energy * np.eye(d_b), energy


def effective_hamiltonians_pure(h, psi_a, psi_b) -> EffectivePair:
    h = as_operator(h)
    psi_a = _check_normalized(psi_a, "psi_a")
    psi_b = _check_normalized(psi_b, "psi_b")
    return EffectivePair(*mean_field_operators(h, psi_a, psi_b))


def eff3_residual(h, psi_a, psi_b) -> np.ndarray:
    """H psi - (eff_a psi_a) (x) psi_b - psi_a (x) (eff_b psi_b)."""
    h = as_operator(h)
    pair = effective_hamiltonians_pure(h, psi_a, psi_b)
    psi_a = np.asarray(psi_a, dtype=complex)
    psi_b = np.asarray(psi_b, dtype=complex)
    return h.matrix @ np.kron(psi_a, psi_b) - pair.product_generator(psi_a, psi_b)


def _product_density(h, rho_a, rho_b):
    h = as_operator(h)
    rho_a = check_density(rho_a)
    rho_b = check_density(rho_b)
    if (rho_a.shape[0], rho_b.shape[0]) != tuple(h.dims):
        raise ValueError("local density sizes do not match operator dims")
    return h, rho_a, rho_b, np.kron(rho_a, rho_b)


def theorem2_terms(h, rho_a, rho_b):
    """Effective actions Tr_B(H rho) and Tr_A(H rho) - Tr(H rho) rho_b."""
    h, rho_a, rho_b, rho = _product_density(h, rho_a, rho_b)
    x = h.matrix @ rho
    act_a = partial_trace(x, h.dims, "A")
    act_b = partial_trace(x, h.dims, "B") - np.trace(x) * rho_b
    return x, act_a, act_b


def check_theorem2_condition(h, rho_a, rho_b) -> float:
    """||H rho - (eff_a . rho_a) (x) rho_b - rho_a (x) (eff_b . rho_b)||_HS
    at the product rho = rho_a (x) rho_b."""
    x, act_a, act_b = theorem2_terms(h, rho_a, rho_b)
    rho_a = np.asarray(rho_a, dtype=complex)
    rho_b = np.asarray(rho_b, dtype=complex)
    return float(np.linalg.norm(x - np.kron(act_a, rho_b) - np.kron(rho_a, act_b)))


def theorem3_terms(h, rho_a, rho_b):
    """Commutator [H, rho] and its two partial traces.

    The partial traces play the role of [H'_a, rho_a] and [H'_b, rho_b];
    no Hermitian generator reproducing them need exist, so only the actions
    are returned.
    """
    h, rho_a, rho_b, rho = _product_density(h, rho_a, rho_b)
    c = h.matrix @ rho - rho @ h.matrix
    return c, partial_trace(c, h.dims, "A"), partial_trace(c, h.dims, "B")


def check_theorem3_condition(h, rho_a, rho_b) -> float:
    c, act_a, act_b = theorem3_terms(h, rho_a, rho_b)
    rho_a = np.asarray(rho_a, dtype=complex)
    rho_b = np.asarray(rho_b, dtype=complex)
    return float(np.linalg.norm(c - np.kron(act_a, rho_b) - np.kron(rho_a, act_b)))


def _gue(dim: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return 0.5 * (g + g.conj().T)


def random_hermitian(dims, seed: int, ensemble: str = "gaussian",
                     strength: float = 0.1) -> BipartiteOperator:
    """Random Hermitian operator.

    ``gaussian``: unstructured GUE draw. ``separable``: h_a (x) I + I (x) h_b.
    ``separable-plus-coupling``: a separable draw plus a purely nonlocal
    coupling whose HS norm is ``strength * sqrt(d_a * d_b)``.
    """
    dims = as_dims(dims)
    rng = np.random.default_rng(seed)
    if ensemble == "gaussian":
        return BipartiteOperator(dims, _gue(dims.total, rng))
    if ensemble not in ("separable", "separable-plus-coupling"):
        raise ValueError(f"unknown ensemble {ensemble!r}")
    m = local_operator(_gue(dims.d_a, rng), _gue(dims.d_b, rng))
    if ensemble == "separable-plus-coupling":
        c = local_split(BipartiteOperator(dims, _gue(dims.total, rng))).residual.matrix
        m = m + strength * np.sqrt(dims.total) * c / np.linalg.norm(c)
    return BipartiteOperator(dims, 0.5 * (m + m.conj().T))


def pauli():
    """Return (I, sigma_x, sigma_y, sigma_z)."""
    return (np.eye(2, dtype=complex),
            np.array([[0, 1], [1, 0]], dtype=complex),
            np.array([[0, -1j], [1j, 0]], dtype=complex),
            np.array([[1, 0], [0, -1]], dtype=complex))
