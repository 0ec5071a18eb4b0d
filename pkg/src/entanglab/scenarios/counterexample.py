"""Mixed product state that is stationary under H = rho_a (x) rho_b.

The state commutes with H so nothing moves, yet the pure-state style
factorization test on H rho fails; the commutator form passes.
"""

from __future__ import annotations

import numpy as np

from ..dynamics import PropagatorSpec, propagate_density
from ..hamiltonian import (
    BipartiteOperator,
    check_theorem2_condition,
    check_theorem3_condition,
    random_hermitian,
    theorem3_terms,
)
from ..hilbert import as_dims, haar_vector, purity_and_linear_entropy, random_density
from .regimes import RegimeReport

MIXED_PURITY_MAX = 0.95


def mixed_factors(dims, seed: int, max_tries: int = 100):
    """Draw rho_a, rho_b with purity below 0.95, moving to the next seed on
    an accidentally pure draw. Returns (rho_a, rho_b, seed_used)."""
    dims = as_dims(dims)
    for s in range(seed, seed + max_tries):
        rng = np.random.default_rng(s)
        rho_a = random_density(dims.d_a, rng)
        rho_b = random_density(dims.d_b, rng)
        if max(purity_and_linear_entropy(r)[0] for r in (rho_a, rho_b)) < MIXED_PURITY_MAX:
            return rho_a, rho_b, s
    raise ValueError(f"no mixed draw found for dims {tuple(dims)} from seed {seed}")


def run_theorem2_counterexample(dims=(2, 2), seed: int = 11,
                                spec: PropagatorSpec | None = None) -> RegimeReport:
    dims = as_dims(dims)
    if min(dims) < 2:
        raise ValueError("both factors need dimension >= 2 to be mixed")
    rho_a, rho_b, used = mixed_factors(dims, seed)
    rho = np.kron(rho_a, rho_b)
    h = BipartiteOperator(dims, rho)
    spec = spec or PropagatorSpec(0.5, 40, "exact")
    tr = propagate_density(h, rho, spec, dims)
    drift = max(float(np.abs(r - rho).max()) for r in tr.states)
    _, act_a, act_b = theorem3_terms(h, rho_a, rho_b)

    # control: pure product factors under a separable H
    rng = np.random.default_rng(used)
    a, b = haar_vector(dims.d_a, rng), haar_vector(dims.d_b, rng)
    h_sep = random_hermitian(dims, used, "separable")
    pa, pb = np.outer(a, a.conj()), np.outer(b, b.conj())

    metrics = {
        "seed_used": used,
        "purity_a": purity_and_linear_entropy(rho_a)[0],
        "purity_b": purity_and_linear_entropy(rho_b)[0],
        "stationarity_error": drift,
        "theorem2_residual": check_theorem2_condition(h, rho_a, rho_b),
        "theorem3_residual": check_theorem3_condition(h, rho_a, rho_b),
        "partial_trace_trace_a": float(abs(np.trace(act_a))),
        "partial_trace_trace_b": float(abs(np.trace(act_b))),
        "control_theorem2_residual": check_theorem2_condition(h_sep, pa, pb),
        "control_theorem3_residual": check_theorem3_condition(h_sep, pa, pb),
    }
    params = {"d_a": dims.d_a, "d_b": dims.d_b, "seed": seed, "dt": spec.dt,
              "steps": spec.steps, "record_every": spec.record_every, "method": spec.method,
              "hbar": spec.hbar}
    tr.states = []
    return RegimeReport("counterexample", params, metrics, tr)
