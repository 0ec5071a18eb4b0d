"""Invariant suites run by ``entanglab verify``.

Each check produces one table line: name, number of instances, the worst
measured value and the bound it is held to.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import hamiltonian as ham
from .dynamics import PropagatorSpec, propagate_pure, purity_decay_coefficient
from .hamiltonian import BipartiteOperator, biorthogonal_rate, local_split, pauli, random_hermitian
from .hilbert import haar_vector, tensor_product


@dataclass(frozen=True)
class Check:
    name: str
    instances: int
    value: float
    bound: float
    sense: str = "<="

    @property
    def passed(self) -> bool:
        if not np.isfinite(self.value):
            return False
        return self.value <= self.bound if self.sense == "<=" else self.value >= self.bound


# -- theorems -----------------------------------------------------------------

def check_sufficient_direction(rng, n_h: int = 100, n_states: int = 100) -> list[Check]:
    """Separable H: zero rate and no entropy over t in [0, 5]."""
    worst_gamma = worst_entropy = 0.0
    spec = PropagatorSpec(0.5, 10)
    for seed in range(n_h):
        dims = tuple(int(d) for d in rng.integers(1, 5, size=2))
        h = random_hermitian(dims, seed, "separable")
        for _ in range(n_states):
            a, b = haar_vector(dims[0], rng), haar_vector(dims[1], rng)
            worst_gamma = max(worst_gamma, biorthogonal_rate(h, a, b).gamma)
            tr = propagate_pure(h, tensor_product(a, b), spec, keep_states=False)
            worst_entropy = max(worst_entropy, tr.column("linear_entropy").max())
    n = n_h * n_states
    return [Check("sufficient: gamma of separable H", n, worst_gamma, 1e-12),
            Check("sufficient: entropy over t<=5", n, worst_entropy, 1e-9)]


def check_necessary_direction(rng, n_h: int = 100, draws: int = 500) -> list[Check]:
    """Entangling H: some product entangles by t = 1/||H||.

    The value is the smallest, over Hamiltonians, of the best second Schmidt
    coefficient found; the bound is 1e-4.
    """
    worst = np.inf
    for seed in range(n_h):
        dims = tuple(int(d) for d in rng.integers(2, 5, size=2))
        h = random_hermitian(dims, seed)
        if ham.relative_residual(h) < 0.1:
            continue
        t_end = 1.0 / np.linalg.norm(h.matrix, 2)
        best = 0.0
        for _ in range(draws):
            a, b = haar_vector(dims[0], rng), haar_vector(dims[1], rng)
            if biorthogonal_rate(h, a, b).gamma < 1e-6:
                continue
            tr = propagate_pure(h, tensor_product(a, b), PropagatorSpec(t_end / 10, 10),
                                keep_states=False)
            best = max(best, np.nanmax(tr.column("schmidt2")))
            if best > 1e-4:
                break
        worst = min(worst, best)
    return [Check("necessary: schmidt2 by t=1/||H||", n_h, worst, 1e-4, ">=")]


def check_closed_form() -> list[Check]:
    _, x, _, _ = pauli()
    h = BipartiteOperator((2, 2), np.kron(x, x))
    ket = tensor_product([1, 0], [1, 0])
    gamma = biorthogonal_rate(h, [1, 0], [1, 0]).gamma
    tr = propagate_pure(h, ket, PropagatorSpec(np.pi / 4, 1))
    return [Check("closed form: XX gamma = 1", 1, abs(gamma - 1), 1e-12),
            Check("closed form: XX purity 1/2 at pi/4", 1, abs(tr.records[-1].purity_a - 0.5), 1e-10)]


def check_gauge_invariance(rng, n: int = 50) -> list[Check]:
    """Split residual and rate unchanged by H -> H + c I."""
    worst = 0.0
    for k in range(n):
        dims = tuple(int(d) for d in rng.integers(2, 5, size=2))
        h = random_hermitian(dims, 1000 + k)
        c = float(rng.normal(scale=10))
        shifted = BipartiteOperator(dims, h.matrix + c * np.eye(h.dims.total))
        r0, r1 = local_split(h).residual_hs_norm, local_split(shifted).residual_hs_norm
        a, b = haar_vector(dims[0], rng), haar_vector(dims[1], rng)
        g0, g1 = biorthogonal_rate(h, a, b).gamma, biorthogonal_rate(shifted, a, b).gamma
        worst = max(worst, abs(r0 - r1), abs(g0 - g1))
    return [Check("gauge invariance: H -> H + cI", n, worst, 1e-9)]


def check_projection(rng, n: int = 500) -> list[Check]:
    """Residual is HS-orthogonal to every local operator."""
    worst = 0.0
    for k in range(n):
        dims = tuple(int(d) for d in rng.integers(2, 5, size=2))
        h = random_hermitian(dims, 2000 + k)
        res = local_split(h).residual.matrix
        probe = ham.local_operator(random_hermitian((dims[0], 1), k).matrix,
                                   random_hermitian((1, dims[1]), k + 1).matrix)
        overlap = abs(ham.hs_inner(probe, res)) / (np.linalg.norm(probe) * np.linalg.norm(res))
        worst = max(worst, overlap)
    return [Check("split residual orthogonal to local ops", n, worst, 1e-10)]


def check_counterexample() -> list[Check]:
    from .scenarios.counterexample import run_theorem2_counterexample

    m = run_theorem2_counterexample((2, 2), 11).metrics
    return [
        Check("counterexample: stationary", 1, m["stationarity_error"], 1e-9),
        Check("counterexample: H rho test fails", 1, m["theorem2_residual"], 1e-3, ">="),
        Check("counterexample: commutator test holds", 1, m["theorem3_residual"], 1e-9),
        Check("commutator partial traces trace-free", 1,
              max(m["partial_trace_trace_a"], m["partial_trace_trace_b"]), 1e-10),
    ]


def suite_theorems(seed: int = 0) -> list[Check]:
    rng = np.random.default_rng(seed)
    return (check_closed_form() + check_gauge_invariance(rng) + check_projection(rng)
            + check_sufficient_direction(rng) + check_necessary_direction(rng)
            + check_counterexample())


# -- appendix -----------------------------------------------------------------

def check_purity_law(rng, n: int = 20) -> list[Check]:
    worst_rel = worst_deriv = 0.0
    for seed in range(n):
        h = random_hermitian((3, 3), seed)
        fit = purity_decay_coefficient(h, haar_vector(3, rng), haar_vector(3, rng))
        worst_rel = max(worst_rel, abs(fit.fitted_coefficient / (2 * fit.gamma) - 1))
        worst_deriv = max(worst_deriv, abs(fit.first_derivative))
    return [Check("purity law: fit vs 2 gamma (relative)", n, worst_rel, 0.01),
            Check("first derivative at t=0", n, worst_deriv, 1e-8)]


def check_integrators(rng, n: int = 20) -> list[Check]:
    worst = 0.0
    for seed in range(n):
        h = random_hermitian((3, 3), seed)
        psi = tensor_product(haar_vector(3, rng), haar_vector(3, rng))
        exact = propagate_pure(h, psi, PropagatorSpec(1.0, 1), diagnostics=False)
        rk4 = propagate_pure(h, psi, PropagatorSpec(1e-3, 1000, "rk4", record_every=1000),
                             diagnostics=False)
        worst = max(worst, float(np.linalg.norm(rk4.states[-1] - exact.states[-1])))
    return [Check("rk4 vs exact at t=1, dt=1e-3", n, worst, 1e-8)]


def suite_appendix(seed: int = 0) -> list[Check]:
    rng = np.random.default_rng(seed)
    return check_purity_law(rng) + check_integrators(rng)


# -- regimes ------------------------------------------------------------------

def suite_regimes(seed: int = 0) -> list[Check]:
    from .scenarios import run_scenario
    from .scenarios.config import grid_run_spec, resolve, two_particle_config
    from .scenarios.regimes import delocalization_contrast

    tp = run_scenario({"scenario": "test_particle"}).metrics
    mp = run_scenario({"scenario": "material_point"}).metrics
    osc = run_scenario({"scenario": "oscillators"})
    fock = osc.control
    i = int(np.argmin(np.abs(fock.times - np.pi / 4)))
    gaps = []
    for s in (0.25, 0.5, 1.0):
        m = run_scenario({"scenario": "hartree", "potential": {"strength": s}}).metrics
        gaps.append(m["exact_gap"])
    flat = [run_scenario({"scenario": "hartree", "potential": p}).metrics["consistency_residual"]
            for p in ({"kind": "none"}, {"kind": "constant", "value": 0.7})]
    _, params = resolve({"scenario": "test_particle"})
    deloc = delocalization_contrast(two_particle_config(params), grid_run_spec(params), 12.0)
    return [
        Check("test particle: entropy suppression", 2, tp["suppression_factor"], 10, ">="),
        Check("test particle: frozen-potential fidelity", 1, tp["min_frozen_fidelity"], 0.99, ">="),
        Check("material point: linearized fidelity", 1, mp["min_linearized_fidelity"], 0.99, ">="),
        Check("material point: centers vs classical", 1, mp["relative_center_error"], 0.02),
        Check("grid: total momentum drift", 2,
              max(tp["max_momentum_drift"], mp["max_momentum_drift"]), 1e-7),
        Check("hartree: residual for flat coupling", 2, max(flat), 1e-10),
        Check("hartree: variational gap (min)", 3, min(gaps), 0.0, ">="),
        Check("hartree: gap increments (min)", 2, min(np.diff(gaps)), 0.0, ">="),
        Check("oscillators: coherent entropy", 1, osc.metrics["coherent_max_linear_entropy"], 1e-6),
        Check("oscillators: mean-field infidelity", 1, 1 - osc.metrics["min_meanfield_fidelity"], 1e-5),
        Check("oscillators: Fock entropy at gt=pi/4", 1,
              abs(fock.records[i].linear_entropy - 0.5), 1e-3),
        Check("delocalized B: entropy ratio", 2, deloc["ratio"], 5, ">="),
    ]


SUITES: dict[str, Callable[[int], list[Check]]] = {
    "theorems": suite_theorems,
    "appendix": suite_appendix,
    "regimes": suite_regimes,
}


def run_suites(names, seed: int = 0, threads: int = 1) -> list[tuple[str, list[Check]]]:
    """Run suites, possibly concurrently; results keep the requested order."""
    names = list(SUITES) if "all" in names else list(dict.fromkeys(names))
    for n in names:
        if n not in SUITES:
            raise ValueError(f"unknown suite {n!r}")
    if threads > 1 and len(names) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda n: SUITES[n](seed), names))
    else:
        results = [SUITES[n](seed) for n in names]
    return list(zip(names, results))


def format_table(results) -> str:
    lines = [f"{'suite':<9} {'check':<42} {'n':>6} {'value':>12} {'bound':>12}  status"]
    for suite, checks in results:
        for c in checks:
            lines.append(f"{suite:<9} {c.name:<42} {c.instances:>6} {c.value:>12.3e} "
                         f"{c.sense + ' ' + format(c.bound, '.3g'):>12}  "
                         f"{'PASS' if c.passed else 'FAIL'}")
    return "\n".join(lines)
