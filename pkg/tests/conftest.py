import numpy as np
import pytest


def brute_partial_trace(rho, d_a, d_b, keep):
    """Explicit index-sum oracle for the partial trace."""
    if keep == "A":
        out = np.zeros((d_a, d_a), dtype=complex)
        for i in range(d_a):
            for k in range(d_a):
                for j in range(d_b):
                    out[i, k] += rho[i * d_b + j, k * d_b + j]
        return out
    out = np.zeros((d_b, d_b), dtype=complex)
    for j in range(d_b):
        for l in range(d_b):
            for i in range(d_a):
                out[j, l] += rho[i * d_b + j, i * d_b + l]
    return out


def haar(dim, rng):
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
