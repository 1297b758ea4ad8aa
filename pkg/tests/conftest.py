"""Shared helpers: random connected graphs and dense linear-algebra oracles."""

import numpy as np
import pytest
from hypothesis import settings

from graphsmooth import Graph, PriorSpec, Spectrum, precision_eigenvalues

settings.register_profile("deterministic", derandomize=True)
settings.load_profile("deterministic")


def random_connected_graph(rng: np.random.Generator, n: int, extra_prob: float = 0.2) -> Graph:
    """Random tree by sequential attachment plus independent extra edges."""
    edges = set()
    for v in range(2, n + 1):
        u = int(rng.integers(1, v))
        edges.add((u, v))
    for u in range(1, n + 1):
        for v in range(u + 1, n + 1):
            if (u, v) not in edges and rng.random() < extra_prob:
                edges.add((u, v))
    return Graph(n, tuple(sorted(edges)))


def dense_prior_covariance(spec: PriorSpec, s: Spectrum, c: float) -> np.ndarray:
    """Prior covariance assembled spectrally: sum_i tau_i^2 psi_i psi_i^T."""
    tau2 = precision_eigenvalues(spec, s, c).coefficient_variances
    return (s.basis * tau2) @ s.basis.T


def dense_regression_posterior(spec: PriorSpec, s: Spectrum, c: float, sigma: float,
                               y: np.ndarray):
    """Gaussian conditioning with explicit matrices; the conjugacy oracle.

    Returns (mean, pointwise variance) of f | y for y = f + N(0, sigma^2 I).
    """
    cov = dense_prior_covariance(spec, s, c)
    gain = cov @ np.linalg.inv(cov + sigma**2 * np.eye(s.n))
    mean = gain @ y
    post_cov = cov - gain @ cov
    return mean, np.diag(post_cov).copy()


def path_eigenvalues(m: int) -> np.ndarray:
    """Closed-form Laplacian eigenvalues 4 sin^2(pi k / 2m) of the path graph."""
    k = np.arange(m)
    return np.sort(4.0 * np.sin(np.pi * k / (2 * m)) ** 2)


def ring_eigenvalues(m: int) -> np.ndarray:
    """Closed-form Laplacian eigenvalues 4 sin^2(pi k / m) of the ring graph."""
    k = np.arange(m)
    return np.sort(4.0 * np.sin(np.pi * k / m) ** 2)


def product_eigenvalue_sums(*factors: np.ndarray) -> np.ndarray:
    """All sums picking one eigenvalue from each factor spectrum."""
    total = np.zeros(1)
    for lam in factors:
        total = (total[:, None] + lam[None, :]).ravel()
    return np.sort(total)


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
