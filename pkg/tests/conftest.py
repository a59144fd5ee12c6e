"""Shared test helpers: random model builders used across modules."""

import numpy as np

from dirinfo.gaussian import GaussianVarModel


def random_covariance(rng, dims):
    """Random well-conditioned PD covariance over blocks of the given
    dimensions; returns (cov, index lists per block)."""
    n = sum(dims)
    W = rng.normal(size=(n, n + 2)) / np.sqrt(n + 2)
    cov = W @ W.T + 0.3 * np.eye(n)
    idx = []
    start = 0
    for d in dims:
        idx.append(list(range(start, start + d)))
        start += d
    return cov, idx


def random_var_model(seed, n_channels=2, spectral_radius=0.6, names=()):
    """Dense random stable VAR(1) with a PD noise covariance."""
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(n_channels, n_channels))
    A *= spectral_radius / np.max(np.abs(np.linalg.eigvals(A)))
    W = rng.normal(size=(n_channels, n_channels)) / np.sqrt(n_channels)
    Q = W @ W.T + 0.4 * np.eye(n_channels)
    return GaussianVarModel(A=A, Q=Q, names=tuple(names))
