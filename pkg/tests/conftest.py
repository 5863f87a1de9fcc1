"""Shared oracles and helpers for the test suite."""

from __future__ import annotations

import numpy as np
import pytest

from mixopt import gp


def finite_difference_gradient(f, theta: np.ndarray, eps: float = 1e-5) -> np.ndarray:
    """Central finite differences of a scalar function."""
    g = np.zeros_like(theta)
    for i in range(theta.size):
        up = theta.copy()
        dn = theta.copy()
        up[i] += eps
        dn[i] -= eps
        g[i] = (f(up) - f(dn)) / (2 * eps)
    return g


def gradient_relative_errors(analytic: np.ndarray, numeric: np.ndarray) -> np.ndarray:
    """Componentwise relative error, treating a jointly-tiny pair as exact."""
    denom = np.maximum(np.abs(analytic), np.abs(numeric))
    err = np.abs(analytic - numeric)
    out = np.where(denom > 1e-7, err / np.where(denom > 0, denom, 1.0), 0.0)
    return out


def pareto_brute_force(points: np.ndarray) -> list[int]:
    """O(n^2) pairwise-domination oracle; returns kept indices in input order,
    first occurrence kept among duplicates."""
    pts = np.asarray(points, dtype=float)
    kept = []
    for i, p in enumerate(pts):
        dominated = False
        for j, q in enumerate(pts):
            if i == j:
                continue
            if np.all(q >= p) and np.any(q > p):
                dominated = True
                break
            if np.array_equal(q, p) and j < i:
                dominated = True  # duplicate; keep the first occurrence only
                break
        if not dominated:
            kept.append(i)
    return kept


def hypervolume_monte_carlo(points, ref, n: int, seed: int) -> tuple[float, float]:
    """(estimate, standard error) by uniform sampling of the bounding box."""
    pts = np.asarray(points, dtype=float)
    ref = np.asarray(ref, dtype=float)
    keep = np.all(pts > ref, axis=1)
    pts = pts[keep]
    if pts.shape[0] == 0:
        return 0.0, 0.0
    hi = pts.max(axis=0)
    vol_box = float(np.prod(hi - ref))
    rng = np.random.default_rng(seed)
    u = rng.uniform(ref, hi, size=(n, ref.size))
    inside = np.zeros(n, dtype=bool)
    for p in pts:
        inside |= np.all(u <= p, axis=1)
    frac = inside.mean()
    se = np.sqrt(max(frac * (1 - frac), 1e-12) / n) * vol_box
    return frac * vol_box, se


def posterior_dense_oracle(params: gp.GPParams, data: gp.TrainingData, queries: np.ndarray):
    """Direct dense-inverse implementation of the posterior equations, using
    the same deterministic jitter as the production path."""
    from mixopt.gp import kernels, linalg

    K = kernels.kernel_matrix(params.kernel, data.inputs, data.inputs)
    Ky = K + np.diag(data.noise_diagonal(params.noise_variance))
    Ky = Ky + linalg.initial_jitter(Ky) * np.eye(Ky.shape[0])
    Kinv = np.linalg.inv(Ky)
    Ks = kernels.kernel_matrix(params.kernel, data.inputs, queries)
    Kss = kernels.kernel_matrix(params.kernel, queries, queries)
    mean = Ks.T @ Kinv @ data.targets
    cov = Kss - Ks.T @ Kinv @ Ks
    return mean, cov


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
