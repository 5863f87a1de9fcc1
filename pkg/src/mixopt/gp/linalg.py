"""Numerically stable Cholesky factorization with escalating diagonal jitter."""

from __future__ import annotations

import numpy as np
from scipy.linalg import cho_solve, cholesky, solve_triangular

from mixopt.exceptions import NumericalError

INITIAL_JITTER_FACTOR = 1e-8
MAX_JITTER_FACTOR = 1e-4
JITTER_GROWTH = 10.0


def initial_jitter(K: np.ndarray) -> float:
    """Starting jitter, scaled to the mean diagonal of the matrix."""
    scale = float(np.mean(np.diag(K)))
    if not np.isfinite(scale) or scale <= 0:
        scale = 1.0
    return INITIAL_JITTER_FACTOR * scale


def jittered_cholesky(K: np.ndarray) -> tuple[np.ndarray, float]:
    """Lower Cholesky factor of K + jitter*I, escalating jitter x10 as needed.

    Returns (L, jitter_used). Raises NumericalError carrying the final jitter
    tried once the relative jitter exceeds MAX_JITTER_FACTOR.
    """
    scale = float(np.mean(np.diag(K)))
    if not np.isfinite(scale) or scale <= 0:
        scale = 1.0
    jitter = INITIAL_JITTER_FACTOR * scale
    max_jitter = MAX_JITTER_FACTOR * scale
    eye = np.eye(K.shape[0])
    last_err = None
    while jitter <= max_jitter * (1 + 1e-12):
        try:
            L = cholesky(K + jitter * eye, lower=True)
            return L, jitter
        except np.linalg.LinAlgError as err:  # pragma: no cover - scipy raises ValueError
            last_err = err
        except ValueError as err:
            last_err = err
        jitter *= JITTER_GROWTH
    raise NumericalError(
        f"Cholesky factorization failed up to jitter {jitter / JITTER_GROWTH:.3e}: {last_err}",
        final_jitter=jitter / JITTER_GROWTH,
    )


def chol_solve(L: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Solve (L L^T) x = B given the lower factor."""
    return cho_solve((L, True), B)


def tri_solve(L: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Solve L x = B for lower-triangular L."""
    return solve_triangular(L, B, lower=True)
