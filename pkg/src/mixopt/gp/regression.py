"""Exact Gaussian-process inference and marginal-likelihood hyperparameter
fitting.

Targets are assumed pre-standardized by the caller; the prior mean is zero.
Noise is a single learned variance (lower-bounded) applied to every point
unless the training data pins a fixed per-point variance, which is how
artificial augmentation points are handled.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from mixopt.exceptions import (
    FittingError,
    InputShapeError,
    InsufficientDataError,
    ValidationError,
)
from mixopt.gp import kernels, linalg

log = logging.getLogger("mixopt.gp")

NOISE_FLOOR = 1e-6  # lower bound for the learned noise variance (standardized units)

_LOG_2PI = np.log(2.0 * np.pi)


@dataclass(frozen=True)
class TrainingData:
    """Immutable training set.

    ``fixed_noise`` is either None (all points use the learned scalar noise)
    or a length-n vector of per-point variances in which NaN entries mean
    "use the learned scalar". Non-NaN entries are treated as constants during
    fitting.
    """

    inputs: np.ndarray
    targets: np.ndarray
    fixed_noise: np.ndarray | None = None

    def __post_init__(self):
        X = np.atleast_2d(np.asarray(self.inputs, dtype=float))
        y = np.asarray(self.targets, dtype=float).ravel()
        if X.shape[0] != y.size or X.shape[0] < 1:
            raise InputShapeError(f"inputs {X.shape} inconsistent with targets {y.shape}")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
            raise ValidationError("training data contains non-finite values")
        object.__setattr__(self, "inputs", X)
        object.__setattr__(self, "targets", y)
        if self.fixed_noise is not None:
            fn = np.asarray(self.fixed_noise, dtype=float).ravel()
            if fn.size != y.size:
                raise InputShapeError("fixed_noise length must match targets")
            known = fn[~np.isnan(fn)]
            if np.any(known < 0) or np.any(~np.isfinite(known)):
                raise ValidationError("fixed noise variances must be >= 0 and finite")
            object.__setattr__(self, "fixed_noise", fn)

    @property
    def n(self) -> int:
        return self.inputs.shape[0]

    @property
    def dim(self) -> int:
        return self.inputs.shape[1]

    def learned_noise_mask(self) -> np.ndarray:
        if self.fixed_noise is None:
            return np.ones(self.n, dtype=bool)
        return np.isnan(self.fixed_noise)

    def noise_diagonal(self, sigma2: float) -> np.ndarray:
        diag = np.full(self.n, sigma2)
        if self.fixed_noise is not None:
            fixed = ~np.isnan(self.fixed_noise)
            diag[fixed] = self.fixed_noise[fixed]
        return diag


@dataclass(frozen=True)
class GPParams:
    """Kernel hyperparameters plus the learned Gaussian noise variance."""

    kernel: kernels.KernelParams
    noise_variance: float = 1e-2

    def __post_init__(self):
        if not (np.isfinite(self.noise_variance) and self.noise_variance >= NOISE_FLOOR):
            raise ValidationError(
                f"noise_variance must be finite and >= {NOISE_FLOOR}"
            )

    def to_dict(self) -> dict:
        return {"kernel": self.kernel.to_dict(), "noise_variance": self.noise_variance}

    @classmethod
    def from_dict(cls, d: dict) -> "GPParams":
        return cls(kernels.KernelParams.from_dict(d["kernel"]), float(d["noise_variance"]))


@dataclass(frozen=True)
class PosteriorGaussian:
    """Joint Gaussian over query points."""

    mean: np.ndarray
    covariance: np.ndarray

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float).ravel()
        cov = np.atleast_2d(np.asarray(self.covariance, dtype=float))
        if cov.shape != (mean.size, mean.size):
            raise InputShapeError(f"covariance {cov.shape} inconsistent with mean {mean.shape}")
        asym = float(np.max(np.abs(cov - cov.T))) if cov.size else 0.0
        if asym > 1e-10:
            raise ValidationError(f"covariance asymmetry {asym:.2e} exceeds 1e-10")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "covariance", cov)

    def sd(self) -> np.ndarray:
        return np.sqrt(np.clip(np.diag(self.covariance), 0.0, None))


def posterior(params: GPParams, data: TrainingData, queries) -> PosteriorGaussian:
    """Exact GP posterior at the query points (zero prior mean)."""
    Q = np.atleast_2d(np.asarray(queries, dtype=float))
    K = kernels.kernel_matrix(params.kernel, data.inputs, data.inputs)
    Ky = K + np.diag(data.noise_diagonal(params.noise_variance))
    L, _ = linalg.jittered_cholesky(Ky)
    Ks = kernels.kernel_matrix(params.kernel, data.inputs, Q)
    Kss = kernels.kernel_matrix(params.kernel, Q, Q)
    alpha = linalg.chol_solve(L, data.targets)
    mean = Ks.T @ alpha
    V = linalg.tri_solve(L, Ks)
    cov = Kss - V.T @ V
    cov = 0.5 * (cov + cov.T)
    return PosteriorGaussian(mean, cov)


def posterior_diag(params: GPParams, data: TrainingData, queries, chunk: int = 4096):
    """Posterior mean and variance only, chunked for large query sets."""
    Q = np.atleast_2d(np.asarray(queries, dtype=float))
    K = kernels.kernel_matrix(params.kernel, data.inputs, data.inputs)
    Ky = K + np.diag(data.noise_diagonal(params.noise_variance))
    L, _ = linalg.jittered_cholesky(Ky)
    alpha = linalg.chol_solve(L, data.targets)
    prior_var = params.kernel.total_output_scale
    means = np.empty(Q.shape[0])
    variances = np.empty(Q.shape[0])
    for start in range(0, Q.shape[0], chunk):
        block = Q[start : start + chunk]
        Ks = kernels.kernel_matrix(params.kernel, data.inputs, block)
        means[start : start + chunk] = Ks.T @ alpha
        V = linalg.tri_solve(L, Ks)
        variances[start : start + chunk] = prior_var - np.sum(V * V, axis=0)
    return means, np.clip(variances, 0.0, None)


# ---------------------------------------------------------------------------
# marginal likelihood and its gradient in unconstrained space
# ---------------------------------------------------------------------------


def _learns_noise(data: TrainingData) -> bool:
    return bool(np.any(data.learned_noise_mask()))


def pack_params(params: GPParams, data: TrainingData) -> np.ndarray:
    theta = kernels.pack_log_params(params.kernel)
    if _learns_noise(data):
        theta = np.append(theta, np.log(params.noise_variance - NOISE_FLOOR + 1e-300))
    return theta


def unpack_params(template: GPParams, data: TrainingData, theta: np.ndarray) -> GPParams:
    nk = kernels.n_kernel_params(template.kernel)
    kernel = kernels.unpack_log_params(template.kernel, theta[:nk])
    if _learns_noise(data):
        if theta.size != nk + 1:
            raise InputShapeError(f"expected {nk + 1} parameters, got {theta.size}")
        sigma2 = NOISE_FLOOR + float(np.exp(theta[nk]))
    else:
        if theta.size != nk:
            raise InputShapeError(f"expected {nk} parameters, got {theta.size}")
        sigma2 = template.noise_variance
    return GPParams(kernel, sigma2)


def log_marginal_likelihood(
    params: GPParams, data: TrainingData, with_grad: bool = True
):
    """Gaussian log marginal likelihood, optionally with its analytic gradient.

    The gradient is taken with respect to the unconstrained (log-transformed)
    parameter vector produced by ``pack_params``. The factorization jitter is
    treated as a constant.
    """
    K, grads = kernels.kernel_matrix_with_grads(params.kernel, data.inputs)
    Ky = K + np.diag(data.noise_diagonal(params.noise_variance))
    L, _ = linalg.jittered_cholesky(Ky)
    alpha = linalg.chol_solve(L, data.targets)
    value = (
        -0.5 * float(data.targets @ alpha)
        - float(np.sum(np.log(np.diag(L))))
        - 0.5 * data.n * _LOG_2PI
    )
    if not with_grad:
        return value
    Kinv = linalg.chol_solve(L, np.eye(data.n))
    M = np.outer(alpha, alpha) - Kinv
    grad = np.array([0.5 * float(np.sum(M * dK)) for dK in grads])
    if _learns_noise(data):
        mask = data.learned_noise_mask()
        dsigma2 = params.noise_variance - NOISE_FLOOR  # d sigma^2 / d u for u = log(sigma^2 - floor)
        grad = np.append(grad, 0.5 * float(np.sum(np.diag(M)[mask])) * dsigma2)
    return value, grad


@dataclass(frozen=True)
class FitConfig:
    """Multi-start quasi-Newton settings for hyperparameter fitting."""

    restarts: int = 8
    max_iter: int = 200
    gtol: float = 1e-6
    lengthscale_init: tuple[float, float] = (0.05, 5.0)
    output_scale_init: tuple[float, float] = (0.2, 5.0)
    noise_init: tuple[float, float] = (1e-3, 0.25)
    seed: int = 0
    lengthscale_prior_sd: float | None = 1.0  # None switches the MAP prior off


def _objective(theta, template, data, config):
    params = unpack_params(template, data, theta)
    value, grad = log_marginal_likelihood(params, data)
    if config.lengthscale_prior_sd is not None:
        mask = kernels.lengthscale_mask(template.kernel)
        nk = mask.size
        sd2 = config.lengthscale_prior_sd**2
        value -= 0.5 * float(np.sum(theta[:nk][mask] ** 2)) / sd2
        prior_grad = np.zeros_like(theta)
        prior_grad[:nk][mask] = -theta[:nk][mask] / sd2
        grad = grad + prior_grad
    return -value, -grad


def _random_start(template: GPParams, data: TrainingData, config: FitConfig, rng) -> np.ndarray:
    mask = kernels.lengthscale_mask(template.kernel)
    nk = mask.size
    theta = np.empty(nk + (1 if _learns_noise(data) else 0))
    lo, hi = np.log(config.lengthscale_init)
    theta[:nk][mask] = rng.uniform(lo, hi, size=int(mask.sum()))
    lo, hi = np.log(config.output_scale_init)
    theta[:nk][~mask] = rng.uniform(lo, hi, size=int((~mask).sum()))
    if _learns_noise(data):
        lo, hi = np.log(config.noise_init)
        theta[nk] = rng.uniform(lo, hi)
    return theta


def fit_hyperparameters(
    init: GPParams, data: TrainingData, config: FitConfig = FitConfig()
) -> GPParams:
    """Maximize the (optionally MAP-regularized) marginal likelihood.

    Runs L-BFGS-B from the supplied initialization plus random restarts;
    returns the best optimum, ties broken by restart index. Deterministic
    for a fixed config seed.
    """
    if data.n < 2:
        raise InsufficientDataError("hyperparameter fitting needs at least 2 points")
    rng = np.random.default_rng(config.seed)
    starts = [pack_params(init, data)]
    starts += [_random_start(init, data, config, rng) for _ in range(max(0, config.restarts - 1))]

    best = None
    for idx, theta0 in enumerate(starts):
        try:
            res = minimize(
                _objective,
                theta0,
                args=(init, data, config),
                jac=True,
                method="L-BFGS-B",
                options={"maxiter": config.max_iter, "gtol": config.gtol, "maxls": 40},
            )
        except (np.linalg.LinAlgError, ValueError) as err:
            log.debug("restart %d failed: %s", idx, err)
            continue
        if not np.isfinite(res.fun):
            continue
        # L-BFGS-B is monotone, but guard against a pathological line search
        f0 = _objective(theta0, init, data, config)[0]
        fun, theta = (res.fun, res.x) if res.fun <= f0 else (f0, theta0)
        if best is None or fun < best[0]:
            best = (fun, idx, theta)
    if best is None:
        raise FittingError("no restart produced a finite marginal likelihood")
    log.debug("fit: best restart %d, objective %.6f", best[1], -best[0])
    return unpack_params(init, data, best[2])
