"""Generic Gaussian-process machinery: kernels, exact inference, fitting."""

from mixopt.gp.kernels import (
    KernelParams,
    composite_time_joint,
    kernel_eval,
    kernel_matrix,
    matern52,
    rbf,
)
from mixopt.gp.linalg import initial_jitter, jittered_cholesky
from mixopt.gp.regression import (
    FitConfig,
    GPParams,
    PosteriorGaussian,
    TrainingData,
    fit_hyperparameters,
    log_marginal_likelihood,
    posterior,
    posterior_diag,
)

__all__ = [
    "KernelParams",
    "composite_time_joint",
    "kernel_eval",
    "kernel_matrix",
    "matern52",
    "rbf",
    "initial_jitter",
    "jittered_cholesky",
    "FitConfig",
    "GPParams",
    "PosteriorGaussian",
    "TrainingData",
    "fit_hyperparameters",
    "log_marginal_likelihood",
    "posterior",
    "posterior_diag",
]
