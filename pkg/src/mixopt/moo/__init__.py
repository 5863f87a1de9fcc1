"""Multi-objective machinery: Pareto filtering, hypervolume, acquisition."""

from mixopt.moo.acquisition import (
    AcquisitionConfig,
    AcquisitionResult,
    GaussianBatchSampler,
    NehviState,
    optimize_acquisition,
    prepare_nehvi,
    qehvi,
    qlognehvi,
    qnehvi,
    sobol_normal_samples,
)
from mixopt.moo.hypervolume import (
    batch_hypervolume_improvement,
    box_decomposition,
    hypervolume,
    hypervolume_inclusion_exclusion,
)
from mixopt.moo.pareto import ParetoFrontier, dominates, pareto_filter

__all__ = [
    "AcquisitionConfig",
    "AcquisitionResult",
    "GaussianBatchSampler",
    "NehviState",
    "optimize_acquisition",
    "prepare_nehvi",
    "qehvi",
    "qlognehvi",
    "qnehvi",
    "sobol_normal_samples",
    "batch_hypervolume_improvement",
    "box_decomposition",
    "hypervolume",
    "hypervolume_inclusion_exclusion",
    "ParetoFrontier",
    "dominates",
    "pareto_filter",
]
