"""mixopt: multi-objective Bayesian optimization for low-carbon concrete.

A probabilistic strength model over (composition, age), a deterministic
global-warming-potential objective, expected-hypervolume-improvement batch
proposals, and a lab-in-the-loop campaign workflow with CLI and HTTP service.
"""

from mixopt.design_space import Constraints, LinearConstraint, Mixture
from mixopt.objectives import GwpTable, ObjectiveSpec, gwp, objective_posterior
from mixopt.strength import (
    StrengthGP,
    StrengthObservation,
    augment_zero_day,
    cross_validate,
    featurize,
    fit_strength_model,
    predict_strength,
)

__version__ = "0.1.0"

__all__ = [
    "Constraints",
    "LinearConstraint",
    "Mixture",
    "GwpTable",
    "ObjectiveSpec",
    "gwp",
    "objective_posterior",
    "StrengthGP",
    "StrengthObservation",
    "augment_zero_day",
    "cross_validate",
    "featurize",
    "fit_strength_model",
    "predict_strength",
    "__version__",
]
