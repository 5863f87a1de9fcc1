"""Probabilistic compressive-strength model over (composition, age).

Three ingredients make a plain GP work on strength curves: artificial
zero-strength records at age zero for every composition (plus a few random
ones), a logarithmic time feature ln(t + tau), and an additive kernel that
pairs a composition-independent time component with an ARD kernel over all
features. The estimator follows the scikit-learn fit/predict convention;
observation-level helpers wrap it for the campaign workflow.
"""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass, replace

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted

from mixopt import gp
from mixopt.design_space import DEFAULT_INGREDIENTS, Constraints, Mixture, sample_feasible
from mixopt.exceptions import InsufficientDataError, InputShapeError, ValidationError

log = logging.getLogger("mixopt.strength")

PSI_PER_MPA = 145.0377
DEFAULT_TAU_DAYS = 1.0 / 24.0  # one hour; resolves ln(t) at t = 0

MEASURED = "measured"
AUGMENTED_ZERO = "augmented_zero"


@dataclass(frozen=True)
class StrengthObservation:
    """One compressive-strength record for a mixture at a curing age."""

    mixture: Mixture
    age_days: float
    strength_mpa: float
    replicate_id: int | None = None
    provenance: str = MEASURED

    def __post_init__(self):
        if self.provenance not in (MEASURED, AUGMENTED_ZERO):
            raise ValidationError(f"unknown provenance {self.provenance!r}")
        if not (np.isfinite(self.age_days) and self.age_days >= 0):
            raise ValidationError("age_days must be finite and >= 0")
        if not (np.isfinite(self.strength_mpa) and self.strength_mpa >= 0):
            raise ValidationError("strength_mpa must be finite and >= 0")
        if self.provenance == AUGMENTED_ZERO and (self.age_days != 0 or self.strength_mpa != 0):
            raise ValidationError("augmented_zero observations must have age 0 and strength 0")
        if self.provenance == MEASURED and self.age_days <= 0:
            raise ValidationError("measured observations must have age > 0")

    def to_dict(self) -> dict:
        return {
            "mixture": self.mixture.to_dict(),
            "age_days": self.age_days,
            "strength_mpa": self.strength_mpa,
            "replicate_id": self.replicate_id,
            "provenance": self.provenance,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "StrengthObservation":
        return cls(
            Mixture(d["mixture"]),
            float(d["age_days"]),
            float(d["strength_mpa"]),
            d.get("replicate_id"),
            d.get("provenance", MEASURED),
        )


def augment_zero_day(
    observations: list[StrengthObservation],
    extra_compositions: int = 0,
    seed: int = 0,
    constraints: Constraints | None = None,
) -> list[StrengthObservation]:
    """Append one (t=0, strength=0) record per distinct mixture, plus
    ``extra_compositions`` records at randomly drawn feasible compositions.

    Idempotent: mixtures that already carry an augmented_zero record are left
    alone. Deterministic for a fixed seed. When no constraints are supplied
    the extra compositions are drawn from the bounding box of the observed
    mixtures.
    """
    if not observations:
        raise InsufficientDataError("augment_zero_day needs at least one observation")
    out = list(observations)
    have_zero = {o.mixture.key() for o in observations if o.provenance == AUGMENTED_ZERO}
    seen = []
    seen_keys = set()
    for o in observations:
        k = o.mixture.key()
        if k not in seen_keys:
            seen_keys.add(k)
            seen.append(o.mixture)
    for m in seen:
        if m.key() not in have_zero:
            out.append(StrengthObservation(m, 0.0, 0.0, provenance=AUGMENTED_ZERO))
    if extra_compositions > 0:
        if constraints is not None:
            X = sample_feasible(constraints, extra_compositions, seed)
            ing = constraints.ingredients
        else:
            ing = _ingredient_union(seen)
            Q = np.array([m.as_vector(ing) for m in seen])
            lo, hi = Q.min(axis=0), Q.max(axis=0)
            rng = np.random.default_rng(seed)
            X = rng.uniform(lo, hi, size=(extra_compositions, len(ing)))
        for row in X:
            out.append(
                StrengthObservation(Mixture.from_vector(row, ing), 0.0, 0.0, provenance=AUGMENTED_ZERO)
            )
    return out


def _ingredient_union(mixtures) -> tuple[str, ...]:
    names = set()
    for m in mixtures:
        names.update(m.quantities)
    ordered = [i for i in DEFAULT_INGREDIENTS if i in names]
    ordered += sorted(names - set(DEFAULT_INGREDIENTS))
    return tuple(ordered)


@dataclass(frozen=True)
class Normalization:
    """Input scaling to the unit box plus target standardization."""

    ingredients: tuple[str, ...]
    input_lo: np.ndarray
    input_hi: np.ndarray
    target_mean: float
    target_sd: float
    tau: float = DEFAULT_TAU_DAYS
    log_time: bool = True
    time_scale: float = 28.0  # only used when log_time is False

    def __post_init__(self):
        lo = np.asarray(self.input_lo, dtype=float)
        hi = np.asarray(self.input_hi, dtype=float)
        if lo.shape != hi.shape or lo.ndim != 1 or lo.size != len(self.ingredients):
            raise InputShapeError("normalization bounds inconsistent with ingredient list")
        if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi)) and np.all(hi >= lo)):
            raise ValidationError("normalization bounds must be finite with hi >= lo")
        if not (np.isfinite(self.target_mean) and np.isfinite(self.target_sd) and self.target_sd > 0):
            raise ValidationError("target standardization constants must be finite, sd > 0")
        object.__setattr__(self, "input_lo", lo)
        object.__setattr__(self, "input_hi", hi)

    def _span(self) -> np.ndarray:
        span = self.input_hi - self.input_lo
        return np.where(span > 0, span, 1.0)

    def normalize_inputs(self, Q: np.ndarray) -> np.ndarray:
        return (Q - self.input_lo) / self._span()

    def denormalize_inputs(self, Z: np.ndarray) -> np.ndarray:
        return Z * self._span() + self.input_lo

    def time_feature(self, age_days) -> np.ndarray:
        t = np.asarray(age_days, dtype=float)
        if np.any(t < 0) or not np.all(np.isfinite(t)):
            raise ValidationError("ages must be finite and >= 0")
        if self.log_time:
            return np.log(t + self.tau)
        return t / (self.time_scale if self.time_scale > 0 else 1.0)

    def standardize_targets(self, y) -> np.ndarray:
        return (np.asarray(y, dtype=float) - self.target_mean) / self.target_sd

    def destandardize_mean(self, mu) -> np.ndarray:
        return np.asarray(mu) * self.target_sd + self.target_mean

    def to_dict(self) -> dict:
        return {
            "ingredients": list(self.ingredients),
            "input_lo": self.input_lo.tolist(),
            "input_hi": self.input_hi.tolist(),
            "target_mean": self.target_mean,
            "target_sd": self.target_sd,
            "tau": self.tau,
            "log_time": self.log_time,
            "time_scale": self.time_scale,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Normalization":
        return cls(
            tuple(d["ingredients"]),
            np.array(d["input_lo"]),
            np.array(d["input_hi"]),
            float(d["target_mean"]),
            float(d["target_sd"]),
            float(d.get("tau", DEFAULT_TAU_DAYS)),
            bool(d.get("log_time", True)),
            float(d.get("time_scale", 28.0)),
        )


def featurize(mixture: Mixture, age_days: float, normalization: Normalization) -> np.ndarray:
    """Feature vector [normalized ingredient quantities..., time feature].

    The time coordinate is always last; the composite kernel relies on that.
    """
    q = mixture.as_vector(normalization.ingredients)
    z = normalization.normalize_inputs(q[None, :])[0]
    return np.append(z, normalization.time_feature(age_days))


def _featurize_rows(Q: np.ndarray, t: np.ndarray, norm: Normalization) -> np.ndarray:
    Z = norm.normalize_inputs(Q)
    return np.column_stack([Z, norm.time_feature(t)])


class StrengthGP(BaseEstimator, RegressorMixin):
    """GP regressor for compressive strength in MPa.

    Expects ``X`` with one column per ingredient (kg/m^3, in the declared
    order) and the curing age in days as the last column; ``y`` is strength
    in MPa. Fitting adds the zero-day anchors internally.

    Parameters
    ----------
    ingredients : explicit ingredient column order; defaults to the campaign
        constraints' order, or the canonical seven.
    tau : log-time offset in days, ln(t + tau).
    kernel : "composite" for the additive time+joint kernel, "matern_joint"
        for the single-kernel ablation.
    log_time, augment_zero : ablation switches.
    extra_zero_compositions : random zero-day anchors; None means
        max(5, n_distinct_mixtures // 4).
    zero_noise_mpa : fixed noise sd attached to the zero-day anchors.
    constraints : feasible region used for anchor sampling and input scaling.
    fit_config : gp.FitConfig; its seed is overridden by ``seed``.
    hyperparameter_subsample : when set and the training set is larger, the
        marginal-likelihood optimization runs on a seeded row subsample of
        this size; the posterior still conditions on every row.
    """

    def __init__(
        self,
        ingredients=None,
        tau=DEFAULT_TAU_DAYS,
        kernel="composite",
        log_time=True,
        augment_zero=True,
        extra_zero_compositions=None,
        zero_noise_mpa=0.5,
        constraints=None,
        fit_config=None,
        hyperparameter_subsample=None,
        seed=0,
    ):
        self.ingredients = ingredients
        self.tau = tau
        self.kernel = kernel
        self.log_time = log_time
        self.augment_zero = augment_zero
        self.extra_zero_compositions = extra_zero_compositions
        self.zero_noise_mpa = zero_noise_mpa
        self.constraints = constraints
        self.fit_config = fit_config
        self.hyperparameter_subsample = hyperparameter_subsample
        self.seed = seed

    # -- fitting -----------------------------------------------------------

    def _resolved_ingredients(self) -> tuple[str, ...]:
        if self.ingredients is not None:
            return tuple(self.ingredients)
        if self.constraints is not None:
            return self.constraints.ingredients
        return DEFAULT_INGREDIENTS

    def _augment(self, Q, t, y, rng_seed):
        """Zero-day anchor rows for every distinct composition plus extras."""
        keys = [tuple(np.round(row, 9)) for row in Q]
        anchored = {k for k, age in zip(keys, t) if age == 0.0}
        uniq_rows, uniq_keys = [], set()
        for k, row in zip(keys, Q):
            if k not in uniq_keys:
                uniq_keys.add(k)
                uniq_rows.append(row)
        anchors = [row for row in uniq_rows if tuple(np.round(row, 9)) not in anchored]
        n_extra = self.extra_zero_compositions
        if n_extra is None:
            n_extra = max(5, len(uniq_rows) // 4)
        if n_extra > 0:
            if self.constraints is not None:
                extra = sample_feasible(self.constraints, n_extra, rng_seed)
            else:
                lo, hi = Q.min(axis=0), Q.max(axis=0)
                extra = np.random.default_rng(rng_seed).uniform(lo, hi, size=(n_extra, Q.shape[1]))
            anchors = anchors + list(extra)
        if not anchors:
            return Q, t, y
        A = np.vstack(anchors)
        Q2 = np.vstack([Q, A])
        t2 = np.concatenate([t, np.zeros(len(A))])
        y2 = np.concatenate([y, np.zeros(len(A))])
        return Q2, t2, y2

    def fit(self, X, y):
        X = check_array(X, dtype=float)
        y = np.asarray(y, dtype=float).ravel()
        if X.shape[0] != y.size:
            raise InputShapeError("X and y disagree on the number of rows")
        ingredients = self._resolved_ingredients()
        if X.shape[1] != len(ingredients) + 1:
            raise InputShapeError(
                f"expected {len(ingredients)} ingredient columns plus age, got {X.shape[1]}"
            )
        Q, t = X[:, :-1], X[:, -1]
        measured = t > 0
        if measured.sum() < 2 or len(np.unique(t[measured])) < 2:
            raise InsufficientDataError(
                "need at least 2 measured observations spanning 2 distinct ages"
            )
        if np.any(t < 0):
            raise ValidationError("ages must be >= 0")

        if self.augment_zero:
            Q, t, y = self._augment(Q, t, y, self.seed)
        is_anchor = t == 0.0  # every zero-age row is a soft anchor, never a measurement

        if self.constraints is not None:
            ing_lo, ing_hi = self.constraints.bounds_arrays()
        else:
            ing_lo, ing_hi = Q.min(axis=0), Q.max(axis=0)
        y_meas = y[t > 0]
        sd = float(np.std(y_meas))
        norm = Normalization(
            ingredients,
            ing_lo,
            ing_hi,
            float(np.mean(y_meas)),
            sd if sd > 1e-8 else 1.0,
            tau=self.tau,
            log_time=self.log_time,
            time_scale=float(t.max()) if t.max() > 0 else 1.0,
        )
        F = _featurize_rows(Q, t, norm)
        y_std = norm.standardize_targets(y)

        fixed = np.full(len(y_std), np.nan)
        anchor_var = (self.zero_noise_mpa / norm.target_sd) ** 2
        fixed[is_anchor] = anchor_var
        data = gp.TrainingData(F, y_std, fixed if is_anchor.any() else None)

        d_feat = F.shape[1]
        if self.kernel == "composite":
            template = gp.composite_time_joint(
                gp.rbf(1.0, (1.0,)), gp.matern52(1.0, tuple(np.ones(d_feat)))
            )
        elif self.kernel == "matern_joint":
            template = gp.matern52(1.0, tuple(np.ones(d_feat)))
        else:
            raise ValidationError(f"unknown kernel option {self.kernel!r}")
        config = self.fit_config or gp.FitConfig()
        config = replace(config, seed=self.seed)
        fit_data = data
        cap = self.hyperparameter_subsample
        if cap is not None and data.n > cap:
            pick = np.sort(np.random.default_rng(self.seed).permutation(data.n)[:cap])
            sub_fixed = None if data.fixed_noise is None else data.fixed_noise[pick]
            fit_data = gp.TrainingData(F[pick], y_std[pick], sub_fixed)
        params = gp.fit_hyperparameters(gp.GPParams(template, 0.05), fit_data, config)

        self.ingredients_ = ingredients
        self.normalization_ = norm
        self.params_ = params
        self.training_ = data
        self.n_features_in_ = len(ingredients) + 1
        log.info(
            "strength model fitted: n=%d (%d anchors), noise sd %.3f MPa",
            data.n, int(is_anchor.sum()), np.sqrt(params.noise_variance) * norm.target_sd,
        )
        return self

    # -- prediction --------------------------------------------------------

    def _features(self, X) -> np.ndarray:
        X = check_array(X, dtype=float)
        if X.shape[1] != self.n_features_in_:
            raise InputShapeError(f"expected {self.n_features_in_} columns, got {X.shape[1]}")
        return _featurize_rows(X[:, :-1], X[:, -1], self.normalization_)

    def predict(self, X, return_std: bool = False):
        """Posterior mean (and sd) of strength in MPa."""
        check_is_fitted(self, "params_")
        F = self._features(X)
        mu, var = gp.posterior_diag(self.params_, self.training_, F)
        mean = self.normalization_.destandardize_mean(mu)
        if not return_std:
            return mean
        return mean, np.sqrt(var) * self.normalization_.target_sd

    def predict_joint(self, X) -> gp.PosteriorGaussian:
        """Full joint posterior over the rows of X, in MPa units."""
        check_is_fitted(self, "params_")
        F = self._features(X)
        post = gp.posterior(self.params_, self.training_, F)
        return gp.PosteriorGaussian(
            self.normalization_.destandardize_mean(post.mean),
            post.covariance * self.normalization_.target_sd**2,
        )

    def predict_curve(self, mixture: Mixture, ages) -> gp.PosteriorGaussian:
        ages = np.atleast_1d(np.asarray(ages, dtype=float))
        q = mixture.as_vector(self.ingredients_)
        X = np.column_stack([np.tile(q, (len(ages), 1)), ages])
        return self.predict_joint(X)

    def noise_sd_mpa(self) -> float:
        check_is_fitted(self, "params_")
        return float(np.sqrt(self.params_.noise_variance) * self.normalization_.target_sd)

    # -- serialization -----------------------------------------------------

    def to_dict(self, training_digest: str | None = None) -> dict:
        check_is_fitted(self, "params_")
        fixed = self.training_.fixed_noise
        return {
            "format_version": 1,
            "estimator": {k: v for k, v in self.get_params().items()
                          if k in ("tau", "kernel", "log_time", "augment_zero",
                                   "zero_noise_mpa", "seed")},
            "params": self.params_.to_dict(),
            "normalization": self.normalization_.to_dict(),
            "training": {
                "inputs": self.training_.inputs.tolist(),
                "targets": self.training_.targets.tolist(),
                "fixed_noise": None if fixed is None else
                    [None if np.isnan(v) else v for v in fixed],
            },
            "training_digest": training_digest,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "StrengthGP":
        if d.get("format_version") != 1:
            raise ValidationError(f"unsupported model format {d.get('format_version')!r}")
        est = cls(**d.get("estimator", {}))
        norm = Normalization.from_dict(d["normalization"])
        fixed = d["training"]["fixed_noise"]
        data = gp.TrainingData(
            np.array(d["training"]["inputs"]),
            np.array(d["training"]["targets"]),
            None if fixed is None else np.array([np.nan if v is None else v for v in fixed]),
        )
        est.ingredients_ = norm.ingredients
        est.normalization_ = norm
        est.params_ = gp.GPParams.from_dict(d["params"])
        est.training_ = data
        est.n_features_in_ = len(norm.ingredients) + 1
        return est


# ---------------------------------------------------------------------------
# observation-level API used by the campaign workflow
# ---------------------------------------------------------------------------


def observations_matrix(
    observations: list[StrengthObservation], ingredients: tuple[str, ...]
) -> tuple[np.ndarray, np.ndarray]:
    X = np.array(
        [np.append(o.mixture.as_vector(ingredients), o.age_days) for o in observations]
    )
    y = np.array([o.strength_mpa for o in observations])
    return X, y


def observations_digest(observations: list[StrengthObservation]) -> str:
    payload = json.dumps([o.to_dict() for o in observations], sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()


def fit_strength_model(
    observations: list[StrengthObservation],
    constraints: Constraints | None = None,
    **estimator_kwargs,
) -> StrengthGP:
    """Fit the strength model from observation records (measured rows only;
    zero-day augmentation is re-applied deterministically inside)."""
    measured = [o for o in observations if o.provenance == MEASURED]
    if len(measured) < 2 or len({o.age_days for o in measured}) < 2:
        raise InsufficientDataError(
            "need at least 2 measured observations spanning 2 distinct ages"
        )
    est = StrengthGP(constraints=constraints, **estimator_kwargs)
    ing = est._resolved_ingredients()
    X, y = observations_matrix(measured, ing)
    return est.fit(X, y)


def predict_strength(model: StrengthGP, mixture: Mixture, ages) -> list[tuple[float, float]]:
    """Per-age (mean MPa, sd MPa) for one mixture."""
    post = model.predict_curve(mixture, ages)
    return list(zip(post.mean.tolist(), post.sd().tolist()))


@dataclass(frozen=True)
class CVRecord:
    mixture: Mixture
    age_days: float
    predicted_mean: float
    predicted_sd: float
    actual: float
    fold: int


@dataclass(frozen=True)
class CVResult:
    records: tuple[CVRecord, ...]
    rmse: float
    coverage95: float
    folds: int

    def to_dict(self) -> dict:
        return {
            "rmse": self.rmse,
            "coverage95": self.coverage95,
            "folds": self.folds,
            "records": [
                {
                    "mixture": r.mixture.to_dict(),
                    "age_days": r.age_days,
                    "predicted_mean": r.predicted_mean,
                    "predicted_sd": r.predicted_sd,
                    "actual": r.actual,
                    "fold": r.fold,
                }
                for r in self.records
            ],
        }


def cross_validate(
    observations: list[StrengthObservation],
    folds: int,
    seed: int = 0,
    constraints: Constraints | None = None,
    **estimator_kwargs,
) -> CVResult:
    """Grouped k-fold cross-validation: a mixture's ages never straddle the
    train/test split. Reports RMSE and central-95% interval coverage."""
    measured = [o for o in observations if o.provenance == MEASURED]
    groups: dict[tuple, list[StrengthObservation]] = {}
    for o in measured:
        groups.setdefault(o.mixture.key(), []).append(o)
    keys = list(groups)
    if folds < 2 or folds > len(keys):
        raise InsufficientDataError(
            f"folds must be in [2, n_mixtures={len(keys)}], got {folds}"
        )
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(keys))
    fold_of = {keys[k]: i % folds for i, k in enumerate(order)}

    records: list[CVRecord] = []
    for fold in range(folds):
        train = [o for k, obs in groups.items() if fold_of[k] != fold for o in obs]
        test = [o for k, obs in groups.items() if fold_of[k] == fold for o in obs]
        model = fit_strength_model(train, constraints=constraints, seed=seed, **estimator_kwargs)
        X, y = observations_matrix(test, model.ingredients_)
        mean, sd = model.predict(X, return_std=True)
        # calibration is judged against measured values, so the interval is
        # posterior predictive: latent sd plus the learned observation noise
        sd = np.sqrt(sd**2 + model.noise_sd_mpa() ** 2)
        for o, m, s in zip(test, mean, sd):
            records.append(CVRecord(o.mixture, o.age_days, float(m), float(s), o.strength_mpa, fold))

    err = np.array([r.predicted_mean - r.actual for r in records])
    sds = np.array([r.predicted_sd for r in records])
    inside = np.abs(err) <= 1.959963984540054 * sds
    return CVResult(tuple(records), float(np.sqrt(np.mean(err**2))), float(np.mean(inside)), folds)
