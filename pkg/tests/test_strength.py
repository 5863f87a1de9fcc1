import numpy as np
import pytest

from mixopt import gp
from mixopt.datasets import synthetic_concrete_observations, true_strength_mpa
from mixopt.design_space import DEFAULT_INGREDIENTS, Mixture
from mixopt.exceptions import InsufficientDataError, ValidationError
from mixopt.strength import (
    AUGMENTED_ZERO,
    Normalization,
    StrengthGP,
    StrengthObservation,
    augment_zero_day,
    cross_validate,
    featurize,
    fit_strength_model,
    observations_matrix,
    predict_strength,
)

LIGHT_FIT = gp.FitConfig(restarts=2, max_iter=80)


def mix(cement=320.0, fly_ash=0.0, slag=0.0, water=160.0, fine=800.0, coarse=950.0, sp=2.0):
    return Mixture({
        "cement": cement, "fly_ash": fly_ash, "slag": slag, "water": water,
        "fine_aggregate": fine, "coarse_aggregate": coarse, "superplasticizer": sp,
    })


# -- observations ------------------------------------------------------------


def test_observation_invariants():
    with pytest.raises(ValidationError):
        StrengthObservation(mix(), 0.0, 10.0)  # measured must have age > 0
    with pytest.raises(ValidationError):
        StrengthObservation(mix(), 3.0, 0.0, provenance=AUGMENTED_ZERO)
    ob = StrengthObservation(mix(), 0.0, 0.0, provenance=AUGMENTED_ZERO)
    assert ob.age_days == 0.0


def test_augment_adds_one_zero_record_per_mixture():
    obs = [StrengthObservation(mix(), 3.0, 30.0)]
    out = augment_zero_day(obs, extra_compositions=0)
    assert len(out) == 2
    added = out[-1]
    assert added.provenance == AUGMENTED_ZERO
    assert added.age_days == 0.0 and added.strength_mpa == 0.0
    assert added.mixture.key() == obs[0].mixture.key()


def test_augment_is_idempotent():
    obs = [StrengthObservation(mix(), 3.0, 30.0)]
    once = augment_zero_day(obs, 0)
    twice = augment_zero_day(once, 0)
    assert len(twice) == len(once) == 2


def test_augment_extra_compositions_deterministic():
    obs = [
        StrengthObservation(mix(), 3.0, 30.0),
        StrengthObservation(mix(cement=400.0), 7.0, 45.0),
    ]
    out1 = augment_zero_day(obs, extra_compositions=5, seed=11)
    out2 = augment_zero_day(obs, extra_compositions=5, seed=11)
    assert len(out1) == len(obs) + 2 + 5
    assert [o.to_dict() for o in out1] == [o.to_dict() for o in out2]


# -- featurization -----------------------------------------------------------


def _norm(tau=1.0 / 24.0):
    return Normalization(
        DEFAULT_INGREDIENTS,
        np.zeros(7),
        np.array([500.0, 200.0, 250.0, 250.0, 1000.0, 1200.0, 10.0]),
        target_mean=30.0,
        target_sd=10.0,
        tau=tau,
    )


def test_featurize_zero_age_uses_tau():
    f = featurize(mix(), 0.0, _norm())
    assert f[-1] == pytest.approx(np.log(1.0 / 24.0), abs=1e-12)
    assert f[-1] == pytest.approx(-3.17805383, abs=1e-6)


def test_featurize_age_e_minus_tau():
    f = featurize(mix(), np.e - 1.0 / 24.0, _norm())
    assert f[-1] == pytest.approx(1.0, abs=1e-12)


def test_featurize_locality_in_cement():
    a = featurize(mix(cement=300.0), 7.0, _norm())
    b = featurize(mix(cement=350.0), 7.0, _norm())
    diff = np.nonzero(np.abs(a - b) > 0)[0]
    assert diff.tolist() == [DEFAULT_INGREDIENTS.index("cement")]


def test_featurize_rejects_negative_age():
    with pytest.raises(ValidationError):
        featurize(mix(), -1.0, _norm())


def test_normalization_round_trip(rng):
    norm = _norm()
    Q = rng.uniform(1.0, 200.0, size=(10, 7))
    back = norm.denormalize_inputs(norm.normalize_inputs(Q))
    assert np.max(np.abs(back - Q)) < 1e-12


# -- fitting and prediction --------------------------------------------------


@pytest.fixture(scope="module")
def fitted_model():
    obs = synthetic_concrete_observations(n_mixtures=10, seed=3)
    return fit_strength_model(obs, fit_config=LIGHT_FIT, seed=0), obs


def test_fit_requires_two_ages():
    obs = [
        StrengthObservation(mix(), 3.0, 30.0),
        StrengthObservation(mix(cement=400.0), 3.0, 40.0),
    ]
    with pytest.raises(InsufficientDataError):
        fit_strength_model(obs, fit_config=LIGHT_FIT)


def test_single_mixture_curve_interpolates():
    m = mix()
    obs = [StrengthObservation(m, a, true_strength_mpa(m, a)) for a in (1.0, 3.0, 7.0, 28.0)]
    model = fit_strength_model(obs, fit_config=LIGHT_FIT, seed=1)
    noise_sd = model.noise_sd_mpa()
    for o in obs:
        (mean, _sd), = predict_strength(model, o.mixture, [o.age_days])
        assert abs(mean - o.strength_mpa) <= max(2 * noise_sd, 0.5)


def test_zero_age_prediction_near_zero(fitted_model):
    model, obs = fitted_model
    for o in obs[:5]:
        (mean, sd), = predict_strength(model, o.mixture, [0.0])
        assert abs(mean) <= 2.0
        assert abs(mean) <= 2 * sd + 1e-9


def test_training_point_reproduced_when_near_noiseless():
    m = mix()
    obs = [StrengthObservation(m, a, true_strength_mpa(m, a)) for a in (1.0, 3.0, 7.0, 28.0)]
    model = fit_strength_model(
        obs, fit_config=LIGHT_FIT, seed=2, zero_noise_mpa=0.1, extra_zero_compositions=0
    )
    (mean, _), = predict_strength(model, m, [7.0])
    tol = max(1e-2, 2 * model.noise_sd_mpa())
    assert abs(mean - true_strength_mpa(m, 7.0)) < tol


def test_means_nondecreasing_on_cement_mixture(fitted_model):
    model, _ = fitted_model
    m = mix(cement=380.0, water=150.0)
    means = [mu for mu, _ in predict_strength(model, m, [1.0, 3.0, 7.0, 28.0])]
    assert all(b >= a - 1e-6 for a, b in zip(means, means[1:]))


def test_duplicated_dataset_leaves_predictions_unchanged():
    obs = synthetic_concrete_observations(n_mixtures=6, seed=5, noise=False)
    model1 = fit_strength_model(obs, fit_config=LIGHT_FIT, seed=4)
    model2 = fit_strength_model(obs + obs, fit_config=LIGHT_FIT, seed=4)
    X, _ = observations_matrix(obs, model1.ingredients_)
    p1 = model1.predict(X)
    p2 = model2.predict(X)
    assert np.max(np.abs(p1 - p2)) < 1e-3


def test_dataset_scale_fit_in_sample_beats_held_out():
    # grouped 80/20 split of the concrete-table-scale data: training error
    # must not exceed error on unseen mixtures
    from mixopt.datasets import concrete_dataset_or_standin

    X, y, _label = concrete_dataset_or_standin()
    y = np.maximum(y, 0.0)
    keys = [tuple(np.round(row[:7], 6)) for row in X]
    uniq = sorted(set(keys))
    rng = np.random.default_rng(0)
    held = set(tuple(uniq[i]) for i in rng.permutation(len(uniq))[: len(uniq) // 5])
    test_mask = np.array([k in held for k in keys])
    est = StrengthGP(fit_config=LIGHT_FIT, hyperparameter_subsample=384, seed=0)
    est.fit(X[~test_mask], y[~test_mask])
    rmse_in = np.sqrt(np.mean((est.predict(X[~test_mask]) - y[~test_mask]) ** 2))
    rmse_out = np.sqrt(np.mean((est.predict(X[test_mask]) - y[test_mask]) ** 2))
    assert rmse_in < rmse_out


def test_sd_positive_and_smaller_at_training_points(fitted_model):
    model, obs = fitted_model
    m = obs[0].mixture
    far = mix(cement=499.0, fly_ash=199.0, slag=1.0, water=249.0, fine=999.0, coarse=1199.0, sp=9.9)
    _, sd_train = model.predict(
        np.array([np.append(m.as_vector(model.ingredients_), 28.0)]), return_std=True
    )
    _, sd_far = model.predict(
        np.array([np.append(far.as_vector(model.ingredients_), 28.0)]), return_std=True
    )
    assert sd_train[0] > 0
    assert sd_train[0] <= sd_far[0]


def test_time_kernel_alone_is_composition_independent(fitted_model):
    model, obs = fitted_model
    # squash the joint kernel's weight: predictions become composition-blind
    d = model.to_dict()
    d["params"]["kernel"]["children"][1]["output_scale"] = 1e-15
    squashed = StrengthGP.from_dict(d)
    ages = [3.0]
    a = predict_strength(squashed, obs[0].mixture, ages)[0][0]
    b = predict_strength(squashed, obs[4].mixture, ages)[0][0]
    c = predict_strength(squashed, mix(cement=450.0, water=140.0), ages)[0][0]
    assert abs(a - b) < 1e-10 and abs(a - c) < 1e-10


def test_predictions_invariant_under_ingredient_permutation(fitted_model):
    model, obs = fitted_model
    d = model.to_dict()
    perm = [3, 0, 5, 1, 6, 2, 4]  # reorder ingredient axes everywhere consistently
    ing = list(model.ingredients_)
    d["normalization"]["ingredients"] = [ing[i] for i in perm]
    d["normalization"]["input_lo"] = [d["normalization"]["input_lo"][i] for i in perm]
    d["normalization"]["input_hi"] = [d["normalization"]["input_hi"][i] for i in perm]
    joint = d["params"]["kernel"]["children"][1]
    ls = joint["lengthscales"]
    joint["lengthscales"] = [ls[i] for i in perm] + [ls[-1]]
    inputs = np.array(d["training"]["inputs"])
    inputs[:, :7] = inputs[:, perm]
    d["training"]["inputs"] = inputs.tolist()
    permuted = StrengthGP.from_dict(d)

    m = obs[0].mixture
    orig = predict_strength(model, m, [1.0, 28.0])
    new = predict_strength(permuted, m, [1.0, 28.0])
    for (m1, s1), (m2, s2) in zip(orig, new):
        assert m1 == pytest.approx(m2, abs=1e-8)
        assert s1 == pytest.approx(s2, abs=1e-8)


def test_serialization_round_trip(fitted_model):
    model, obs = fitted_model
    again = StrengthGP.from_dict(model.to_dict())
    X, _ = observations_matrix(obs[:6], model.ingredients_)
    assert np.allclose(model.predict(X), again.predict(X), atol=1e-12)


def test_estimator_get_params_clone():
    from sklearn.base import clone

    est = StrengthGP(tau=0.1, seed=7)
    cloned = clone(est)
    assert cloned.get_params()["tau"] == 0.1
    assert cloned.get_params()["seed"] == 7


# -- cross-validation --------------------------------------------------------


def test_leave_one_mixture_out_folds():
    obs = synthetic_concrete_observations(n_mixtures=5, seed=9)
    result = cross_validate(obs, folds=5, seed=0, fit_config=LIGHT_FIT)
    assert result.folds == 5
    by_fold = {}
    for r in result.records:
        by_fold.setdefault(r.fold, set()).add(r.mixture.key())
    assert len(by_fold) == 5
    assert all(len(keys) == 1 for keys in by_fold.values())


def test_cv_never_splits_a_mixture():
    obs = synthetic_concrete_observations(n_mixtures=8, seed=2)
    result = cross_validate(obs, folds=3, seed=1, fit_config=LIGHT_FIT)
    fold_of = {}
    for r in result.records:
        fold_of.setdefault(r.mixture.key(), set()).add(r.fold)
    assert all(len(f) == 1 for f in fold_of.values())
    assert 0.0 <= result.coverage95 <= 1.0
    assert result.rmse > 0


def test_cv_rejects_too_many_folds():
    obs = synthetic_concrete_observations(n_mixtures=3, seed=1)
    with pytest.raises(InsufficientDataError):
        cross_validate(obs, folds=10, fit_config=LIGHT_FIT)
