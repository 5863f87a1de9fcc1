import numpy as np
import pytest

from mixopt.design_space import (
    Constraints,
    LinearConstraint,
    Mixture,
    binder_window_constraint,
    sample_feasible,
    sample_mixtures,
    wb_window_constraints,
)
from mixopt.exceptions import ConstraintError, ValidationError


def make_constraints(**overrides):
    cfg = {
        "bounds": {
            "cement": [100, 500],
            "fly_ash": [0, 200],
            "slag": [0, 250],
            "water": [120, 220],
            "fine_aggregate": [600, 1000],
            "coarse_aggregate": [800, 1200],
            "superplasticizer": [0, 10],
        },
        "wb_window": [0.3, 0.6],
        "binder_window": [300, 550],
    }
    cfg.update(overrides)
    return Constraints.from_dict(cfg)


# -- Mixture -----------------------------------------------------------------


def test_mixture_validation():
    with pytest.raises(ValidationError):
        Mixture({"cement": -1.0, "water": 100.0})
    with pytest.raises(ValidationError):
        Mixture({"water": 100.0})  # no binder
    with pytest.raises(ValidationError):
        Mixture({"cement": 300.0})  # no water
    m = Mixture({"cement": 300.0, "water": 150.0})
    assert m.water_binder_ratio == pytest.approx(0.5)
    assert m.binder == pytest.approx(300.0)


def test_mixture_vector_round_trip():
    ing = ("cement", "water", "slag")
    m = Mixture({"cement": 280.0, "water": 140.0, "slag": 90.0})
    v = m.as_vector(ing)
    again = Mixture.from_vector(v, ing)
    assert again.key() == m.key()


# -- constraints -------------------------------------------------------------


def test_exclusion_collapses_bounds():
    c = make_constraints(exclude=["fly_ash"])
    assert c.bounds["fly_ash"] == (0.0, 0.0)
    X = sample_feasible(c, 50, seed=1)
    fly_idx = c.ingredients.index("fly_ash")
    assert np.all(X[:, fly_idx] == 0.0)


def test_violation_certificates():
    c = make_constraints()
    x = np.array([600.0, 0.0, 0.0, 150.0, 800.0, 900.0, 5.0])  # cement over bound
    viol = c.violations(x)
    assert any(v["constraint"] == "bound:cement" for v in viol)
    x2 = np.array([400.0, 0.0, 0.0, 130.0, 800.0, 900.0, 5.0])  # wb = 0.325 fine
    assert c.is_feasible(x2)


def test_wb_window_expressed_as_linear_constraints():
    c = make_constraints()
    names = [lc.name for lc in c.linear]
    assert "wb_ratio_min" in names and "wb_ratio_max" in names and "binder_total" in names


def test_infeasible_set_raises_with_certificate():
    c = make_constraints(binder_window=[900, 1000])  # cement+ash+slag can reach at most 950... make impossible
    c2 = make_constraints(binder_window=[1000, 1100])
    with pytest.raises(ConstraintError) as err:
        c2.check_nonempty()
    assert err.value.certificate


def test_with_overrides_excludes_and_windows():
    c = make_constraints()
    s = c.with_overrides({"exclude": ["slag"], "wb_window": [0.35, 0.35]})
    assert s.bounds["slag"] == (0.0, 0.0)
    X = sample_feasible(s, 20, seed=0)
    idx = {name: i for i, name in enumerate(s.ingredients)}
    binder = X[:, idx["cement"]] + X[:, idx["fly_ash"]] + X[:, idx["slag"]]
    wb = X[:, idx["water"]] / binder
    assert np.all(np.abs(wb - 0.35) < 1e-9)
    assert np.all(X[:, idx["slag"]] == 0.0)


def test_sampling_feasible_and_deterministic():
    c = make_constraints()
    X1 = sample_feasible(c, 200, seed=7)
    X2 = sample_feasible(c, 200, seed=7)
    assert np.array_equal(X1, X2)
    for x in X1[:50]:
        assert c.is_feasible(x)
    mixtures = sample_mixtures(c, 10, seed=3)
    assert all(0.3 - 1e-9 <= m.water_binder_ratio <= 0.6 + 1e-9 for m in mixtures)


def test_hit_and_run_kicks_in_for_thin_regions():
    c = make_constraints(wb_window=[0.4, 0.402])  # sliver: box acceptance far below 1%
    X = sample_feasible(c, 64, seed=5)
    assert X.shape == (64, 7)
    for x in X:
        assert c.is_feasible(x, tol=1e-7)


def test_constraints_round_trip():
    c = make_constraints(exclude=["fly_ash"])
    again = Constraints.from_dict(c.to_dict())
    assert again.bounds == c.bounds
    assert {lc.name for lc in again.linear} == {lc.name for lc in c.linear}
    assert again.exclusions == c.exclusions


def test_linear_constraint_validation():
    with pytest.raises(ValidationError):
        LinearConstraint("empty", {})
    with pytest.raises(ValidationError):
        LinearConstraint("nobounds", {"cement": 1.0})
    with pytest.raises(ValidationError):
        LinearConstraint("inverted", {"cement": 1.0}, lo=2.0, hi=1.0)
    assert len(wb_window_constraints(0.3, 0.6)) == 2
    assert binder_window_constraint(300, 500).lo == 300
