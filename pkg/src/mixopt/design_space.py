"""Concrete mixture representation and the constrained composition space.

Quantities are kilograms per cubic meter of concrete. The feasible region is
a box per ingredient intersected with linear constraints (water/binder window,
total binder window, ...) and hard exclusions that pin an ingredient to zero.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Mapping

import numpy as np
from scipy.optimize import linprog

from mixopt.exceptions import ConfigError, ConstraintError, ValidationError

log = logging.getLogger("mixopt.design_space")

DEFAULT_INGREDIENTS = (
    "cement",
    "fly_ash",
    "slag",
    "water",
    "fine_aggregate",
    "coarse_aggregate",
    "superplasticizer",
)
BINDER_INGREDIENTS = ("cement", "fly_ash", "slag")


@dataclass(frozen=True)
class Mixture:
    """A concrete composition: ingredient -> kg per cubic meter."""

    quantities: Mapping[str, float]

    def __post_init__(self):
        q = {str(k): float(v) for k, v in self.quantities.items()}
        for name, value in q.items():
            if not np.isfinite(value) or value < 0:
                raise ValidationError(f"quantity for {name!r} must be finite and >= 0, got {value}")
        binder = sum(q.get(b, 0.0) for b in BINDER_INGREDIENTS)
        if binder <= 0:
            raise ValidationError("binder mass (cement + fly_ash + slag) must be > 0")
        water = q.get("water", 0.0)
        if water <= 0:
            raise ValidationError("water/binder ratio must be finite and > 0")
        object.__setattr__(self, "quantities", MappingProxyType(q))

    def get(self, ingredient: str) -> float:
        return self.quantities.get(ingredient, 0.0)

    @property
    def binder(self) -> float:
        return sum(self.get(b) for b in BINDER_INGREDIENTS)

    @property
    def water_binder_ratio(self) -> float:
        return self.get("water") / self.binder

    def as_vector(self, ingredients: Iterable[str]) -> np.ndarray:
        return np.array([self.get(i) for i in ingredients], dtype=float)

    def key(self, ndigits: int = 6) -> tuple:
        """Hashable identity for dedup/novelty checks, robust to float noise."""
        return tuple(sorted((k, round(v, ndigits)) for k, v in self.quantities.items()))

    def to_dict(self) -> dict:
        return dict(self.quantities)

    @classmethod
    def from_vector(cls, vec, ingredients: Iterable[str]) -> "Mixture":
        return cls({name: float(v) for name, v in zip(ingredients, vec)})


@dataclass(frozen=True)
class LinearConstraint:
    """lo <= sum_i coefficients[i] * x_i <= hi (either bound may be None)."""

    name: str
    coefficients: Mapping[str, float]
    lo: float | None = None
    hi: float | None = None

    def __post_init__(self):
        coefs = {str(k): float(v) for k, v in self.coefficients.items()}
        if not coefs:
            raise ValidationError(f"linear constraint {self.name!r} has no coefficients")
        if self.lo is None and self.hi is None:
            raise ValidationError(f"linear constraint {self.name!r} has no bounds")
        if self.lo is not None and self.hi is not None and self.lo > self.hi:
            raise ValidationError(f"linear constraint {self.name!r} has lo > hi")
        object.__setattr__(self, "coefficients", MappingProxyType(coefs))

    def value(self, x: np.ndarray, ingredients: tuple[str, ...]) -> float:
        idx = {name: i for i, name in enumerate(ingredients)}
        return float(sum(c * x[idx[k]] for k, c in self.coefficients.items() if k in idx))

    def to_dict(self) -> dict:
        return {"name": self.name, "coefficients": dict(self.coefficients), "lo": self.lo, "hi": self.hi}


def wb_window_constraints(lo: float, hi: float) -> list[LinearConstraint]:
    """Water/binder ratio window as two linear constraints."""
    binder = {b: 1.0 for b in BINDER_INGREDIENTS}
    return [
        LinearConstraint("wb_ratio_min", {"water": 1.0, **{k: -lo for k in binder}}, lo=0.0),
        LinearConstraint("wb_ratio_max", {"water": 1.0, **{k: -hi for k in binder}}, hi=0.0),
    ]


def binder_window_constraint(lo: float, hi: float) -> LinearConstraint:
    return LinearConstraint("binder_total", {b: 1.0 for b in BINDER_INGREDIENTS}, lo=lo, hi=hi)


@dataclass(frozen=True)
class Constraints:
    """Feasible composition region: per-ingredient bounds, linear constraints,
    and exclusions (which collapse an ingredient's bound to [0, 0])."""

    bounds: Mapping[str, tuple[float, float]]
    linear: tuple[LinearConstraint, ...] = ()
    exclusions: frozenset[str] = frozenset()

    def __post_init__(self):
        bounds = {}
        for name, (lo, hi) in dict(self.bounds).items():
            lo, hi = float(lo), float(hi)
            if not (np.isfinite(lo) and np.isfinite(hi)) or lo > hi or lo < 0:
                raise ValidationError(f"invalid bound for {name!r}: [{lo}, {hi}]")
            bounds[str(name)] = (lo, hi)
        exclusions = frozenset(str(e) for e in self.exclusions)
        for name in exclusions:
            bounds[name] = (0.0, 0.0)
        object.__setattr__(self, "bounds", MappingProxyType(bounds))
        object.__setattr__(self, "exclusions", exclusions)
        object.__setattr__(self, "linear", tuple(self.linear))

    @property
    def ingredients(self) -> tuple[str, ...]:
        """Canonical ingredient order: defaults first, extras alphabetically."""
        names = set(self.bounds)
        ordered = [i for i in DEFAULT_INGREDIENTS if i in names]
        ordered += sorted(names - set(DEFAULT_INGREDIENTS))
        return tuple(ordered)

    def bounds_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        ing = self.ingredients
        lo = np.array([self.bounds[i][0] for i in ing])
        hi = np.array([self.bounds[i][1] for i in ing])
        return lo, hi

    def violations(self, x: np.ndarray, tol: float = 1e-9) -> list[dict]:
        """Certificates for every constraint the point violates."""
        ing = self.ingredients
        out = []
        lo, hi = self.bounds_arrays()
        for i, name in enumerate(ing):
            if x[i] < lo[i] - tol or x[i] > hi[i] + tol:
                out.append({"constraint": f"bound:{name}", "value": float(x[i]),
                            "lo": float(lo[i]), "hi": float(hi[i])})
        for lc in self.linear:
            v = lc.value(x, ing)
            if (lc.lo is not None and v < lc.lo - tol) or (lc.hi is not None and v > lc.hi + tol):
                out.append({"constraint": lc.name, "value": v, "lo": lc.lo, "hi": lc.hi})
        return out

    def is_feasible(self, x, tol: float = 1e-9) -> bool:
        return not self.violations(np.asarray(x, dtype=float), tol)

    def _linear_rows(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Inequalities A x <= b with per-row norms, from the linear constraints."""
        ing = self.ingredients
        idx = {name: i for i, name in enumerate(ing)}
        rows, rhs = [], []
        for lc in self.linear:
            a = np.zeros(len(ing))
            for k, c in lc.coefficients.items():
                if k in idx:
                    a[idx[k]] = c
            if lc.hi is not None:
                rows.append(a)
                rhs.append(lc.hi)
            if lc.lo is not None:
                rows.append(-a)
                rhs.append(-lc.lo)
        if not rows:
            return np.zeros((0, len(ing))), np.zeros(0), np.zeros(0)
        A = np.vstack(rows)
        b = np.array(rhs)
        return A, b, np.linalg.norm(A, axis=1)

    def interior_point(self) -> np.ndarray:
        """Max-margin (Chebyshev-style) interior point; raises if infeasible."""
        ing = self.ingredients
        lo, hi = self.bounds_arrays()
        free = hi > lo
        d = len(ing)
        A, b, norms = self._linear_rows()
        # variables: x (free dims) then margin s, maximize s
        nf = int(free.sum())
        if nf == 0:
            x = lo.copy()
            if self.violations(x):
                raise ConstraintError("fully pinned constraint set is infeasible",
                                      certificate={"violations": self.violations(x)})
            return x
        A_ub, b_ub = [], []
        fixed = lo.copy()
        for r, (row, rb, nrm) in enumerate(zip(A, b, norms)):
            arow = np.append(row[free], nrm if nrm > 0 else 1.0)
            A_ub.append(arow)
            b_ub.append(rb - row[~free] @ fixed[~free])
        for j in range(nf):
            e = np.zeros(nf + 1)
            e[j], e[-1] = 1.0, 1.0
            A_ub.append(e.copy())
            b_ub.append(hi[free][j])
            e[j] = -1.0
            A_ub.append(e)
            b_ub.append(-lo[free][j])
        c = np.zeros(nf + 1)
        c[-1] = -1.0
        res = linprog(c, A_ub=np.array(A_ub), b_ub=np.array(b_ub),
                      bounds=[(None, None)] * nf + [(0, None)], method="highs")
        if not res.success:
            raise ConstraintError(
                "constraint set is infeasible", certificate=self._infeasibility_certificate()
            )
        x = fixed.copy()
        x[free] = res.x[:nf]
        viol = self.violations(x, tol=1e-7)
        if viol:
            raise ConstraintError("constraint set is infeasible", certificate={"violations": viol})
        return x

    def _infeasibility_certificate(self) -> dict:
        """Name a constraint whose removal restores feasibility, if any."""
        for lc in self.linear:
            relaxed = Constraints(
                dict(self.bounds),
                tuple(c for c in self.linear if c is not lc),
                self.exclusions,
            )
            try:
                relaxed.interior_point()
            except ConstraintError:
                continue
            return {"violated": lc.name, "lo": lc.lo, "hi": lc.hi}
        return {"violated": "bounds", "detail": "box and linear constraints jointly infeasible"}

    def check_nonempty(self):
        self.interior_point()

    def with_overrides(self, scenario: Mapping | None) -> "Constraints":
        """Apply a scenario: bound overrides, extra exclusions, window replacements."""
        if not scenario:
            return self
        bounds = dict(self.bounds)
        for name, pair in (scenario.get("bounds") or {}).items():
            bounds[str(name)] = (float(pair[0]), float(pair[1]))
        exclusions = set(self.exclusions) | {str(e) for e in scenario.get("exclude", [])}
        linear = list(self.linear)
        if "wb_window" in scenario and scenario["wb_window"] is not None:
            lo, hi = scenario["wb_window"]
            linear = [lc for lc in linear if not lc.name.startswith("wb_ratio")]
            linear += wb_window_constraints(float(lo), float(hi))
        if "binder_window" in scenario and scenario["binder_window"] is not None:
            lo, hi = scenario["binder_window"]
            linear = [lc for lc in linear if lc.name != "binder_total"]
            linear.append(binder_window_constraint(float(lo), float(hi)))
        for entry in scenario.get("linear", []):
            linear.append(LinearConstraint(entry["name"], entry["coefficients"],
                                           entry.get("lo"), entry.get("hi")))
        return Constraints(bounds, tuple(linear), frozenset(exclusions))

    def to_dict(self) -> dict:
        return {
            "bounds": {k: list(v) for k, v in self.bounds.items()},
            "linear": [lc.to_dict() for lc in self.linear],
            "exclude": sorted(self.exclusions),
        }

    @classmethod
    def from_dict(cls, cfg: Mapping) -> "Constraints":
        if "bounds" not in cfg or not cfg["bounds"]:
            raise ConfigError("constraints config requires per-ingredient bounds")
        linear = [
            LinearConstraint(e["name"], e["coefficients"], e.get("lo"), e.get("hi"))
            for e in cfg.get("linear", [])
        ]
        if cfg.get("wb_window"):
            lo, hi = cfg["wb_window"]
            linear += wb_window_constraints(float(lo), float(hi))
        if cfg.get("binder_window"):
            lo, hi = cfg["binder_window"]
            linear.append(binder_window_constraint(float(lo), float(hi)))
        return cls(
            {k: (float(v[0]), float(v[1])) for k, v in cfg["bounds"].items()},
            tuple(linear),
            frozenset(cfg.get("exclude", [])),
        )


# ---------------------------------------------------------------------------
# sampling the feasible region
# ---------------------------------------------------------------------------


def _equality_system(constraints: Constraints):
    """Rows a, values v with a.x = v for linear constraints whose window is
    (numerically) a single value."""
    ing = constraints.ingredients
    idx = {name: i for i, name in enumerate(ing)}
    rows, vals = [], []
    for lc in constraints.linear:
        if lc.lo is None or lc.hi is None:
            continue
        if lc.hi - lc.lo > 1e-12 * max(1.0, abs(lc.hi)):
            continue
        a = np.zeros(len(ing))
        for k, c in lc.coefficients.items():
            if k in idx:
                a[idx[k]] = c
        rows.append(a)
        vals.append(0.5 * (lc.lo + lc.hi))
    if not rows:
        return np.zeros((0, len(ing))), np.zeros(0)
    return np.vstack(rows), np.array(vals)


def _hit_and_run(constraints: Constraints, n: int, rng, burn: int = 200, thin: int = 5) -> np.ndarray:
    lo, hi = constraints.bounds_arrays()
    free = hi > lo
    A, b, _ = constraints._linear_rows()
    E, ev = _equality_system(constraints)

    def project_point(x):
        if E.shape[0] == 0:
            return x
        correction = np.linalg.lstsq(E, ev - E @ x, rcond=None)[0]
        return x + correction

    def project_direction(v):
        if E.shape[0] == 0:
            return v
        coef = np.linalg.lstsq(E.T, v, rcond=None)[0]
        return v - E.T @ coef

    x = project_point(constraints.interior_point())
    d = len(lo)
    out = np.empty((n, d))
    kept = 0
    steps = burn + n * thin
    eps = 1e-13
    for step in range(steps):
        direction = np.zeros(d)
        direction[free] = rng.standard_normal(int(free.sum()))
        direction = project_direction(direction)
        direction[~free] = 0.0
        nrm = np.linalg.norm(direction)
        if nrm < 1e-12:
            continue
        direction /= nrm
        t_lo, t_hi = -np.inf, np.inf
        for j in np.where(free)[0]:
            if direction[j] > eps:
                t_hi = min(t_hi, (hi[j] - x[j]) / direction[j])
                t_lo = max(t_lo, (lo[j] - x[j]) / direction[j])
            elif direction[j] < -eps:
                t_hi = min(t_hi, (lo[j] - x[j]) / direction[j])
                t_lo = max(t_lo, (hi[j] - x[j]) / direction[j])
        for row, rb in zip(A, b):
            ad = row @ direction
            slack = rb - row @ x
            if ad > eps:
                t_hi = min(t_hi, slack / ad)
            elif ad < -eps:
                t_lo = max(t_lo, slack / ad)
        if not np.isfinite(t_lo) or not np.isfinite(t_hi) or t_hi <= t_lo:
            continue
        x = project_point(x + rng.uniform(t_lo, t_hi) * direction)
        if step >= burn and (step - burn) % thin == 0 and kept < n:
            out[kept] = x
            kept += 1
    while kept < n:  # pad from extra chain steps if thinning undershot
        out[kept] = x
        kept += 1
    return out


def sample_feasible(
    constraints: Constraints,
    n: int,
    seed: int | np.random.Generator = 0,
    min_acceptance: float = 0.01,
) -> np.ndarray:
    """Draw n feasible composition vectors (canonical ingredient order).

    Rejection-samples the bounding box; falls back to hit-and-run when the
    linear constraints make box acceptance drop below ``min_acceptance``.
    Deterministic for a fixed seed.
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    lo, hi = constraints.bounds_arrays()
    if not constraints.linear:
        return rng.uniform(lo, hi, size=(n, len(lo)))
    A, b, _ = constraints._linear_rows()
    collected = []
    count = 0
    tries = 0
    probe = max(2000, 4 * n)
    while count < n:
        batch = rng.uniform(lo, hi, size=(probe, len(lo)))
        ok = np.all(batch @ A.T <= b + 1e-12, axis=1)
        accepted = batch[ok]
        collected.append(accepted)
        count += len(accepted)
        tries += probe
        if tries >= probe and count / tries < min_acceptance:
            log.info("box acceptance %.4f below %.2f%%; switching to hit-and-run",
                     count / tries, 100 * min_acceptance)
            return _hit_and_run(constraints, n, rng)
        if tries > 200 * probe:  # pathological but feasible region; be safe
            return _hit_and_run(constraints, n, rng)
    return np.vstack(collected)[:n]


def sample_mixtures(constraints: Constraints, n: int, seed=0) -> list[Mixture]:
    X = sample_feasible(constraints, n, seed)
    ing = constraints.ingredients
    return [Mixture.from_vector(x, ing) for x in X]
