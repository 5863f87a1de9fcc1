"""The three-objective vector: 1-day strength, 28-day strength, negated GWP.

Strength entries come from the model posterior at the configured ages; the
global-warming potential is a deterministic linear function of the ingredient
masses, so its objective coordinate carries zero variance.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Mapping

import numpy as np

from mixopt import gp
from mixopt.design_space import Mixture
from mixopt.exceptions import ConfigError, ValidationError
from mixopt.gp import linalg
from mixopt.strength import StrengthGP

N_OBJECTIVES = 3


@dataclass(frozen=True)
class GwpTable:
    """kg CO2-equivalent per kg of each ingredient."""

    coefficients: Mapping[str, float]
    name: str = "unnamed"
    version: str = ""

    def __post_init__(self):
        coefs = {str(k): float(v) for k, v in self.coefficients.items()}
        for k, v in coefs.items():
            if not np.isfinite(v) or v < 0:
                raise ValidationError(f"GWP coefficient for {k!r} must be finite and >= 0")
        object.__setattr__(self, "coefficients", MappingProxyType(coefs))

    def scaled(self, factor: float) -> "GwpTable":
        return GwpTable({k: v * factor for k, v in self.coefficients.items()},
                        name=f"{self.name} x{factor:g}", version=self.version)

    def to_dict(self) -> dict:
        return {"name": self.name, "version": self.version,
                "coefficients": dict(self.coefficients)}

    @classmethod
    def from_dict(cls, d: dict) -> "GwpTable":
        return cls(d["coefficients"], d.get("name", "unnamed"), d.get("version", ""))

    @classmethod
    def from_file(cls, path) -> "GwpTable":
        """Load from JSON ({name, version, coefficients}) or CSV
        (ingredient, kgCO2e_per_kg[, source])."""
        path = Path(path)
        if path.suffix.lower() == ".json":
            return cls.from_dict(json.loads(path.read_text()))
        coefs = {}
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or "ingredient" not in reader.fieldnames \
                    or "kgCO2e_per_kg" not in reader.fieldnames:
                raise ConfigError(
                    "GWP CSV needs columns: ingredient, kgCO2e_per_kg[, source]"
                )
            for row in reader:
                coefs[row["ingredient"].strip()] = float(row["kgCO2e_per_kg"])
        return cls(coefs, name=path.stem)


def gwp(table: GwpTable, mixture) -> float:
    """Deterministic GWP in kg CO2e per cubic meter: the coefficient dot
    product. Accepts a Mixture or a plain quantity mapping."""
    quantities = mixture.quantities if isinstance(mixture, Mixture) else mixture
    total = 0.0
    for ingredient, quantity in quantities.items():
        if quantity == 0.0:
            continue
        if ingredient not in table.coefficients:
            raise ConfigError(f"GWP table {table.name!r} has no coefficient for {ingredient!r}")
        total += table.coefficients[ingredient] * quantity
    return total


@dataclass(frozen=True)
class ObjectiveSpec:
    """Fixed objective list [strength@age_early, strength@age_late, -GWP],
    maximize-all, with the reference point as minimum acceptable values."""

    ages: tuple[float, float] = (1.0, 28.0)
    reference_point: tuple[float, float, float] = (0.0, 0.0, -600.0)

    def __post_init__(self):
        if len(self.ages) != 2 or not all(a > 0 for a in self.ages):
            raise ValidationError("objective spec needs two positive strength ages")
        r = np.asarray(self.reference_point, dtype=float)
        if r.shape != (3,) or not np.all(np.isfinite(r)):
            raise ValidationError("reference point must be a finite length-3 vector")
        object.__setattr__(self, "ages", tuple(float(a) for a in self.ages))
        object.__setattr__(self, "reference_point", tuple(float(v) for v in r))

    @property
    def labels(self) -> tuple[str, str, str]:
        return (
            f"strength_day_{self.ages[0]:g}_mpa",
            f"strength_day_{self.ages[1]:g}_mpa",
            "neg_gwp_kgco2e_m3",
        )

    def to_dict(self) -> dict:
        return {"ages": list(self.ages), "reference_point": list(self.reference_point)}

    @classmethod
    def from_dict(cls, d: dict) -> "ObjectiveSpec":
        return cls(tuple(d.get("ages", (1.0, 28.0))),
                   tuple(d.get("reference_point", (0.0, 0.0, -600.0))))


def objective_posterior(
    model: StrengthGP,
    table: GwpTable,
    mixtures: Iterable[Mixture],
    spec: ObjectiveSpec = ObjectiveSpec(),
) -> tuple[np.ndarray, np.ndarray]:
    """Per-mixture objective mean (n, 3) and covariance (n, 3, 3).

    The two strength coordinates share the model's joint posterior at the two
    ages; the negated-GWP coordinate is deterministic, so its row and column
    of each covariance block are exactly zero.
    """
    mixtures = list(mixtures)
    means = np.zeros((len(mixtures), N_OBJECTIVES))
    covs = np.zeros((len(mixtures), N_OBJECTIVES, N_OBJECTIVES))
    for i, mixture in enumerate(mixtures):
        post = model.predict_curve(mixture, spec.ages)
        means[i, :2] = post.mean
        means[i, 2] = -gwp(table, mixture)
        covs[i, :2, :2] = post.covariance
    return means, covs


class ObjectiveSampler:
    """Joint quasi-Monte-Carlo sampler of objective vectors at a fixed set of
    base mixtures plus a variable candidate batch.

    The strength values at (base + candidates) x (two ages) form one joint
    Gaussian; sampling extends the cached base Cholesky factor by block, so
    the base draws are bit-identical across candidate batches that share the
    same standard-normal input. The GWP coordinate is deterministic.
    """

    def __init__(
        self,
        model: StrengthGP,
        table: GwpTable,
        base_mixtures: list[Mixture],
        spec: ObjectiveSpec = ObjectiveSpec(),
    ):
        self.model = model
        self.table = table
        self.spec = spec
        self.base_mixtures = list(base_mixtures)
        self.n_base = len(self.base_mixtures)
        self._ages = np.asarray(spec.ages, dtype=float)
        if self.n_base:
            Xb = self._rows([m.as_vector(model.ingredients_) for m in self.base_mixtures])
            post = model.predict_joint(Xb)
            self._mu_base = post.mean
            self._cov_base = post.covariance
            self._L_base, _ = linalg.jittered_cholesky(self._cov_base)
            self._base_gwp = np.array([-gwp(table, m) for m in self.base_mixtures])
        else:
            self._mu_base = np.zeros(0)
            self._L_base = np.zeros((0, 0))
            self._base_gwp = np.zeros(0)

    def _rows(self, vectors) -> np.ndarray:
        per_age = []
        for v in vectors:
            for age in self._ages:
                per_age.append(np.append(v, age))
        return np.vstack(per_age)

    def sample_dim(self, q: int) -> int:
        """Standard-normal input dimension for a q-candidate batch."""
        return 2 * (self.n_base + q)

    def sample(self, candidates: np.ndarray, u: np.ndarray) -> np.ndarray:
        """Joint draws, shape (S, n_base + q, 3); candidates are composition
        vectors (q, n_ingredients) in the model's ingredient order. An empty
        candidate array yields base-only draws."""
        candidates = np.asarray(candidates, dtype=float)
        if candidates.ndim == 1:
            candidates = candidates[None, :]
        q = candidates.shape[0]
        nb2 = 2 * self.n_base
        u = np.asarray(u, dtype=float)
        if u.ndim != 2 or u.shape[1] != self.sample_dim(q):
            raise ValidationError(
                f"expected base samples of shape (S, {self.sample_dim(q)}), got {u.shape}"
            )
        u_base, u_cand = u[:, :nb2], u[:, nb2:]

        ing = self.model.ingredients_
        cand_mixtures = [Mixture.from_vector(c, ing) for c in candidates]
        cand_gwp = np.array([-gwp(self.table, m) for m in cand_mixtures])

        if q == 0:
            strength_cand = np.zeros((u.shape[0], 0))
            strength_base = self._mu_base + u_base @ self._L_base.T
        elif self.n_base:
            Xb = self._rows([m.as_vector(ing) for m in self.base_mixtures])
            Xc = self._rows(list(candidates))
            joint = self.model.predict_joint(np.vstack([Xb, Xc]))
            mu_c = joint.mean[nb2:]
            C_bc = joint.covariance[:nb2, nb2:]
            C_cc = joint.covariance[nb2:, nb2:]
            tmp = linalg.tri_solve(self._L_base, C_bc)  # (2n, 2q)
            S_cc = C_cc - tmp.T @ tmp
            L_cc, _ = linalg.jittered_cholesky(0.5 * (S_cc + S_cc.T))
            strength_base = self._mu_base + u_base @ self._L_base.T
            strength_cand = mu_c + u_base @ tmp + u_cand @ L_cc.T
        else:
            post = self.model.predict_joint(self._rows(list(candidates)))
            L, _ = linalg.jittered_cholesky(post.covariance)
            strength_base = np.zeros((u.shape[0], 0))
            strength_cand = post.mean + u_cand @ L.T

        S = u.shape[0]
        out = np.zeros((S, self.n_base + q, N_OBJECTIVES))
        out[:, : self.n_base, 0] = strength_base[:, 0::2]
        out[:, : self.n_base, 1] = strength_base[:, 1::2]
        out[:, : self.n_base, 2] = self._base_gwp
        out[:, self.n_base :, 0] = strength_cand[:, 0::2]
        out[:, self.n_base :, 1] = strength_cand[:, 1::2]
        out[:, self.n_base :, 2] = cand_gwp
        return out
