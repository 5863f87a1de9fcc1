"""Dataset access: the UCI concrete compressive strength table (when a local
copy is available) and a clearly-labeled synthetic stand-in generated from an
analytic strength surface.

The UCI table cannot be redistributed here; point ``MIXOPT_UCI_CONCRETE`` (or
the ``path`` argument) at a CSV export of it. Header names are matched
loosely, so the original long column titles work as-is. The synthetic
generator mimics the schema and scale of that table but is NOT real data;
anything computed from it is labeled accordingly.
"""

from __future__ import annotations

import csv
import os
from importlib import resources
from pathlib import Path

import numpy as np

from mixopt.design_space import DEFAULT_INGREDIENTS, Mixture
from mixopt.exceptions import DatasetUnavailableError, SchemaError
from mixopt.strength import StrengthObservation

_HEADER_KEYS = (
    ("fly", "fly_ash"),
    ("slag", "slag"),
    ("blast", "slag"),
    ("cement", "cement"),
    ("superplastic", "superplasticizer"),
    ("coarse", "coarse_aggregate"),
    ("fine", "fine_aggregate"),
    ("water", "water"),
    ("age", "age_days"),
    ("strength", "strength"),
)


def _match_header(name: str) -> str | None:
    low = name.strip().lower()
    for key, target in _HEADER_KEYS:
        if key in low:
            return target
    return None


def _read_concrete_csv(path: Path) -> tuple[np.ndarray, np.ndarray]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        mapping = {}
        for i, name in enumerate(header):
            target = _match_header(name)
            if target is not None and target not in mapping:
                mapping[target] = i
        required = set(DEFAULT_INGREDIENTS) | {"age_days", "strength"}
        missing = required - set(mapping)
        if missing:
            raise SchemaError(f"concrete CSV at {path} lacks columns for {sorted(missing)}")
        rows = []
        for row in reader:
            if not row or all(not c.strip() for c in row):
                continue
            rows.append([float(row[mapping[k]]) for k in (*DEFAULT_INGREDIENTS, "age_days", "strength")])
    data = np.array(rows)
    return data[:, :-1], data[:, -1]


def load_uci_concrete(path=None) -> tuple[np.ndarray, np.ndarray]:
    """UCI concrete strength data as (X, y): X columns are the seven canonical
    ingredients in kg/m^3 plus age in days; y is strength in MPa.

    Raises DatasetUnavailableError when no local copy can be found.
    """
    candidates = []
    if path is not None:
        candidates.append(Path(path))
    env = os.environ.get("MIXOPT_UCI_CONCRETE")
    if env:
        candidates.append(Path(env))
    packaged = resources.files("mixopt").joinpath("data/uci_concrete.csv")
    try:
        if packaged.is_file():
            candidates.append(Path(str(packaged)))
    except (OSError, TypeError):  # pragma: no cover - zip imports
        pass
    for cand in candidates:
        if cand.is_file():
            return _read_concrete_csv(cand)
    raise DatasetUnavailableError(
        "UCI concrete dataset not found. Download 'Concrete Compressive Strength' "
        "from the UCI repository, export it as CSV, and set MIXOPT_UCI_CONCRETE "
        "to its path (or pass path=...)."
    )


def uci_concrete_observations(path=None) -> list[StrengthObservation]:
    X, y = load_uci_concrete(path)
    out = []
    for row, strength in zip(X, y):
        out.append(
            StrengthObservation(
                Mixture.from_vector(row[:-1], DEFAULT_INGREDIENTS), float(row[-1]), float(strength)
            )
        )
    return out


# ---------------------------------------------------------------------------
# synthetic concrete surface (ground truth for simulations, UCI stand-in)
# ---------------------------------------------------------------------------


def true_strength_mpa(mixture, age_days: float) -> float:
    """Analytic strength surface used for simulation studies.

    Abrams-style dependence on the water-to-effective-binder ratio, slower
    early strength growth for slag/ash-heavy binders, zero at age zero,
    monotone in age. Synthetic: not calibrated to any measured dataset.
    """
    q = mixture.quantities if isinstance(mixture, Mixture) else mixture
    cement = q.get("cement", 0.0)
    slag = q.get("slag", 0.0)
    fly_ash = q.get("fly_ash", 0.0)
    water = q.get("water", 0.0)
    sp = q.get("superplasticizer", 0.0)
    agg = q.get("fine_aggregate", 0.0) + q.get("coarse_aggregate", 0.0)
    binder = cement + slag + fly_ash
    if binder <= 0 or water <= 0 or age_days <= 0:
        return 0.0
    effective = cement + 0.85 * slag + 0.55 * fly_ash
    effective *= 1.0 + 0.03 * np.log1p(sp)
    f28 = 150.0 * np.exp(-2.8 * water / effective)
    f28 *= 1.0 + 0.02 * np.tanh((agg - 1700.0) / 800.0)
    scm_fraction = (slag + 0.6 * fly_ash) / binder
    half_life = 2.0 * (1.0 + 1.1 * scm_fraction)
    maturity = (age_days / (age_days + half_life)) ** 0.9
    maturity /= (28.0 / (28.0 + half_life)) ** 0.9
    return float(f28 * maturity)


def simulate_measurement(mixture, age_days: float, rng: np.random.Generator,
                         relative_sd: float = 0.05, absolute_sd: float = 0.6) -> float:
    s = true_strength_mpa(mixture, age_days)
    noisy = s * (1.0 + relative_sd * rng.standard_normal()) + absolute_sd * rng.standard_normal()
    return float(max(noisy, 0.0))


def synthetic_concrete_matrix(
    n_mixtures: int = 260, seed: int = 0, noise: bool = True
) -> tuple[np.ndarray, np.ndarray]:
    """Synthetic stand-in with the UCI schema and roughly its size (~1030
    rows): X columns are the seven ingredients plus age, y is strength MPa."""
    rng = np.random.default_rng(seed)
    ages_pool = np.array([1.0, 3.0, 7.0, 14.0, 28.0, 56.0, 90.0])
    rows, targets = [], []
    for _ in range(n_mixtures):
        cement = rng.uniform(120.0, 500.0)
        slag = rng.uniform(0.0, 250.0) * (rng.random() < 0.6)
        fly_ash = rng.uniform(0.0, 200.0) * (rng.random() < 0.5)
        binder = cement + slag + fly_ash
        water = binder * rng.uniform(0.32, 0.62)
        sp = rng.uniform(0.0, 12.0) * (rng.random() < 0.7)
        fine = rng.uniform(650.0, 1000.0)
        coarse = rng.uniform(800.0, 1150.0)
        quantities = {
            "cement": cement, "fly_ash": fly_ash, "slag": slag, "water": water,
            "fine_aggregate": fine, "coarse_aggregate": coarse, "superplasticizer": sp,
        }
        n_ages = int(rng.integers(3, 6))
        for age in rng.choice(ages_pool, size=n_ages, replace=False):
            if noise:
                y = simulate_measurement(quantities, float(age), rng)
            else:
                y = true_strength_mpa(quantities, float(age))
            rows.append([quantities[k] for k in DEFAULT_INGREDIENTS] + [float(age)])
            targets.append(y)
    return np.array(rows), np.array(targets)


def synthetic_concrete_observations(
    n_mixtures: int = 60, seed: int = 0, ages=(1.0, 3.0, 7.0, 28.0), noise: bool = True
) -> list[StrengthObservation]:
    rng = np.random.default_rng(seed)
    X, _ = synthetic_concrete_matrix(n_mixtures, seed, noise=False)
    out = []
    seen = set()
    for row in X:
        key = tuple(np.round(row[:-1], 6))
        if key in seen:
            continue
        seen.add(key)
        mixture = Mixture.from_vector(row[:-1], DEFAULT_INGREDIENTS)
        for age in ages:
            y = simulate_measurement(mixture, age, rng) if noise else true_strength_mpa(mixture, age)
            out.append(StrengthObservation(mixture, float(age), y))
        if len(seen) >= n_mixtures:
            break
    return out


def concrete_dataset_or_standin(path=None) -> tuple[np.ndarray, np.ndarray, str]:
    """(X, y, source_label): the real UCI table when available, otherwise the
    synthetic stand-in, labeled so reports can say which one was used."""
    try:
        X, y = load_uci_concrete(path)
        return X, y, "uci-concrete"
    except DatasetUnavailableError:
        X, y = synthetic_concrete_matrix()
        return X, y, "synthetic-standin"
