"""Lab-in-the-loop campaign workflow: ingest measurements, persist state,
refresh the strength model, propose new batches, and compute empirical and
inferred Pareto frontiers.

Storage is a per-campaign directory: ``meta.json`` (constraints, GWP table,
objective spec, batches, snapshot index), an append-only
``observations.jsonl`` log, and ``snapshots/<digest>.json`` model files.
"""

from __future__ import annotations

import json
import logging
import os
import tempfile
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path

import numpy as np
from filelock import FileLock

from mixopt import gp
from mixopt.design_space import DEFAULT_INGREDIENTS, Constraints, Mixture
from mixopt.exceptions import (
    InsufficientDataError,
    IntegrityError,
    MigrationError,
    SchemaError,
    ValidationError,
)
from mixopt.moo import AcquisitionConfig, optimize_acquisition, pareto_filter
from mixopt.moo.hypervolume import hypervolume
from mixopt.objectives import GwpTable, ObjectiveSpec, gwp, objective_posterior
from mixopt.strength import (
    MEASURED,
    PSI_PER_MPA,
    StrengthGP,
    StrengthObservation,
    fit_strength_model,
    observations_digest,
)

log = logging.getLogger("mixopt.campaign")

STORE_VERSION = 1

_META_COLUMNS = {"age_days", "strength", "strength_unit", "batch", "replicate"}


def _utcnow() -> str:
    return datetime.now(timezone.utc).isoformat()


# ---------------------------------------------------------------------------
# CSV ingestion
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IngestedRow:
    observation: StrengthObservation
    batch: str | None
    line_no: int


@dataclass(frozen=True)
class IngestReport:
    n_rows: int
    n_accepted: int
    errors: tuple[tuple[int, str], ...]

    def to_dict(self) -> dict:
        return {
            "n_rows": self.n_rows,
            "n_accepted": self.n_accepted,
            "errors": [{"line": l, "message": m} for l, m in self.errors],
        }


def ingest_csv(
    source,
    ingredients: tuple[str, ...] = DEFAULT_INGREDIENTS,
    strict: bool = False,
    default_unit: str = "MPa",
) -> tuple[list[IngestedRow], IngestReport]:
    """Parse an observation CSV (path, file object, or text).

    Columns: any subset of the known ingredient names (kg/m^3), ``age_days``,
    ``strength``, optional ``strength_unit`` (MPa or psi), ``batch`` and
    ``replicate``. Unknown columns are a schema error. Malformed rows are
    reported with their line numbers; in strict mode any bad row aborts the
    whole ingest.
    """
    import csv as _csv
    import io

    if hasattr(source, "read"):
        text = source.read()
    else:
        source = str(source)
        is_path = False
        if source and "\n" not in source:
            try:
                is_path = Path(source).is_file()
            except OSError:
                is_path = False
        text = Path(source).read_text() if is_path else source
    reader = _csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        return [], IngestReport(0, 0, ())
    header = [h.strip() for h in header]
    known = set(ingredients) | _META_COLUMNS
    unknown = [h for h in header if h not in known]
    if unknown:
        raise SchemaError(f"unknown column(s) {unknown}; expected ingredients or {sorted(_META_COLUMNS)}")
    if "age_days" not in header or "strength" not in header:
        raise SchemaError("CSV requires age_days and strength columns")
    col = {name: i for i, name in enumerate(header)}

    rows: list[IngestedRow] = []
    errors: list[tuple[int, str]] = []
    n_rows = 0
    for line_no, raw in enumerate(reader, start=2):
        if not raw or all(not c.strip() for c in raw):
            continue
        n_rows += 1
        try:
            quantities = {}
            for name in ingredients:
                if name in col and raw[col[name]].strip() != "":
                    value = float(raw[col[name]])
                    if value < 0:
                        raise ValidationError(f"negative quantity for {name}")
                    quantities[name] = value
            unit = raw[col["strength_unit"]].strip() if "strength_unit" in col else default_unit
            unit = unit or default_unit
            if unit not in ("MPa", "psi"):
                raise ValidationError(f"unknown strength unit {unit!r}")
            strength = float(raw[col["strength"]])
            if unit == "psi":
                strength /= PSI_PER_MPA
            age = float(raw[col["age_days"]])
            replicate = None
            if "replicate" in col and raw[col["replicate"]].strip():
                replicate = int(raw[col["replicate"]])
            batch = raw[col["batch"]].strip() if "batch" in col and raw[col["batch"]].strip() else None
            ob = StrengthObservation(Mixture(quantities), age, strength, replicate)
            rows.append(IngestedRow(ob, batch, line_no))
        except (ValueError, ValidationError, IndexError) as err:
            errors.append((line_no, str(err)))
    if strict and errors:
        raise SchemaError(
            f"strict ingest aborted: {len(errors)} bad row(s), first at line "
            f"{errors[0][0]}: {errors[0][1]}"
        )
    report = IngestReport(n_rows, len(rows), tuple(errors))
    return rows, report


def ingest_json_rows(
    payload_rows: list[dict],
    ingredients: tuple[str, ...] = DEFAULT_INGREDIENTS,
    strict: bool = False,
    default_unit: str = "MPa",
) -> tuple[list[IngestedRow], IngestReport]:
    """JSON-object twin of ingest_csv: each row is a flat object with
    ingredient quantities plus age_days / strength / strength_unit / batch /
    replicate. Row numbers are 1-based list positions."""
    known = set(ingredients) | _META_COLUMNS
    rows: list[IngestedRow] = []
    errors: list[tuple[int, str]] = []
    for line_no, raw in enumerate(payload_rows, start=1):
        try:
            if not isinstance(raw, dict):
                raise ValidationError("row must be an object")
            unknown = set(raw) - known
            if unknown:
                raise SchemaError(f"unknown field(s) {sorted(unknown)}")
            quantities = {}
            for name in ingredients:
                if name in raw and raw[name] is not None:
                    value = float(raw[name])
                    if value < 0:
                        raise ValidationError(f"negative quantity for {name}")
                    quantities[name] = value
            unit = raw.get("strength_unit") or default_unit
            if unit not in ("MPa", "psi"):
                raise ValidationError(f"unknown strength unit {unit!r}")
            strength = float(raw["strength"])
            if unit == "psi":
                strength /= PSI_PER_MPA
            replicate = int(raw["replicate"]) if raw.get("replicate") is not None else None
            ob = StrengthObservation(Mixture(quantities), float(raw["age_days"]),
                                     strength, replicate)
            rows.append(IngestedRow(ob, raw.get("batch"), line_no))
        except (KeyError, TypeError, ValueError, ValidationError, SchemaError) as err:
            errors.append((line_no, str(err)))
    if strict and errors:
        raise SchemaError(
            f"strict ingest aborted: {len(errors)} bad row(s), first at row "
            f"{errors[0][0]}: {errors[0][1]}"
        )
    return rows, IngestReport(len(payload_rows), len(rows), tuple(errors))


# ---------------------------------------------------------------------------
# campaign state
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ObservationRecord:
    observation: StrengthObservation
    batch_id: str | None
    timestamp: str
    seq: int

    def to_dict(self) -> dict:
        return {
            "observation": self.observation.to_dict(),
            "batch_id": self.batch_id,
            "timestamp": self.timestamp,
            "seq": self.seq,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ObservationRecord":
        return cls(
            StrengthObservation.from_dict(d["observation"]),
            d.get("batch_id"),
            d["timestamp"],
            int(d["seq"]),
        )


@dataclass(frozen=True)
class Batch:
    batch_id: str
    origin: str  # "human" | "ai"
    mixtures: tuple[Mixture, ...]
    created_at: str
    seed: int | None = None
    acquisition_value: float | None = None
    predicted: dict | None = None  # {"means": [[3]...], "sds": [[3]...]}
    snapshot_digest: str | None = None

    def to_dict(self) -> dict:
        return {
            "batch_id": self.batch_id,
            "origin": self.origin,
            "mixtures": [m.to_dict() for m in self.mixtures],
            "created_at": self.created_at,
            "seed": self.seed,
            "acquisition_value": self.acquisition_value,
            "predicted": self.predicted,
            "snapshot_digest": self.snapshot_digest,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Batch":
        return cls(
            d["batch_id"],
            d["origin"],
            tuple(Mixture(m) for m in d["mixtures"]),
            d["created_at"],
            d.get("seed"),
            d.get("acquisition_value"),
            d.get("predicted"),
            d.get("snapshot_digest"),
        )


@dataclass(frozen=True)
class SnapshotMeta:
    digest: str
    created_at: str
    n_observations: int

    def to_dict(self) -> dict:
        return {"digest": self.digest, "created_at": self.created_at,
                "n_observations": self.n_observations}


@dataclass
class Campaign:
    """In-memory campaign state. The observation log is append-only: nothing
    here mutates or deletes past records."""

    id: str
    constraints: Constraints
    gwp_table: GwpTable
    objective_spec: ObjectiveSpec = field(default_factory=ObjectiveSpec)
    observations: list[ObservationRecord] = field(default_factory=list)
    batches: list[Batch] = field(default_factory=list)
    snapshots: list[SnapshotMeta] = field(default_factory=list)
    novelty_distance: float = 1.0  # kg/m^3, L-infinity, per proposal dedup
    created_at: str = field(default_factory=_utcnow)
    snapshot_errors: list[str] = field(default_factory=list)
    _model: StrengthGP | None = field(default=None, repr=False)

    def measured(self) -> list[StrengthObservation]:
        return [r.observation for r in self.observations if r.observation.provenance == MEASURED]

    def tested_matrix(self) -> np.ndarray:
        ing = self.constraints.ingredients
        seen, rows = set(), []
        for r in self.observations:
            k = r.observation.mixture.key()
            if k not in seen:
                seen.add(k)
                rows.append(r.observation.mixture.as_vector(ing))
        return np.array(rows) if rows else np.zeros((0, len(ing)))

    def next_seq(self) -> int:
        return max((r.seq for r in self.observations), default=-1) + 1

    def add_observations(self, rows: list[IngestedRow] | list[StrengthObservation],
                         batch_id: str | None = None) -> list[ObservationRecord]:
        records = []
        seq = self.next_seq()
        now = _utcnow()
        for row in rows:
            if isinstance(row, IngestedRow):
                ob, b = row.observation, row.batch or batch_id
            else:
                ob, b = row, batch_id
            records.append(ObservationRecord(ob, b or "external", now, seq))
            seq += 1
        self.observations.extend(records)
        return records

    @property
    def model(self) -> StrengthGP | None:
        return self._model

    def meta_dict(self) -> dict:
        return {
            "store_version": STORE_VERSION,
            "id": self.id,
            "created_at": self.created_at,
            "constraints": self.constraints.to_dict(),
            "gwp_table": self.gwp_table.to_dict(),
            "objective_spec": self.objective_spec.to_dict(),
            "novelty_distance": self.novelty_distance,
            "batches": [b.to_dict() for b in self.batches],
            "snapshots": [s.to_dict() for s in self.snapshots],
        }


# ---------------------------------------------------------------------------
# persistence
# ---------------------------------------------------------------------------


class CampaignStore:
    """Single-directory campaign store: JSON meta + JSONL observations +
    snapshot files, guarded by a file lock for concurrent appends."""

    def __init__(self, root):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def campaign_dir(self, campaign_id: str) -> Path:
        return self.root / campaign_id

    def list_ids(self) -> list[str]:
        return sorted(p.name for p in self.root.iterdir() if (p / "meta.json").exists())

    def exists(self, campaign_id: str) -> bool:
        return (self.campaign_dir(campaign_id) / "meta.json").exists()

    def _atomic_write(self, path: Path, payload: str):
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-")
        try:
            with os.fdopen(fd, "w") as fh:
                fh.write(payload)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    def save_meta(self, campaign: Campaign):
        cdir = self.campaign_dir(campaign.id)
        cdir.mkdir(parents=True, exist_ok=True)
        (cdir / "snapshots").mkdir(exist_ok=True)
        self._atomic_write(cdir / "meta.json", json.dumps(campaign.meta_dict(), indent=2))

    def append_observations(self, campaign_id: str, records: list[ObservationRecord]):
        cdir = self.campaign_dir(campaign_id)
        cdir.mkdir(parents=True, exist_ok=True)
        path = cdir / "observations.jsonl"
        lines = "".join(json.dumps(r.to_dict()) + "\n" for r in records)
        with FileLock(str(path) + ".lock"):
            with open(path, "a") as fh:
                fh.write(lines)

    def save_snapshot(self, campaign_id: str, digest: str, model_dict: dict):
        cdir = self.campaign_dir(campaign_id) / "snapshots"
        cdir.mkdir(parents=True, exist_ok=True)
        payload = {"digest": digest, "model": model_dict}
        self._atomic_write(cdir / f"{digest}.json", json.dumps(payload))

    def load_snapshot(self, campaign_id: str, digest: str) -> StrengthGP:
        path = self.campaign_dir(campaign_id) / "snapshots" / f"{digest}.json"
        if not path.exists():
            raise IntegrityError(f"snapshot file missing for digest {digest}", digest=digest)
        try:
            payload = json.loads(path.read_text())
        except json.JSONDecodeError as err:
            raise IntegrityError(f"snapshot {digest} is corrupt: {err}", digest=digest)
        if payload.get("digest") != digest:
            raise IntegrityError(
                f"snapshot digest mismatch: expected {digest}, found {payload.get('digest')}",
                digest=digest,
            )
        return StrengthGP.from_dict(payload["model"])


def save_campaign(campaign: Campaign, store: CampaignStore):
    """Persist meta and any observation records not yet in the log."""
    store.save_meta(campaign)
    path = store.campaign_dir(campaign.id) / "observations.jsonl"
    have = 0
    if path.exists():
        with open(path) as fh:
            have = sum(1 for line in fh if line.strip())
    missing = campaign.observations[have:]
    if missing:
        store.append_observations(campaign.id, missing)


def load_campaign(campaign_id: str, store: CampaignStore) -> Campaign:
    """Round-trips everything saved; snapshot problems are collected in
    ``snapshot_errors`` rather than failing the load, so the observation log
    stays usable."""
    cdir = store.campaign_dir(campaign_id)
    meta_path = cdir / "meta.json"
    if not meta_path.exists():
        raise FileNotFoundError(f"campaign {campaign_id!r} not found in {store.root}")
    meta = json.loads(meta_path.read_text())
    if meta.get("store_version") != STORE_VERSION:
        raise MigrationError(
            f"campaign {campaign_id!r} was written by store version "
            f"{meta.get('store_version')}, expected {STORE_VERSION}"
        )
    campaign = Campaign(
        id=meta["id"],
        constraints=Constraints.from_dict(meta["constraints"]),
        gwp_table=GwpTable.from_dict(meta["gwp_table"]),
        objective_spec=ObjectiveSpec.from_dict(meta["objective_spec"]),
        novelty_distance=float(meta.get("novelty_distance", 1.0)),
        created_at=meta.get("created_at", _utcnow()),
    )
    campaign.batches = [Batch.from_dict(b) for b in meta.get("batches", [])]
    campaign.snapshots = [
        SnapshotMeta(s["digest"], s["created_at"], int(s["n_observations"]))
        for s in meta.get("snapshots", [])
    ]
    obs_path = cdir / "observations.jsonl"
    records = []
    if obs_path.exists():
        lines = [l for l in obs_path.read_text().splitlines() if l.strip()]
        for i, line in enumerate(lines):
            try:
                records.append(ObservationRecord.from_dict(json.loads(line)))
            except (json.JSONDecodeError, KeyError) as err:
                if i == len(lines) - 1:
                    log.warning("ignoring partial trailing observation line in %s", campaign_id)
                    continue  # append in progress by a concurrent writer
                raise IntegrityError(f"corrupt observation log at line {i + 1}: {err}")
    records.sort(key=lambda r: (r.timestamp, r.seq))
    campaign.observations = records
    if campaign.snapshots:
        latest = campaign.snapshots[-1]
        try:
            campaign._model = store.load_snapshot(campaign_id, latest.digest)
        except IntegrityError as err:
            campaign.snapshot_errors.append(str(err))
            log.warning("campaign %s: %s", campaign_id, err)
    return campaign


# ---------------------------------------------------------------------------
# modeling operations
# ---------------------------------------------------------------------------

DEFAULT_CAMPAIGN_FIT = gp.FitConfig(restarts=4, max_iter=120)


def fit_campaign_model(
    campaign: Campaign,
    seed: int = 0,
    fit_config: gp.FitConfig | None = None,
    store: CampaignStore | None = None,
) -> tuple[StrengthGP, str]:
    """Fit the strength model on all measured observations and snapshot it."""
    measured = campaign.measured()
    model = fit_strength_model(
        measured,
        constraints=campaign.constraints,
        fit_config=fit_config or DEFAULT_CAMPAIGN_FIT,
        seed=seed,
    )
    digest = observations_digest(measured)
    campaign._model = model
    if not any(s.digest == digest for s in campaign.snapshots):
        campaign.snapshots.append(SnapshotMeta(digest, _utcnow(), len(measured)))
    if store is not None:
        store.save_snapshot(campaign.id, digest, model.to_dict(training_digest=digest))
        save_campaign(campaign, store)
    return model, digest


def propose_batch(
    campaign: Campaign,
    q: int = 6,
    seed: int = 0,
    store: CampaignStore | None = None,
    fit_config: gp.FitConfig | None = None,
    acq_config: AcquisitionConfig | None = None,
) -> Batch:
    """Refit on all observations, optimize the acquisition under the campaign
    constraints, and persist the resulting AI batch with the model snapshot
    and predicted objective posteriors. Deterministic given (state, seed)."""
    model, digest = fit_campaign_model(campaign, seed=seed, fit_config=fit_config, store=store)
    base = acq_config or AcquisitionConfig()
    config = replace(base, q=q, seed=seed)
    seen = set()
    observed = []
    for r in campaign.observations:
        k = r.observation.mixture.key()
        if k not in seen:
            seen.add(k)
            observed.append(r.observation.mixture)
    result = optimize_acquisition(
        model,
        campaign.gwp_table,
        campaign.constraints,
        config,
        spec=campaign.objective_spec,
        observed=observed,
        novelty_exclude=campaign.tested_matrix(),
        novelty_distance=campaign.novelty_distance,
    )
    means, covs = objective_posterior(model, campaign.gwp_table, result.mixtures,
                                      campaign.objective_spec)
    sds = np.sqrt(np.clip(np.diagonal(covs, axis1=1, axis2=2), 0.0, None))
    batch = Batch(
        batch_id=f"ai-{len(campaign.batches) + 1:03d}",
        origin="ai",
        mixtures=result.mixtures,
        created_at=_utcnow(),
        seed=seed,
        acquisition_value=result.value,
        predicted={"means": means.tolist(), "sds": sds.tolist()},
        snapshot_digest=digest,
    )
    campaign.batches.append(batch)
    if store is not None:
        save_campaign(campaign, store)
    log.info("proposed batch %s: %d mixtures, acquisition %.4g",
             batch.batch_id, q, result.value)
    return batch


# ---------------------------------------------------------------------------
# frontiers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EmpiricalFrontier:
    """Measured (strength, -GWP) trade-offs at one age, replicates averaged."""

    age_days: float
    points: np.ndarray  # (n, 2): strength MPa, -gwp
    mixtures: tuple[Mixture, ...]
    batch_ids: tuple[str | None, ...]
    frontier_indices: tuple[int, ...]
    hypervolume: float

    def frontier_points(self) -> np.ndarray:
        return self.points[list(self.frontier_indices)]

    def to_dict(self) -> dict:
        return {
            "age_days": self.age_days,
            "points": [
                {
                    "strength_mpa": float(p[0]),
                    "gwp_kgco2e_m3": float(-p[1]),
                    "mixture": m.to_dict(),
                    "batch_id": b,
                    "dominated": i not in self.frontier_indices,
                }
                for i, (p, m, b) in enumerate(zip(self.points, self.mixtures, self.batch_ids))
            ],
            "hypervolume": self.hypervolume,
        }


def empirical_pareto(campaign: Campaign, age: float) -> EmpiricalFrontier:
    """Frontier of measured strengths at the given age versus exact GWP.

    Uses only measured records whose age matches; replicate specimens of the
    same mixture are averaged. Returns dominated points too, for plotting.
    """
    groups: dict[tuple, list[tuple[ObservationRecord, float]]] = {}
    for r in campaign.observations:
        ob = r.observation
        if ob.provenance != MEASURED or abs(ob.age_days - age) > 1e-9:
            continue
        groups.setdefault(ob.mixture.key(), []).append((r, ob.strength_mpa))
    if not groups:
        return EmpiricalFrontier(age, np.zeros((0, 2)), (), (), (), 0.0)
    mixtures, batch_ids, pts = [], [], []
    for entries in groups.values():
        record = entries[0][0]
        mean_strength = float(np.mean([s for _, s in entries]))
        mixtures.append(record.observation.mixture)
        batch_ids.append(record.batch_id)
        pts.append([mean_strength, -gwp(campaign.gwp_table, record.observation.mixture)])
    pts = np.array(pts)
    frontier = pareto_filter(pts)
    ref2 = _age_reference(campaign.objective_spec, age)
    hv = hypervolume(frontier.points, ref2) if len(frontier) else 0.0
    return EmpiricalFrontier(age, pts, tuple(mixtures), tuple(batch_ids),
                             frontier.indices, hv)


def _age_reference(spec: ObjectiveSpec, age: float) -> tuple[float, float]:
    if abs(age - spec.ages[0]) < 1e-9:
        return (spec.reference_point[0], spec.reference_point[2])
    if abs(age - spec.ages[1]) < 1e-9:
        return (spec.reference_point[1], spec.reference_point[2])
    return (0.0, spec.reference_point[2])


@dataclass(frozen=True)
class InferredFrontier:
    """Predicted Pareto frontier under scenario constraints, with per-point
    predictive uncertainty for banding."""

    points: np.ndarray  # (n, 3) objective means: s1, s28, -gwp
    sds: np.ndarray  # (n, 3); gwp column is zero
    mixtures: tuple[Mixture, ...]
    scenario: dict
    seed: int

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "seed": self.seed,
            "points": [
                {
                    "objectives": p.tolist(),
                    "sd": s.tolist(),
                    "mixture": m.to_dict(),
                }
                for p, s, m in zip(self.points, self.sds, self.mixtures)
            ],
        }


def inferred_pareto(
    campaign: Campaign,
    scenario: dict | None = None,
    n_candidates: int = 50_000,
    seed: int = 0,
    model: StrengthGP | None = None,
) -> InferredFrontier:
    """Numerical approximation of the predicted frontier over the
    scenario-feasible region: large-sample candidate generation followed by
    non-dominated filtering. Deterministic given the seed."""
    model = model or campaign.model
    if model is None:
        raise InsufficientDataError("no fitted model snapshot; run fit or propose first")
    scenario = scenario or {}
    constraints = campaign.constraints.with_overrides(scenario)
    constraints.check_nonempty()
    table = campaign.gwp_table
    if scenario.get("gwp_table"):
        table = GwpTable.from_dict(scenario["gwp_table"])
    elif scenario.get("gwp_scale"):
        table = table.scaled(float(scenario["gwp_scale"]))

    from mixopt.design_space import sample_feasible

    X = sample_feasible(constraints, n_candidates, seed)
    ing = constraints.ingredients
    if tuple(ing) != tuple(model.ingredients_):
        raise ValidationError("scenario ingredient set differs from the fitted model's")
    ages = campaign.objective_spec.ages
    coef = np.array([table.coefficients.get(name, np.nan) for name in ing])
    if np.any(np.isnan(coef[np.ptp(X, axis=0) + X.max(axis=0) > 0])):
        missing = [name for name, c in zip(ing, coef) if np.isnan(c)]
        raise ValidationError(f"GWP table lacks coefficients for {missing}")
    neg_gwp = -(X @ np.nan_to_num(coef))

    mean1, sd1 = model.predict(np.column_stack([X, np.full(len(X), ages[0])]), return_std=True)
    mean2, sd2 = model.predict(np.column_stack([X, np.full(len(X), ages[1])]), return_std=True)
    objectives = np.column_stack([mean1, mean2, neg_gwp])
    frontier = pareto_filter(objectives)
    idx = list(frontier.indices)
    sds = np.column_stack([sd1[idx], sd2[idx], np.zeros(len(idx))])
    mixtures = tuple(Mixture.from_vector(X[i], ing) for i in idx)
    return InferredFrontier(frontier.points, sds, mixtures, scenario, seed)


# ---------------------------------------------------------------------------
# example configuration shipped with the package
# ---------------------------------------------------------------------------


def example_constraints() -> Constraints:
    data = resources.files("mixopt").joinpath("data/example_constraints.json").read_text()
    return Constraints.from_dict(json.loads(data))


def example_gwp_table() -> GwpTable:
    data = resources.files("mixopt").joinpath("data/example_gwp.json").read_text()
    return GwpTable.from_dict(json.loads(data))
