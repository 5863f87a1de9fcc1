"""HTTP API over the campaign store, for the companion UI and scripts.

Every response is wrapped in an envelope: ``{"ok": true, "data": ...}`` or
``{"ok": false, "error": {"code", "message", "detail"}}`` with exactly one of
data/error present. Mutating endpoints honor an ``Idempotency-Key`` header;
replays return the original response without re-applying the write.

Proposals run as background jobs (model fitting can take a while); a job
computes off-lock and takes the campaign's write lock only to commit, so
measurement posts conflict (409) only during that commit window. The job
registry and idempotency cache are in-memory; proposed batches themselves are
persisted in the campaign store.
"""

from __future__ import annotations

import json
import logging
import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from mixopt import gp
from mixopt.campaign import (
    CampaignStore,
    empirical_pareto,
    inferred_pareto,
    ingest_csv,
    ingest_json_rows,
    load_campaign,
    propose_batch,
    save_campaign,
)
from mixopt.exceptions import (
    ConstraintError,
    InsufficientDataError,
    MixoptError,
    SchemaError,
    ValidationError,
)
from mixopt.moo import AcquisitionConfig

log = logging.getLogger("mixopt.service")


def _ok(data, status_code: int = 200) -> JSONResponse:
    return JSONResponse({"ok": True, "data": data}, status_code=status_code)


def _err(status_code: int, code: str, message: str, detail=None) -> JSONResponse:
    return JSONResponse(
        {"ok": False, "error": {"code": code, "message": message, "detail": detail}},
        status_code=status_code,
    )


@dataclass
class _Job:
    job_id: str
    campaign_id: str
    status: str = "pending"  # pending -> running -> done | failed
    result: dict | None = None
    error: dict | None = None


@dataclass
class _State:
    store: CampaignStore
    token: str | None = None
    fit_config: gp.FitConfig | None = None
    acq_config: AcquisitionConfig | None = None
    jobs: dict[str, _Job] = field(default_factory=dict)
    active_job: dict[str, str] = field(default_factory=dict)  # campaign -> job id
    locks: dict[str, threading.Lock] = field(default_factory=dict)
    idempotency: dict[tuple, tuple[int, dict]] = field(default_factory=dict)
    registry_lock: threading.Lock = field(default_factory=threading.Lock)

    def lock_for(self, campaign_id: str) -> threading.Lock:
        with self.registry_lock:
            return self.locks.setdefault(campaign_id, threading.Lock())


def create_app(
    store: CampaignStore,
    token: str | None = None,
    fit_config: gp.FitConfig | None = None,
    acq_config: AcquisitionConfig | None = None,
    ui_dir: str | Path | None = None,
) -> FastAPI:
    app = FastAPI(title="mixopt", version="0.1.0")
    state = _State(store, token, fit_config, acq_config)
    app.state.mixopt = state

    @app.middleware("http")
    async def auth_middleware(request: Request, call_next):
        if state.token and request.url.path.startswith("/v1"):
            header = request.headers.get("authorization", "")
            if header != f"Bearer {state.token}":
                return _err(401, "unauthorized", "missing or invalid bearer token")
        return await call_next(request)

    def idempotent(request: Request, campaign_id: str):
        key = request.headers.get("idempotency-key")
        if not key:
            return None, None
        cache_key = (campaign_id, request.url.path, key)
        return cache_key, state.idempotency.get(cache_key)

    def remember(cache_key, response: JSONResponse):
        if cache_key is not None:
            state.idempotency[cache_key] = (response.status_code, json.loads(response.body))
        return response

    # -- campaigns ----------------------------------------------------------

    @app.get("/v1/campaigns")
    def list_campaigns():
        return _ok({"campaigns": state.store.list_ids()})

    @app.get("/v1/campaigns/{campaign_id}/state")
    def campaign_state(campaign_id: str):
        if not state.store.exists(campaign_id):
            return _err(404, "not_found", f"unknown campaign {campaign_id!r}")
        campaign = load_campaign(campaign_id, state.store)
        measured = campaign.measured()
        spec = campaign.objective_spec
        frontier_hv = {
            f"age_{spec.ages[0]:g}": empirical_pareto(campaign, spec.ages[0]).hypervolume,
            f"age_{spec.ages[1]:g}": empirical_pareto(campaign, spec.ages[1]).hypervolume,
        }
        return _ok({
            "id": campaign.id,
            "created_at": campaign.created_at,
            "observations": {
                "total": len(campaign.observations),
                "measured": len(measured),
            },
            "batches": [
                {
                    "batch_id": b.batch_id,
                    "origin": b.origin,
                    "size": len(b.mixtures),
                    "created_at": b.created_at,
                    "snapshot_digest": b.snapshot_digest,
                }
                for b in campaign.batches
            ],
            "snapshot_digest": campaign.snapshots[-1].digest if campaign.snapshots else None,
            "snapshot_errors": campaign.snapshot_errors,
            "frontier_hypervolumes": frontier_hv,
            "objective_spec": spec.to_dict(),
            "constraints": campaign.constraints.to_dict(),
            "novelty_distance": campaign.novelty_distance,
        })

    # -- measurements -------------------------------------------------------

    @app.post("/v1/campaigns/{campaign_id}/measurements")
    async def post_measurements(campaign_id: str, request: Request):
        if not state.store.exists(campaign_id):
            return _err(404, "not_found", f"unknown campaign {campaign_id!r}")
        cache_key, cached = idempotent(request, campaign_id)
        if cached:
            status_code, payload = cached
            return JSONResponse(payload, status_code=status_code)

        body = await request.body()
        content_type = request.headers.get("content-type", "")
        strict = request.query_params.get("strict", "false").lower() == "true"
        batch = request.query_params.get("batch")
        campaign = load_campaign(campaign_id, state.store)
        try:
            if "text/csv" in content_type:
                rows, report = ingest_csv(body.decode(), campaign.constraints.ingredients,
                                          strict=strict)
            else:
                try:
                    payload = json.loads(body or b"{}")
                except json.JSONDecodeError as err:
                    return remember(cache_key, _err(400, "bad_request", f"malformed JSON: {err}"))
                if not isinstance(payload, dict) or "rows" not in payload:
                    return remember(cache_key, _err(400, "schema_error",
                                                    "JSON body must be {rows: [...]}"))
                strict = bool(payload.get("strict", strict))
                batch = payload.get("batch", batch)
                rows, report = ingest_json_rows(payload["rows"],
                                                campaign.constraints.ingredients,
                                                strict=strict)
        except SchemaError as err:
            return remember(cache_key, _err(400, "schema_error", str(err)))

        lock = state.lock_for(campaign_id)
        if not lock.acquire(blocking=False):
            return _err(409, "conflict", "a proposal job is committing; retry shortly")
        try:
            records = campaign.add_observations(rows, batch_id=batch)
            state.store.append_observations(campaign_id, records)
        finally:
            lock.release()
        data = {"report": report.to_dict(), "appended": len(records)}
        return remember(cache_key, _ok(data))

    # -- proposals (async jobs) ----------------------------------------------

    def _run_proposal(job: _Job, q: int, seed: int):
        state_ = state
        job.status = "running"
        try:
            campaign = load_campaign(job.campaign_id, state_.store)
            batch = propose_batch(
                campaign, q=q, seed=seed, store=None,
                fit_config=state_.fit_config, acq_config=state_.acq_config,
            )
            lock = state_.lock_for(job.campaign_id)
            with lock:  # commit: re-read, attach, persist
                fresh = load_campaign(job.campaign_id, state_.store)
                fresh.batches.append(batch)
                known = {s.digest for s in fresh.snapshots}
                for snap in campaign.snapshots:
                    if snap.digest not in known:
                        fresh.snapshots.append(snap)
                state_.store.save_snapshot(
                    job.campaign_id, batch.snapshot_digest,
                    campaign.model.to_dict(training_digest=batch.snapshot_digest),
                )
                save_campaign(fresh, state_.store)
            job.result = {"batch": batch.to_dict()}
            job.status = "done"
        except InsufficientDataError as err:
            job.error = {"code": "insufficient_data", "message": str(err)}
            job.status = "failed"
        except MixoptError as err:
            job.error = {"code": "proposal_failed", "message": str(err)}
            job.status = "failed"
        except Exception as err:  # pragma: no cover - defensive
            log.exception("proposal job %s crashed", job.job_id)
            job.error = {"code": "internal", "message": str(err)}
            job.status = "failed"
        finally:
            with state_.registry_lock:
                if state_.active_job.get(job.campaign_id) == job.job_id:
                    del state_.active_job[job.campaign_id]

    @app.post("/v1/campaigns/{campaign_id}/propose")
    async def post_propose(campaign_id: str, request: Request):
        if not state.store.exists(campaign_id):
            return _err(404, "not_found", f"unknown campaign {campaign_id!r}")
        cache_key, cached = idempotent(request, campaign_id)
        if cached:
            status_code, payload = cached
            return JSONResponse(payload, status_code=status_code)
        try:
            payload = json.loads(await request.body() or b"{}")
        except json.JSONDecodeError as err:
            return _err(400, "bad_request", f"malformed JSON: {err}")
        q = int(payload.get("q", 6))
        seed = int(payload.get("seed", 0))

        campaign = load_campaign(campaign_id, state.store)
        measured = campaign.measured()
        if len(measured) < 2 or len({o.age_days for o in measured}) < 2:
            return _err(422, "insufficient_data",
                        "need at least 2 measured observations spanning 2 ages")
        with state.registry_lock:
            if campaign_id in state.active_job:
                return _err(409, "conflict",
                            f"job {state.active_job[campaign_id]} already running")
            job = _Job(job_id=f"job-{uuid.uuid4().hex[:12]}", campaign_id=campaign_id)
            state.jobs[job.job_id] = job
            state.active_job[campaign_id] = job.job_id
        thread = threading.Thread(target=_run_proposal, args=(job, q, seed), daemon=True)
        thread.start()
        return remember(cache_key, _ok({"job_id": job.job_id, "status": job.status},
                                       status_code=202))

    @app.get("/v1/jobs/{job_id}")
    def get_job(job_id: str):
        job = state.jobs.get(job_id)
        if job is None:
            return _err(404, "not_found", f"unknown job {job_id!r}")
        data = {"job_id": job.job_id, "campaign_id": job.campaign_id, "status": job.status}
        if job.status == "done":
            data.update(job.result)
        if job.status == "failed":
            data["error"] = job.error
        return _ok(data)

    # -- frontiers ----------------------------------------------------------

    @app.get("/v1/campaigns/{campaign_id}/pareto/empirical")
    def get_empirical(campaign_id: str, age: float):
        if not state.store.exists(campaign_id):
            return _err(404, "not_found", f"unknown campaign {campaign_id!r}")
        campaign = load_campaign(campaign_id, state.store)
        result = empirical_pareto(campaign, age)
        origins = {b.batch_id: b.origin for b in campaign.batches}
        payload = result.to_dict()
        for point in payload["points"]:
            point["origin"] = origins.get(point["batch_id"], "human")
        return _ok(payload)

    @app.post("/v1/campaigns/{campaign_id}/pareto/inferred")
    async def post_inferred(campaign_id: str, request: Request):
        if not state.store.exists(campaign_id):
            return _err(404, "not_found", f"unknown campaign {campaign_id!r}")
        try:
            payload = json.loads(await request.body() or b"{}")
        except json.JSONDecodeError as err:
            return _err(400, "bad_request", f"malformed scenario JSON: {err}")
        if not isinstance(payload, dict):
            return _err(400, "schema_error", "body must be a JSON object")
        scenario = payload.get("scenario") or {}
        n_candidates = int(payload.get("n_candidates", 20000))
        seed = int(payload.get("seed", 0))
        campaign = load_campaign(campaign_id, state.store)
        try:
            result = inferred_pareto(campaign, scenario, n_candidates=n_candidates, seed=seed)
        except ConstraintError as err:
            return _err(422, "infeasible_scenario", str(err), detail=err.certificate)
        except InsufficientDataError as err:
            return _err(422, "insufficient_data", str(err))
        except (ValidationError, SchemaError) as err:
            return _err(400, "schema_error", str(err))
        return _ok(result.to_dict())

    # -- optional static UI ---------------------------------------------------

    ui_path = Path(ui_dir) if ui_dir else None
    if ui_path and ui_path.is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(ui_path), html=True), name="ui")

    return app
