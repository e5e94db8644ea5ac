"""HTTP backend for the online tool: design tables, stateless decision
cards, persistent trial-conduct sessions, and simulation jobs.

Every accepted trial mutation is appended to a per-session JSONL event log
and fsynced before the response goes out, so a crash never loses an
acknowledged cohort.  Mutations carry an expected_version for optimistic
concurrency; a stale version gets a 409 and the client retries explicitly.
"""

from __future__ import annotations

import json
import os
import threading
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path

from fastapi import FastAPI, HTTPException, Response
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field, model_validator

from . import conduct
from .engine import decision_card, decision_table
from .partition import VARIANT_MTPI, VARIANT_MTPI2, DesignParams
from .posterior import DoseData
from .simulate import Scenario, SimConfig, run_study

SNAPSHOT_EVERY = 5


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


# ---------------------------------------------------------------------------
# request/response schemas
# ---------------------------------------------------------------------------


class DesignParamsBody(BaseModel):
    p_T: float
    eps1: float = 0.05
    eps2: float = 0.05
    xi: float = 0.95
    variant: str = VARIANT_MTPI2
    leftover_policy: str = "exclude"
    max_n: int = 12
    cohort_size: int = 3
    start_dose: int = 1

    @model_validator(mode="after")
    def _check_invariants(self) -> "DesignParamsBody":
        self.to_params()  # DesignParams raises ValueError on any violation
        return self

    def to_params(self) -> DesignParams:
        return DesignParams(
            p_t=self.p_T,
            eps1=self.eps1,
            eps2=self.eps2,
            xi=self.xi,
            variant=self.variant,
            leftover_policy=self.leftover_policy,
            max_n=self.max_n,
            cohort_size=self.cohort_size,
            start_dose=self.start_dose,
        )


class TableRequest(DesignParamsBody):
    variant: str = "both"

    @model_validator(mode="after")
    def _check_invariants(self) -> "TableRequest":
        if self.variant not in (VARIANT_MTPI, VARIANT_MTPI2, "both"):
            raise ValueError(f"variant must be mtpi, mtpi2, or both, not {self.variant!r}")
        base = self.variant if self.variant != "both" else VARIANT_MTPI
        self.model_copy(update={"variant": base}).to_params()
        return self


class CreateTrialRequest(BaseModel):
    params: DesignParamsBody
    num_doses: int = Field(ge=1)


class CohortBody(BaseModel):
    dlt_count: int = Field(ge=0)
    cohort_n: int = Field(ge=1)
    expected_version: int = Field(ge=0)


class WhatIfBody(BaseModel):
    dlt_count: int = Field(ge=0)
    cohort_n: int = Field(ge=1)


class FinalizeBody(BaseModel):
    expected_version: int = Field(ge=0)


class SimulationRequest(BaseModel):
    scenarios: list[dict]
    n_trials: int = Field(ge=1, le=1_000_000)
    seed: int = 0
    designs: list[str] = [VARIANT_MTPI, VARIANT_MTPI2]
    cohort_size: int | None = None
    max_n: int | None = None


# ---------------------------------------------------------------------------
# persistence
# ---------------------------------------------------------------------------


@dataclass
class Session:
    id: str
    params: DesignParams
    num_doses: int
    state: conduct.TrialState
    version: int
    created_at: str
    updated_at: str
    mtd_result: conduct.MtdResult | None = None
    last_action: str | None = None
    lock: threading.Lock = field(default_factory=threading.Lock, repr=False)


class TrialStore:
    """Append-only JSONL event logs with periodic snapshots."""

    def __init__(self, data_dir: str | Path):
        self.root = Path(data_dir) / "trials"
        self.root.mkdir(parents=True, exist_ok=True)
        self.sessions: dict[str, Session] = {}
        self._load_all()

    def _log_path(self, session_id: str) -> Path:
        return self.root / f"{session_id}.log"

    def _append(self, session_id: str, record: dict) -> None:
        # fsync before the caller acknowledges: crash safety for every 2xx
        with open(self._log_path(session_id), "a", encoding="utf-8") as fh:
            fh.write(json.dumps(record) + "\n")
            fh.flush()
            os.fsync(fh.fileno())

    def _snapshot(self, session: Session) -> None:
        path = self.root / f"{session.id}.snapshot.json"
        payload = {
            "id": session.id,
            "version": session.version,
            "state": session.state.to_json(),
            "saved_at": _now(),
        }
        path.write_text(json.dumps(payload, indent=2), encoding="utf-8")

    def create(self, params: DesignParams, num_doses: int) -> Session:
        session_id = uuid.uuid4().hex[:12]
        now = _now()
        state = conduct.new_trial(params, num_doses)  # validate before touching disk
        self._append(
            session_id,
            {
                "type": "create",
                "id": session_id,
                "params": _params_to_json(params),
                "num_doses": num_doses,
                "at": now,
            },
        )
        session = Session(
            id=session_id,
            params=params,
            num_doses=num_doses,
            state=state,
            version=0,
            created_at=now,
            updated_at=now,
        )
        self.sessions[session_id] = session
        return session

    def append_cohort(self, session: Session, dlt_count: int, cohort_n: int) -> None:
        session.version += 1
        session.updated_at = _now()
        self._append(
            session.id,
            {
                "type": "cohort",
                "dlt_count": dlt_count,
                "cohort_n": cohort_n,
                "version": session.version,
                "at": session.updated_at,
            },
        )
        if session.version % SNAPSHOT_EVERY == 0:
            self._snapshot(session)

    def append_finalize(self, session: Session) -> None:
        session.version += 1
        session.updated_at = _now()
        self._append(
            session.id,
            {"type": "finalize", "version": session.version, "at": session.updated_at},
        )
        self._snapshot(session)

    def _load_all(self) -> None:
        for path in sorted(self.root.glob("*.log")):
            session = self._replay(path)
            if session is not None:
                self.sessions[session.id] = session

    def _replay(self, path: Path) -> Session | None:
        lines = [json.loads(line) for line in path.read_text().splitlines() if line.strip()]
        if not lines or lines[0]["type"] != "create":
            return None
        head = lines[0]
        params = _params_from_json(head["params"])
        state = conduct.new_trial(params, head["num_doses"])
        session = Session(
            id=head["id"],
            params=params,
            num_doses=head["num_doses"],
            state=state,
            version=0,
            created_at=head["at"],
            updated_at=head["at"],
        )
        for record in lines[1:]:
            if record["type"] == "cohort":
                decision = conduct.step(session.state, record["dlt_count"], record["cohort_n"])
                session.state = decision.state
                session.last_action = decision.action
            elif record["type"] == "finalize":
                if session.state.status == conduct.STATUS_ACTIVE:
                    session.state = _terminate(session.state)
                session.mtd_result = conduct.select_mtd(session.state)
            session.version = record["version"]
            session.updated_at = record["at"]
        return session


def _terminate(state: conduct.TrialState) -> conduct.TrialState:
    return replace(state, status=conduct.STATUS_COMPLETED)


def _params_to_json(params: DesignParams) -> dict:
    return {
        "p_T": params.p_t,
        "eps1": params.eps1,
        "eps2": params.eps2,
        "xi": params.xi,
        "variant": params.variant,
        "leftover_policy": params.leftover_policy,
        "max_n": params.max_n,
        "cohort_size": params.cohort_size,
        "start_dose": params.start_dose,
    }


def _params_from_json(doc: dict) -> DesignParams:
    return DesignParams(
        p_t=doc["p_T"],
        eps1=doc["eps1"],
        eps2=doc["eps2"],
        xi=doc["xi"],
        variant=doc["variant"],
        leftover_policy=doc["leftover_policy"],
        max_n=doc["max_n"],
        cohort_size=doc["cohort_size"],
        start_dose=doc["start_dose"],
    )


# ---------------------------------------------------------------------------
# simulation jobs
# ---------------------------------------------------------------------------


@dataclass
class SimulationJob:
    id: str
    status: str  # queued -> running -> done | failed
    report: list[dict] | None = None
    error: str | None = None


class JobRegistry:
    def __init__(self, max_workers: int = 2):
        self.jobs: dict[str, SimulationJob] = {}
        self.lock = threading.Lock()
        self.pool = ThreadPoolExecutor(max_workers=max_workers)

    def submit(self, scenarios: list[Scenario], config: SimConfig) -> SimulationJob:
        job = SimulationJob(id=uuid.uuid4().hex[:12], status="queued")
        with self.lock:
            self.jobs[job.id] = job
        self.pool.submit(self._run, job, scenarios, config)
        return job

    def _run(self, job: SimulationJob, scenarios: list[Scenario], config: SimConfig) -> None:
        job.status = "running"
        try:
            reports = run_study(scenarios, config)
            job.report = [r.to_json() for r in reports]
            job.status = "done"
        except Exception as exc:  # surfaced through the job status
            job.error = str(exc)
            job.status = "failed"

    def get(self, job_id: str) -> SimulationJob | None:
        with self.lock:
            return self.jobs.get(job_id)


# ---------------------------------------------------------------------------
# app
# ---------------------------------------------------------------------------


def _trial_view(session: Session) -> dict:
    return {
        "id": session.id,
        "params": _params_to_json(session.params),
        "state": session.state.to_json(),
        "version": session.version,
        "created_at": session.created_at,
        "updated_at": session.updated_at,
        "last_action": session.last_action,
        "mtd_result": session.mtd_result.to_json() if session.mtd_result else None,
    }


def _card_for(state: conduct.TrialState, dose: int) -> dict:
    return decision_card(state.dose_data(dose), state.params)


def create_app(data_dir: str | Path = "./mtpi2-data") -> FastAPI:
    app = FastAPI(title="mtpi2 dose-finding service", version="0.1.0")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    store = TrialStore(data_dir)
    jobs = JobRegistry()
    app.state.store = store
    app.state.jobs = jobs

    def _get_session(trial_id: str) -> Session:
        session = store.sessions.get(trial_id)
        if session is None:
            raise HTTPException(status_code=404, detail=f"unknown trial {trial_id!r}")
        return session

    @app.get("/api/health")
    def health() -> dict:
        return {"status": "ok"}

    @app.post("/api/designs/table")
    def designs_table(body: TableRequest) -> dict:
        variants = (
            [VARIANT_MTPI, VARIANT_MTPI2] if body.variant == "both" else [body.variant]
        )
        docs = {}
        for variant in variants:
            params = body.model_copy(update={"variant": variant}).to_params()
            docs[variant] = decision_table(params).to_json()
        return {"designs": docs}

    @app.post("/api/trials", status_code=201)
    def create_trial(body: CreateTrialRequest) -> dict:
        try:
            session = store.create(body.params.to_params(), body.num_doses)
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return {
            "id": session.id,
            "starting_dose": session.state.current_dose,
            "version": session.version,
            "trial": _trial_view(session),
        }

    @app.get("/api/trials/{trial_id}")
    def get_trial(trial_id: str, response: Response) -> dict:
        session = _get_session(trial_id)
        response.headers["ETag"] = f'"{session.version}"'  # cacheable per version
        return _trial_view(session)

    @app.post("/api/trials/{trial_id}/cohorts")
    def post_cohort(trial_id: str, body: CohortBody) -> dict:
        session = _get_session(trial_id)
        with session.lock:
            if session.mtd_result is not None:
                raise HTTPException(status_code=409, detail="trial already finalized")
            if session.state.status != conduct.STATUS_ACTIVE:
                raise HTTPException(
                    status_code=409, detail=f"trial is {session.state.status}"
                )
            if body.expected_version != session.version:
                raise HTTPException(
                    status_code=409,
                    detail=f"stale expected_version {body.expected_version}; "
                    f"current version is {session.version}",
                )
            treated_dose = session.state.current_dose
            try:
                decision = conduct.step(session.state, body.dlt_count, body.cohort_n)
            except conduct.TrialError as exc:
                raise HTTPException(status_code=422, detail=str(exc))
            session.state = decision.state
            session.last_action = decision.action
            store.append_cohort(session, body.dlt_count, body.cohort_n)
            return {
                "card": _card_for(decision.state, treated_dose),
                "action": decision.action,
                "next_dose": decision.dose,
                "status": decision.state.status,
                "version": session.version,
                "trial": _trial_view(session),
            }

    @app.post("/api/trials/{trial_id}/whatif")
    def whatif(trial_id: str, body: WhatIfBody) -> dict:
        session = _get_session(trial_id)
        if session.mtd_result is not None or session.state.status != conduct.STATUS_ACTIVE:
            raise HTTPException(status_code=409, detail="trial is not active")
        treated_dose = session.state.current_dose
        try:
            decision = conduct.step(session.state, body.dlt_count, body.cohort_n)
        except conduct.TrialError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return {
            "card": _card_for(decision.state, treated_dose),
            "action": decision.action,
            "next_dose": decision.dose,
            "status": decision.state.status,
            "version": session.version,  # unchanged: nothing was recorded
        }

    @app.post("/api/trials/{trial_id}/finalize")
    def finalize(trial_id: str, body: FinalizeBody) -> dict:
        session = _get_session(trial_id)
        with session.lock:
            if session.mtd_result is not None:
                raise HTTPException(status_code=409, detail="trial already finalized")
            if body.expected_version != session.version:
                raise HTTPException(
                    status_code=409,
                    detail=f"stale expected_version {body.expected_version}; "
                    f"current version is {session.version}",
                )
            if session.state.status == conduct.STATUS_ACTIVE:
                session.state = _terminate(session.state)
            session.mtd_result = conduct.select_mtd(session.state)
            store.append_finalize(session)
            return {
                "mtd_result": session.mtd_result.to_json(),
                "status": session.state.status,
                "version": session.version,
                "trial": _trial_view(session),
            }

    @app.post("/api/simulations", status_code=202)
    def post_simulation(body: SimulationRequest) -> dict:
        try:
            scenarios = [Scenario.from_json(rec) for rec in body.scenarios]
            config = SimConfig(
                n_trials=body.n_trials,
                seed=body.seed,
                designs=tuple(body.designs),
                cohort_size=body.cohort_size,
                max_n=body.max_n,
            )
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        job = jobs.submit(scenarios, config)
        return {"id": job.id, "status": job.status}

    @app.get("/api/simulations/{job_id}")
    def get_simulation(job_id: str) -> dict:
        job = jobs.get(job_id)
        if job is None:
            raise HTTPException(status_code=404, detail=f"unknown job {job_id!r}")
        payload = {"id": job.id, "status": job.status}
        if job.status == "done":
            payload["report"] = job.report
        if job.status == "failed":
            payload["error"] = job.error
        return payload

    return app
