"""JSON-over-HTTP service for trial conduct, tables, and simulation jobs.

Each trial keeps an append-only JSON-lines event log on disk; replaying
the logged cohort entries with the trial's seed reconstructs the exact
state (all randomness flows from one per-trial stream).  A snapshot of
the final state is written when a trial leaves the Ongoing status.
Mutations are serialized per trial and guarded by an optimistic revision
counter.
"""

from __future__ import annotations

import json
import threading
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import engine
from .completion import (
    BoundaryStatus,
    CompletionConfig,
    CompletionVariant,
    completion_table,
    drp as drp_value,
    drp_i as drp_i_value,
)
from .design import (
    DesignKind,
    DesignParams,
    ParameterError,
    decision_table,
    retainment_set,
)
from .engine import StateError, TrialState, TrialStatus, apply_cohort, select_mtd
from .scenarios import all_builtin_scenarios, builtin_scenarios, scenario_from_dict
from .simulate import DesignArm, SimConfig, metrics_to_records, simulate

SCHEMA_VERSION = engine.SCHEMA_VERSION


class TrialCreate(BaseModel):
    design: DesignKind = DesignKind.BOIN
    phi: float = 0.3
    phi1: float | None = None
    phi2: float | None = None
    variant: CompletionVariant = CompletionVariant.OFF
    tau: float = 0.4
    runtime_smoothing: bool = False
    N: int = Field(gt=0)
    cohort_size: int = Field(default=3, gt=0)
    J: int = Field(gt=0)
    K: int = Field(gt=0)
    seed: int = 0


class CohortBody(BaseModel):
    dlt_count: int = Field(ge=0)
    revision: int | None = None


class SimulateBody(BaseModel):
    design: DesignKind = DesignKind.BOIN
    phi: float = 0.3
    ec: CompletionVariant = CompletionVariant.OFF
    tau: float = 0.4
    N: int = 45
    cohort_size: int = 3
    replications: int = 100
    seed: int = 42
    grid: str = "3x4"
    scenarios: list[dict] | None = None


@dataclass
class TrialRecord:
    id: str
    config: TrialCreate
    params: DesignParams
    completion: CompletionConfig
    state: TrialState
    rng: np.random.Generator
    revision: int = 0
    lock: threading.Lock = field(default_factory=threading.Lock)


class TrialStore:
    def __init__(self, data_dir: Path):
        self.data_dir = Path(data_dir)
        self.trials_dir = self.data_dir / "trials"
        self.trials_dir.mkdir(parents=True, exist_ok=True)
        self._trials: dict[str, TrialRecord] = {}
        self._load()

    def _log_path(self, trial_id: str) -> Path:
        return self.trials_dir / f"{trial_id}.jsonl"

    def _snapshot_path(self, trial_id: str) -> Path:
        return self.trials_dir / f"{trial_id}.json"

    def _append(self, trial_id: str, event: dict):
        with open(self._log_path(trial_id), "a") as fh:
            fh.write(json.dumps(event) + "\n")

    def _load(self):
        for path in sorted(self.trials_dir.glob("*.jsonl")):
            lines = [json.loads(ln) for ln in path.read_text().splitlines() if ln]
            if not lines or lines[0].get("event") != "created":
                continue
            config = TrialCreate(**lines[0]["config"])
            record = self._new_record(lines[0]["id"], config)
            for entry in lines[1:]:
                if entry["event"] == "cohort":
                    record.state = apply_cohort(
                        record.state,
                        entry["dlt_count"],
                        record.params,
                        record.completion,
                        config.N,
                        record.rng,
                    )
                    record.revision += 1
            self._trials[record.id] = record

    def _new_record(self, trial_id: str, config: TrialCreate) -> TrialRecord:
        params = DesignParams(
            kind=config.design, phi=config.phi, phi1=config.phi1, phi2=config.phi2
        )
        completion = CompletionConfig(
            variant=config.variant,
            tau=config.tau,
            runtime_smoothing=config.runtime_smoothing,
            cohort_size=config.cohort_size,
        )
        return TrialRecord(
            id=trial_id,
            config=config,
            params=params,
            completion=completion,
            state=TrialState.new(config.J, config.K),
            rng=np.random.default_rng(config.seed),
        )

    def create(self, config: TrialCreate) -> TrialRecord:
        if config.N % config.cohort_size != 0:
            raise ParameterError("N must be a multiple of cohort_size")
        trial_id = uuid.uuid4().hex[:12]
        record = self._new_record(trial_id, config)
        self._trials[trial_id] = record
        self._append(
            trial_id,
            {"event": "created", "id": trial_id, "config": config.model_dump()},
        )
        return record

    def get(self, trial_id: str) -> TrialRecord:
        record = self._trials.get(trial_id)
        if record is None:
            raise HTTPException(status_code=404, detail=f"unknown trial {trial_id!r}")
        return record

    def record_cohort(self, record: TrialRecord, dlt_count: int):
        self._append(
            record.id,
            {"event": "cohort", "dlt_count": dlt_count, "revision": record.revision},
        )
        if record.state.status is not TrialStatus.ONGOING:
            self._snapshot_path(record.id).write_text(
                json.dumps(engine.state_to_dict(record.state), indent=2)
            )


def _record_payload(record: TrialRecord) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "id": record.id,
        "revision": record.revision,
        "config": record.config.model_dump(),
        "state": engine.state_to_dict(record.state),
    }


def create_app(data_dir="./combodose-data") -> FastAPI:
    app = FastAPI(title="combodose", version="0.1.0")
    store = TrialStore(Path(data_dir))
    jobs: dict[str, dict] = {}
    jobs_lock = threading.Lock()
    pool = ThreadPoolExecutor(max_workers=2)

    @app.exception_handler(ParameterError)
    async def _param_error(request, exc):
        from fastapi.responses import JSONResponse

        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.exception_handler(StateError)
    async def _state_error(request, exc):
        from fastapi.responses import JSONResponse

        return JSONResponse(status_code=409, content={"detail": str(exc)})

    @app.post("/trials", status_code=201)
    def create_trial(body: TrialCreate):
        record = store.create(body)
        return _record_payload(record)

    @app.get("/trials/{trial_id}")
    def get_trial(trial_id: str):
        return _record_payload(store.get(trial_id))

    @app.post("/trials/{trial_id}/cohorts")
    def post_cohort(trial_id: str, body: CohortBody):
        record = store.get(trial_id)
        with record.lock:
            if body.revision is not None and body.revision != record.revision:
                raise HTTPException(
                    status_code=409,
                    detail=f"revision conflict: trial is at {record.revision}",
                )
            if body.dlt_count > record.completion.cohort_size:
                raise HTTPException(
                    status_code=422,
                    detail="dlt_count exceeds the cohort size",
                )
            prev_len = len(record.state.log)
            record.state = apply_cohort(
                record.state,
                body.dlt_count,
                record.params,
                record.completion,
                record.config.N,
                record.rng,
            )
            record.revision += 1
            store.record_cohort(record, body.dlt_count)
            new_events = record.state.log[prev_len:]
        drp_event = next((e for e in new_events if e["event"] == "drp"), None)
        decision_event = next(
            (e for e in new_events if e["event"] == "decision"), None
        )
        payload = _record_payload(record)
        payload.update(
            {
                "decision": decision_event["decision"] if decision_event else None,
                "next_dose": decision_event["next"]
                if decision_event
                else list(record.state.current),
                "drp": drp_event["value"] if drp_event else None,
                "drp_variant": drp_event["variant"] if drp_event else None,
                "events": new_events,
            }
        )
        return payload

    @app.get("/trials/{trial_id}/rates")
    def get_rates(trial_id: str):
        """Raw and isotonic-adjusted DLT rates per dose (null where untried)."""
        record = store.get(trial_id)
        state = record.state
        raw = np.divide(
            state.m,
            state.n,
            out=np.full(state.n.shape, np.nan),
            where=state.n > 0,
        )
        if np.any(state.n > 0):
            adjusted = engine.adjusted_rates(state, record.params)
        else:
            adjusted = np.full(state.n.shape, np.nan)

        def clean(matrix):
            return [
                [float(x) if np.isfinite(x) else None for x in row]
                for row in matrix
            ]

        return {
            "schema_version": SCHEMA_VERSION,
            "id": record.id,
            "revision": record.revision,
            "raw": clean(raw),
            "adjusted": clean(adjusted),
        }

    @app.get("/trials/{trial_id}/mtd")
    def get_mtd(trial_id: str):
        record = store.get(trial_id)
        mtd = select_mtd(record.state, record.params, record.rng)
        return {
            "schema_version": SCHEMA_VERSION,
            "id": record.id,
            "mtd": None if mtd is None else list(mtd),
        }

    @app.get("/trials/{trial_id}/whatif")
    def get_whatif(trial_id: str):
        """DRP after each hypothetical outcome of the next cohort."""
        record = store.get(trial_id)
        state = record.state
        if state.status is not TrialStatus.ONGOING:
            raise HTTPException(status_code=409, detail="trial is not ongoing")
        results = []
        for dlt in range(record.completion.cohort_size + 1):
            hypo = state.clone()
            cur = hypo.current
            hypo.n[cur] += record.completion.cohort_size
            hypo.m[cur] += dlt
            hypo.enrolled += record.completion.cohort_size
            check = engine.evaluate_completion(
                hypo, record.params, record.completion, record.config.N
            )
            results.append({"dlt_count": dlt, "check": check})
        return {"schema_version": SCHEMA_VERSION, "id": record.id, "whatif": results}

    @app.get("/tables/retainment")
    def retainment_table(
        design: DesignKind = DesignKind.BOIN,
        phi: float = 0.3,
        n_max: int = 18,
        cohort: int = 3,
    ):
        params = DesignParams(kind=design, phi=phi)
        grid = list(range(cohort, n_max + 1, cohort))
        rows = decision_table(params, grid)
        return {
            "schema_version": SCHEMA_VERSION,
            "design": design.value,
            "phi": phi,
            "rows": [{"n": r.total_n, "retain": list(r.members)} for r in rows],
        }

    @app.get("/tables/early-completion")
    def early_completion_table(
        design: DesignKind = DesignKind.BOIN,
        phi: float = 0.3,
        N: int = 36,
        tau: float = 0.4,
        cohort: int = 3,
    ):
        params = DesignParams(kind=design, phi=phi)
        config = CompletionConfig(
            variant=CompletionVariant.DRP, tau=tau, cohort_size=cohort
        )
        rows = completion_table(params, N, config)
        return {
            "schema_version": SCHEMA_VERSION,
            "design": design.value,
            "phi": phi,
            "N": N,
            "tau": tau,
            "rows": [
                {
                    "n": r.n,
                    "m": r.m,
                    "max_l": r.max_l,
                    "sub_cohort_only": r.sub_cohort_only,
                }
                for r in rows
            ],
        }

    @app.get("/drp")
    def drp_endpoint(
        design: DesignKind = DesignKind.BOIN,
        phi: float = 0.3,
        n: int = 0,
        m: float = 0,
        l: int = 0,
        isotonic_rate: float | None = None,
        boundary: str | None = None,
    ):
        params = DesignParams(kind=design, phi=phi)
        status = BoundaryStatus(boundary) if boundary else BoundaryStatus.INTERIOR
        R = retainment_set(params, n + l)
        if isotonic_rate is None:
            value = drp_value(n, m, l, R, status, params)
        else:
            value = drp_i_value(n, int(m), l, isotonic_rate, R, status, params)
        return {
            "schema_version": SCHEMA_VERSION,
            "value": value,
            "retainment_set": list(R.members),
        }

    def _run_job(job_id: str, body: SimulateBody):
        try:
            if body.scenarios:
                scenario_list = [scenario_from_dict(d) for d in body.scenarios]
            elif body.grid == "all":
                scenario_list = all_builtin_scenarios()
            else:
                scenario_list = builtin_scenarios(body.grid)
            params = DesignParams(kind=body.design, phi=body.phi)
            arm = DesignArm(
                label=body.design.value
                + ("" if body.ec is CompletionVariant.OFF else f"-{body.ec.value}"),
                params=params,
                completion=CompletionConfig(
                    variant=body.ec, tau=body.tau, cohort_size=body.cohort_size
                ),
            )
            config = SimConfig(
                designs=(arm,),
                N=body.N,
                cohort_size=body.cohort_size,
                replications=body.replications,
                base_seed=body.seed,
            )
            rows = simulate(scenario_list, config)
            with jobs_lock:
                jobs[job_id].update(
                    {"status": "done", "result": metrics_to_records(rows)}
                )
        except Exception as exc:  # pragma: no cover - surfaced via job status
            with jobs_lock:
                jobs[job_id].update({"status": "failed", "error": str(exc)})

    @app.post("/simulate", status_code=202)
    def submit_simulation(body: SimulateBody):
        job_id = uuid.uuid4().hex[:12]
        with jobs_lock:
            jobs[job_id] = {"status": "running"}
        pool.submit(_run_job, job_id, body)
        return {"schema_version": SCHEMA_VERSION, "job_id": job_id}

    @app.get("/jobs/{job_id}")
    def get_job(job_id: str):
        with jobs_lock:
            job = jobs.get(job_id)
            if job is None:
                raise HTTPException(status_code=404, detail=f"unknown job {job_id!r}")
            return {"schema_version": SCHEMA_VERSION, "job_id": job_id, **job}

    return app
