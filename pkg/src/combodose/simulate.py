"""Monte Carlo operating characteristics.

Every replication gets its own seed derived from (base_seed, scenario
index, design index, replication index) through numpy's SeedSequence, so
results are identical regardless of worker count or scheduling.
"""

from __future__ import annotations

import io
import csv
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .completion import CompletionConfig, CompletionVariant
from .design import DesignParams, ParameterError
from .engine import TrialState, TrialStatus, apply_cohort, select_mtd


@dataclass(frozen=True)
class Scenario:
    name: str
    true_p: tuple[tuple[float, ...], ...]
    retainment_favorable: bool = False

    def __post_init__(self):
        arr = np.asarray(self.true_p, dtype=float)
        if arr.ndim != 2:
            raise ParameterError("true_p must be a 2-D matrix")
        if np.any(arr < 0) or np.any(arr > 1):
            raise ParameterError("true DLT rates must lie in [0,1]")

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.true_p), len(self.true_p[0]))

    def rate(self, dose: tuple[int, int]) -> float:
        return self.true_p[dose[0]][dose[1]]

    def is_monotone(self) -> bool:
        arr = np.asarray(self.true_p)
        return bool(
            np.all(np.diff(arr, axis=0) >= 0) and np.all(np.diff(arr, axis=1) >= 0)
        )

    def true_mtd_set(self, phi: float) -> set[tuple[int, int]]:
        arr = np.asarray(self.true_p, dtype=float)
        dist = np.abs(arr - phi)
        best = dist.min()
        return {
            (int(j), int(k)) for j, k in np.argwhere(dist <= best + 1e-12)
        }


@dataclass(frozen=True)
class DesignArm:
    label: str
    params: DesignParams
    completion: CompletionConfig


@dataclass(frozen=True)
class SimConfig:
    designs: tuple[DesignArm, ...]
    N: int
    cohort_size: int = 3
    replications: int = 1000
    base_seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.replications < 1:
            raise ParameterError("replications must be >= 1")
        if self.N % self.cohort_size != 0:
            raise ParameterError("N must be a multiple of cohort_size")


@dataclass(frozen=True)
class Metrics:
    pcms: float
    lower_pct: float
    higher_pct: float
    other_pct: float
    no_mtd_pct: float
    mean_patients: float
    patient_change_pct: float
    early_completion_pct: float


def run_trial(
    scenario: Scenario,
    params: DesignParams,
    completion: CompletionConfig,
    N: int,
    cohort_size: int,
    seed,
) -> tuple[TrialState, tuple[int, int] | None]:
    """Simulate one trial to termination; returns (state, selected MTD)."""
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    completion = CompletionConfig(
        variant=completion.variant,
        tau=completion.tau,
        runtime_smoothing=completion.runtime_smoothing,
        cohort_size=cohort_size,
    )
    J, K = scenario.shape
    state = TrialState.new(J, K)
    while state.status is TrialStatus.ONGOING:
        p = scenario.rate(state.current)
        dlt = int(rng.binomial(cohort_size, p))
        state = apply_cohort(state, dlt, params, completion, N, rng)
    mtd = select_mtd(state, params, rng)
    return state, mtd


def _replicate(args):
    scenario, arm, N, cohort_size, base_seed, si, di, rep = args
    seed = (base_seed, si, di, rep)
    state, mtd = run_trial(scenario, arm.params, arm.completion, N, cohort_size, seed)
    return {
        "rep": rep,
        "selected": mtd,
        "enrolled": state.enrolled,
        "early": state.status is TrialStatus.COMPLETED_EARLY,
    }


def _aggregate(scenario: Scenario, phi: float, N: int, records: list[dict]) -> Metrics:
    mtd_set = scenario.true_mtd_set(phi)
    set_rates = [scenario.rate(d) for d in mtd_set]
    lo, hi = min(set_rates), max(set_rates)
    total = len(records)
    correct = lower = higher = other = none = 0
    for rec in records:
        sel = rec["selected"]
        if sel is None:
            none += 1
        elif sel in mtd_set:
            correct += 1
        elif scenario.rate(sel) < lo:
            lower += 1
        elif scenario.rate(sel) > hi:
            higher += 1
        else:
            other += 1
    mean_patients = sum(r["enrolled"] for r in records) / total
    return Metrics(
        pcms=100.0 * correct / total,
        lower_pct=100.0 * lower / total,
        higher_pct=100.0 * higher / total,
        other_pct=100.0 * other / total,
        no_mtd_pct=100.0 * none / total,
        mean_patients=mean_patients,
        patient_change_pct=100.0 * (mean_patients - N) / N,
        early_completion_pct=100.0 * sum(r["early"] for r in records) / total,
    )


def simulate(
    scenarios: list[Scenario], config: SimConfig
) -> list[tuple[str, str, Metrics]]:
    """Metrics per (scenario, design arm); deterministic in base_seed."""
    tasks = []
    for si, scenario in enumerate(scenarios):
        for di, arm in enumerate(config.designs):
            for rep in range(config.replications):
                tasks.append(
                    (
                        scenario,
                        arm,
                        config.N,
                        config.cohort_size,
                        config.base_seed,
                        si,
                        di,
                        rep,
                    )
                )
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(_replicate, tasks, chunksize=64))
    else:
        results = [_replicate(t) for t in tasks]

    rows = []
    idx = 0
    for si, scenario in enumerate(scenarios):
        for di, arm in enumerate(config.designs):
            records = results[idx : idx + config.replications]
            idx += config.replications
            metrics = _aggregate(scenario, arm.params.phi, config.N, records)
            rows.append((scenario.name, arm.label, metrics))
    return rows


CSV_FIELDS = [
    "scenario",
    "design",
    "pcms",
    "lower_pct",
    "higher_pct",
    "other_pct",
    "no_mtd_pct",
    "mean_patients",
    "patient_change_pct",
    "early_completion_pct",
]


def metrics_to_csv(rows: list[tuple[str, str, Metrics]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for scenario, design, m in rows:
        writer.writerow(
            [scenario, design]
            + [
                f"{getattr(m, f):.6f}"
                for f in CSV_FIELDS[2:]
            ]
        )
    return buf.getvalue()


def metrics_to_records(rows: list[tuple[str, str, Metrics]]) -> list[dict]:
    out = []
    for scenario, design, m in rows:
        rec = {"scenario": scenario, "design": design}
        rec.update({f: getattr(m, f) for f in CSV_FIELDS[2:]})
        out.append(rec)
    return out
