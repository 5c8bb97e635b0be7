"""Combination-trial state machine.

States are values: every transition copies and returns a new TrialState,
with an append-only event log carrying monotone sequence numbers.  All
randomness (tie breaks) flows through the caller-supplied generator so a
fixed seed replays a trial exactly.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .completion import (
    BoundaryStatus,
    CompletionConfig,
    CompletionVariant,
    drp,
    smoothed_drp,
)
from .design import (
    Decision,
    DesignParams,
    ParameterError,
    decide,
    eliminate_test,
    interval_posterior_prob,
    retainment_set,
)
from .isotonic import bivariate_isotonic

SCHEMA_VERSION = 1


class TrialStatus(str, Enum):
    ONGOING = "ongoing"
    COMPLETED_FULL = "completed-full"
    COMPLETED_EARLY = "completed-early"
    TERMINATED_SAFETY = "terminated-safety"


class StateError(RuntimeError):
    pass


@dataclass
class TrialState:
    J: int
    K: int
    n: np.ndarray
    m: np.ndarray
    current: tuple[int, int]  # zero-based (j, k)
    eliminated: set = field(default_factory=set)
    enrolled: int = 0
    status: TrialStatus = TrialStatus.ONGOING
    log: list = field(default_factory=list)

    @classmethod
    def new(cls, J: int, K: int) -> "TrialState":
        if J < 1 or K < 1:
            raise ParameterError("grid dimensions must be >= 1")
        return cls(
            J=J,
            K=K,
            n=np.zeros((J, K), dtype=int),
            m=np.zeros((J, K), dtype=int),
            current=(0, 0),
        )

    def clone(self) -> "TrialState":
        return TrialState(
            J=self.J,
            K=self.K,
            n=self.n.copy(),
            m=self.m.copy(),
            current=self.current,
            eliminated=set(self.eliminated),
            enrolled=self.enrolled,
            status=self.status,
            log=copy.deepcopy(self.log),
        )

    def append_event(self, kind: str, **payload):
        self.log.append({"seq": len(self.log), "event": kind, **payload})

    def tried_mask(self) -> np.ndarray:
        return self.n > 0

    def admissible(self, dose: tuple[int, int]) -> bool:
        j, k = dose
        return 0 <= j < self.J and 0 <= k < self.K and dose not in self.eliminated


def _escalation_candidates(state: TrialState) -> list[tuple[int, int]]:
    j, k = state.current
    return [d for d in [(j + 1, k), (j, k + 1)] if state.admissible(d)]


def _de_escalation_candidates(state: TrialState) -> list[tuple[int, int]]:
    j, k = state.current
    return [d for d in [(j - 1, k), (j, k - 1)] if state.admissible(d)]


def boundary_status(state: TrialState) -> BoundaryStatus:
    """Max/min combination relative to the admissible (post-elimination)
    grid; interior when moves exist in both directions."""
    if not _escalation_candidates(state):
        return BoundaryStatus.MAX_COMBINATION
    if not _de_escalation_candidates(state):
        return BoundaryStatus.MIN_COMBINATION
    return BoundaryStatus.INTERIOR


def _score(state: TrialState, dose: tuple[int, int], params: DesignParams) -> float:
    n = int(state.n[dose])
    m = int(state.m[dose])
    # an untried candidate is scored with the prior (n = 0, m = 0)
    return interval_posterior_prob(n, m, params.proper_interval(), params.prior)


def _pick(
    state: TrialState,
    candidates: list[tuple[int, int]],
    params: DesignParams,
    rng: np.random.Generator,
) -> tuple[int, int] | None:
    if not candidates:
        return None
    scores = [_score(state, d, params) for d in candidates]
    best = max(scores)
    top = [d for d, s in zip(candidates, scores) if s == best]
    if len(top) == 1:
        return top[0]
    return top[int(rng.integers(len(top)))]


def next_dose(
    state: TrialState,
    decision: Decision,
    params: DesignParams,
    rng: np.random.Generator,
) -> tuple[int, int]:
    if decision is Decision.RETAIN:
        return state.current
    if decision is Decision.ESCALATE:
        picked = _pick(state, _escalation_candidates(state), params, rng)
    else:
        picked = _pick(state, _de_escalation_candidates(state), params, rng)
    return state.current if picked is None else picked


def adjusted_rates(state: TrialState, params: DesignParams) -> np.ndarray:
    """Bivariate-isotonic DLT rates over tried, non-eliminated doses."""
    mask = state.tried_mask()
    for dose in state.eliminated:
        mask[dose] = False
    rates = np.zeros_like(state.n, dtype=float)
    np.divide(state.m, state.n, out=rates, where=state.n > 0)
    return bivariate_isotonic(rates, state.n, mask)


def evaluate_completion(
    state: TrialState,
    params: DesignParams,
    config: CompletionConfig,
    n_max: int,
) -> dict | None:
    """Early-completion check at the current dose; None when variant off
    or no patients remain."""
    if config.variant is CompletionVariant.OFF:
        return None
    l = n_max - state.enrolled
    if l <= 0:
        return None
    cur = state.current
    n = int(state.n[cur])
    m = int(state.m[cur])
    status = boundary_status(state)
    if config.variant is CompletionVariant.DRP_I:
        m_eff = n * float(adjusted_rates(state, params)[cur])
    else:
        m_eff = float(m)
    if config.runtime_smoothing:
        value = smoothed_drp(params, n, m_eff, l, n_max, config.cohort_size, status)
    else:
        value = drp(n, m_eff, l, retainment_set(params, n + l), status, params)
    return {
        "variant": config.variant.value,
        "m_eff": m_eff,
        "remaining": l,
        "boundary": status.value,
        "value": value,
        "halt": value >= config.tau,
    }


def _eliminate_cone(state: TrialState, dose: tuple[int, int]):
    j0, k0 = dose
    cone = [
        (j, k)
        for j in range(j0, state.J)
        for k in range(k0, state.K)
        if (j, k) not in state.eliminated
    ]
    state.eliminated.update(cone)
    state.append_event("elimination", dose=list(dose), cone=[list(d) for d in cone])


def apply_cohort(
    state: TrialState,
    dlt_count: int,
    params: DesignParams,
    config: CompletionConfig,
    n_max: int,
    rng: np.random.Generator,
) -> TrialState:
    """Record one cohort at the current dose and advance the trial."""
    if state.status is not TrialStatus.ONGOING:
        raise StateError(f"trial is {state.status.value}, cannot enroll")
    c = config.cohort_size
    if not 0 <= dlt_count <= c:
        raise ParameterError(f"dlt_count must be in [0, {c}]")
    if state.enrolled + c > n_max:
        raise StateError("cohort would exceed the planned sample size")

    s = state.clone()
    cur = s.current
    s.n[cur] += c
    s.m[cur] += dlt_count
    s.enrolled += c
    s.append_event(
        "cohort",
        dose=list(cur),
        dlt_count=dlt_count,
        n=int(s.n[cur]),
        m=int(s.m[cur]),
        enrolled=s.enrolled,
    )

    if eliminate_test(params, int(s.n[cur]), int(s.m[cur])):
        _eliminate_cone(s, cur)
        if (0, 0) in s.eliminated:
            s.status = TrialStatus.TERMINATED_SAFETY
            s.append_event("status", status=s.status.value)
            return s

    if cur in s.eliminated:
        # current dose just removed: relocate to the best admissible
        # de-escalation candidate
        relocated = _pick(s, _de_escalation_candidates(s), params, rng)
        if relocated is None:
            s.status = TrialStatus.TERMINATED_SAFETY
            s.append_event("status", status=s.status.value)
            return s
        s.current = relocated
        s.append_event("decision", decision="forced-de-escalate", next=list(relocated))
        if s.enrolled >= n_max:
            s.status = TrialStatus.COMPLETED_FULL
            s.append_event("status", status=s.status.value)
        return s

    if s.enrolled >= n_max:
        s.status = TrialStatus.COMPLETED_FULL
        s.append_event("status", status=s.status.value)
        return s

    check = evaluate_completion(s, params, config, n_max)
    if check is not None:
        s.append_event("drp", **check)
        if check["halt"]:
            s.status = TrialStatus.COMPLETED_EARLY
            s.append_event("status", status=s.status.value)
            return s

    decision = decide(params, int(s.n[cur]), int(s.m[cur]))
    nxt = next_dose(s, decision, params, rng)
    s.append_event("decision", decision=decision.value, next=list(nxt))
    s.current = nxt
    return s


def _maximal(doses: list[tuple[int, int]]) -> tuple[int, int]:
    top = [
        d
        for d in doses
        if not any(e != d and e[0] >= d[0] and e[1] >= d[1] for e in doses)
    ]
    return max(top)


def _minimal(doses: list[tuple[int, int]]) -> tuple[int, int]:
    low = [
        d
        for d in doses
        if not any(e != d and e[0] <= d[0] and e[1] <= d[1] for e in doses)
    ]
    return min(low)


def select_mtd(
    state: TrialState,
    params: DesignParams,
    rng: np.random.Generator,
) -> tuple[int, int] | None:
    """MTD from isotonic-adjusted rates; None when no dose is selectable."""
    if state.status is TrialStatus.ONGOING:
        raise StateError("trial is still ongoing")
    if state.status is TrialStatus.TERMINATED_SAFETY:
        return None
    mask = state.tried_mask()
    for dose in state.eliminated:
        mask[dose] = False
    if not mask.any():
        return None
    adjusted = adjusted_rates(state, params)
    doses = [(int(j), int(k)) for j, k in np.argwhere(mask)]
    dist = {d: abs(float(adjusted[d]) - params.phi) for d in doses}
    best = min(dist.values())
    candidates = [d for d in doses if dist[d] <= best + 1e-12]
    if len(candidates) == 1:
        return candidates[0]
    below = [d for d in candidates if float(adjusted[d]) <= params.phi]
    above = [d for d in candidates if float(adjusted[d]) > params.phi]
    if not above:
        return _maximal(below)
    if not below:
        return _minimal(above)
    pair = [_maximal(below), _minimal(above)]
    return pair[int(rng.integers(2))]


def state_to_dict(state: TrialState) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "grid": {"J": state.J, "K": state.K},
        "n": state.n.tolist(),
        "m": state.m.tolist(),
        "current": list(state.current),
        "eliminated": sorted([list(d) for d in state.eliminated]),
        "enrolled": state.enrolled,
        "status": state.status.value,
        "log": state.log,
    }


def state_from_dict(doc: dict) -> TrialState:
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise ParameterError(f"unsupported schema version {doc.get('schema_version')}")
    J, K = doc["grid"]["J"], doc["grid"]["K"]
    state = TrialState(
        J=J,
        K=K,
        n=np.asarray(doc["n"], dtype=int),
        m=np.asarray(doc["m"], dtype=int),
        current=tuple(doc["current"]),
        eliminated={tuple(d) for d in doc["eliminated"]},
        enrolled=doc["enrolled"],
        status=TrialStatus(doc["status"]),
        log=list(doc["log"]),
    )
    if state.n.shape != (J, K) or state.m.shape != (J, K):
        raise ParameterError("count matrices do not match the grid")
    return state
