"""Dose retainment probabilities and early-completion decision tables.

The retainment probability is the beta-binomial predictive probability
that, after the remaining patients are treated at the current dose, the
DLT total still lands in the retainment set.  The isotonic variant swaps
the observed DLT count for n times the isotonic-adjusted rate, which is
why the pmf accepts non-integer event counts (gamma-generalized binomial
coefficient).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .design import (
    Decision,
    DesignParams,
    ParameterError,
    RetainmentSet,
    decision_set,
    retainment_set,
)
from .isotonic import Direction, pava_1d


class CompletionVariant(str, Enum):
    OFF = "off"
    DRP = "drp"
    DRP_I = "drp-i"


class BoundaryStatus(str, Enum):
    INTERIOR = "interior"
    MAX_COMBINATION = "max"
    MIN_COMBINATION = "min"


@dataclass(frozen=True)
class CompletionConfig:
    variant: CompletionVariant = CompletionVariant.OFF
    tau: float = 0.4
    runtime_smoothing: bool = False
    cohort_size: int = 3

    def __post_init__(self):
        if not 0 < self.tau:
            raise ParameterError("tau must be positive")
        if self.cohort_size < 1:
            raise ParameterError("cohort_size must be >= 1")


def _lbeta(a: float, b: float) -> float:
    return math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)


def beta_binom_pmf(k: float, n_trials: int, a: float, b: float) -> float:
    """Beta-binomial mass at k events in n_trials, allowing real k.

    Mass outside the support [0, n_trials] is 0.
    """
    if a <= 0 or b <= 0:
        raise ParameterError("beta parameters must be positive")
    eps = 1e-12
    if k < -eps or k > n_trials + eps:
        return 0.0
    k = min(max(k, 0.0), float(n_trials))
    if n_trials == 0:
        return 1.0
    log_choose = (
        math.lgamma(n_trials + 1) - math.lgamma(k + 1) - math.lgamma(n_trials - k + 1)
    )
    return math.exp(log_choose + _lbeta(k + a, n_trials - k + b) - _lbeta(a, b))


def _augmented_set(
    R: RetainmentSet, status: BoundaryStatus, params: DesignParams
) -> tuple[int, ...]:
    members = set(R.members)
    if status is BoundaryStatus.MAX_COMBINATION:
        members |= set(decision_set(params, R.total_n, Decision.ESCALATE))
    elif status is BoundaryStatus.MIN_COMBINATION:
        members |= set(decision_set(params, R.total_n, Decision.DE_ESCALATE))
    return tuple(sorted(members))


def drp(
    n: int,
    m_eff: float,
    l: int,
    R: RetainmentSet,
    status: BoundaryStatus = BoundaryStatus.INTERIOR,
    params: DesignParams | None = None,
) -> float:
    """Dose retainment probability for m_eff DLTs in n patients with l
    remaining.

    R must be the retainment set at n + l patients.  At a boundary dose
    the set is augmented with the escalation (max) or de-escalation (min)
    totals and the result is halved.
    """
    if l < 0:
        raise ParameterError("l must be >= 0")
    if not 0 <= m_eff <= n:
        raise ParameterError(f"m_eff must lie in [0, n], got {m_eff}")
    if R.total_n != n + l:
        raise ParameterError(
            f"retainment set computed for {R.total_n} patients, expected {n + l}"
        )
    if status is not BoundaryStatus.INTERIOR:
        if params is None:
            raise ParameterError("boundary status requires design params")
        members = _augmented_set(R, status, params)
    else:
        members = R.members
    total = sum(
        beta_binom_pmf(r - m_eff, l, m_eff + 1, n - m_eff + 1) for r in members
    )
    if status is not BoundaryStatus.INTERIOR:
        total /= 2.0
    return total


def drp_i(
    n: int,
    m: int,
    l: int,
    adjusted_rate: float,
    R: RetainmentSet,
    status: BoundaryStatus = BoundaryStatus.INTERIOR,
    params: DesignParams | None = None,
) -> float:
    """Retainment probability with m replaced by n * adjusted_rate."""
    return drp(n, n * adjusted_rate, l, R, status, params)


@dataclass(frozen=True)
class CompletionRow:
    n: int
    m: int
    max_l: int | None  # largest cohort-grid remainder that qualifies
    sub_cohort_only: bool  # only remainders below one cohort qualify
    l_grid: tuple[int, ...]
    drp_raw: tuple[float, ...]
    drp_smoothed: tuple[float, ...]


def drp_sequence(
    params: DesignParams, n: int, m_eff: float, l_grid, status=BoundaryStatus.INTERIOR
) -> list[float]:
    return [
        drp(n, m_eff, l, retainment_set(params, n + l), status, params) for l in l_grid
    ]


def smoothed_drp(
    params: DesignParams,
    n: int,
    m_eff: float,
    l: int,
    N: int,
    cohort_size: int,
    status=BoundaryStatus.INTERIOR,
) -> float:
    """PAVA-smoothed retainment probability at remainder l.

    Smoothing runs over the cohort grid of remainders 0..N-n; l is
    snapped to its grid position (it is always on the grid in conduct).
    """
    grid = list(range(0, N - n + 1, cohort_size))
    if l not in grid:
        grid = sorted(set(grid) | {l})
    seq = drp_sequence(params, n, m_eff, grid, status)
    smooth = pava_1d(seq, direction=Direction.NON_INCREASING)
    return float(smooth[grid.index(l)])


def completion_table(
    params: DesignParams,
    N: int,
    config: CompletionConfig,
    n_grid: list[int] | None = None,
) -> list[CompletionRow]:
    """Pre-trial early-completion table.

    For each (n, m) with a Retain decision, the retainment probability is
    computed over cohort-sized remainders l in {0, c, 2c, ..., N-n},
    smoothed to be non-increasing in l by PAVA, and the largest qualifying
    l (smoothed value >= tau) is reported.  When only l = 0 qualifies the
    row is flagged sub-cohort-only: any remainder below one full cohort
    still qualifies.
    """
    c = config.cohort_size
    if N % c != 0:
        raise ParameterError("N must be a multiple of cohort_size")
    if n_grid is None:
        n_grid = list(range(c, N + 1, c))
    rows = []
    for n in n_grid:
        for m in retainment_set(params, n).members:
            l_grid = tuple(range(0, N - n + 1, c))
            raw = drp_sequence(params, n, m, l_grid)
            smooth = pava_1d(raw, direction=Direction.NON_INCREASING)
            qualifying = [l for l, v in zip(l_grid, smooth) if v >= config.tau]
            max_l = max(qualifying) if qualifying else None
            sub_only = max_l is not None and max_l < c
            rows.append(
                CompletionRow(
                    n=n,
                    m=m,
                    max_l=max_l,
                    sub_cohort_only=sub_only,
                    l_grid=l_grid,
                    drp_raw=tuple(raw),
                    drp_smoothed=tuple(float(v) for v in smooth),
                )
            )
    return rows


def format_completion_table(rows: list[CompletionRow], cohort_size: int) -> str:
    """Aligned text rendering, grouping contiguous m at equal max_l."""
    lines = [f"{'#Patients':>9}  {'#DLTs':>6}  #Remaining"]
    grouped: dict[tuple[int, int | None, bool], list[int]] = {}
    order = []
    for row in rows:
        key = (row.n, row.max_l, row.sub_cohort_only)
        if key not in grouped:
            grouped[key] = []
            order.append(key)
        grouped[key].append(row.m)
    for n, max_l, sub_only in order:
        ms = grouped[(n, max_l, sub_only)]
        m_txt = str(ms[0]) if len(ms) == 1 else f"{min(ms)}-{max(ms)}"
        if max_l is None:
            l_txt = "never"
        elif sub_only:
            l_txt = f"<= {cohort_size - 1}"
        else:
            l_txt = f"<= {max_l}"
        lines.append(f"{n:>9}  {m_txt:>6}  {l_txt}")
    return "\n".join(lines)
