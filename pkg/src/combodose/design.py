"""Interval-design decision rules for BOIN and Keyboard.

All decisions reduce to comparing the data at the current dose against
fixed probability boundaries (BOIN) or posterior key masses (Keyboard),
so everything here is a pure function of (params, n, m) and is cached.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache

from scipy.special import betainc


class DesignKind(str, Enum):
    BOIN = "boin"
    KEYBOARD = "keyboard"


class Decision(str, Enum):
    ESCALATE = "escalate"
    RETAIN = "retain"
    DE_ESCALATE = "de-escalate"


class ParameterError(ValueError):
    pass


@dataclass(frozen=True)
class DesignParams:
    """Design configuration.

    phi is the target toxicity level.  phi1/phi2 default to the standard
    BOIN choices 0.6*phi and 1.4*phi; key_width is the Keyboard key width
    (the target key is (phi - key_width/2, phi + key_width/2)).
    """

    kind: DesignKind = DesignKind.BOIN
    phi: float = 0.3
    phi1: float | None = None
    phi2: float | None = None
    key_width: float = 0.1
    elim_cutoff: float = 0.95
    prior_a: float = 1.0
    prior_b: float = 1.0

    def __post_init__(self):
        if not 0 < self.phi < 1:
            raise ParameterError(f"phi must be in (0,1), got {self.phi}")
        if self.phi1 is None:
            object.__setattr__(self, "phi1", 0.6 * self.phi)
        if self.phi2 is None:
            object.__setattr__(self, "phi2", 1.4 * self.phi)
        if not 0 < self.phi1 < self.phi < self.phi2 < 1:
            raise ParameterError(
                f"need 0 < phi1 < phi < phi2 < 1, got "
                f"({self.phi1}, {self.phi}, {self.phi2})"
            )
        if self.key_width <= 0:
            raise ParameterError("key_width must be positive")
        if not 0 < self.elim_cutoff < 1:
            raise ParameterError("elim_cutoff must be in (0,1)")
        if self.prior_a <= 0 or self.prior_b <= 0:
            raise ParameterError("prior parameters must be positive")

    @property
    def prior(self) -> tuple[float, float]:
        return (self.prior_a, self.prior_b)

    def proper_interval(self) -> tuple[float, float]:
        """The proper dosing interval: (lambda_e, lambda_d) for BOIN,
        the target key for Keyboard."""
        if self.kind is DesignKind.BOIN:
            b = boin_boundaries(self)
            return (b.lambda_e, b.lambda_d)
        half = self.key_width / 2
        return (self.phi - half, self.phi + half)


@dataclass(frozen=True)
class Boundaries:
    lambda_e: float
    lambda_d: float


@dataclass(frozen=True)
class RetainmentSet:
    total_n: int
    members: tuple[int, ...]

    def __contains__(self, m) -> bool:
        return m in self.members


def boin_boundaries(params: DesignParams) -> Boundaries:
    """Closed-form BOIN escalation/de-escalation boundaries."""
    phi, phi1, phi2 = params.phi, params.phi1, params.phi2
    lam_e = math.log((1 - phi1) / (1 - phi)) / math.log(
        phi * (1 - phi1) / (phi1 * (1 - phi))
    )
    lam_d = math.log((1 - phi) / (1 - phi2)) / math.log(
        phi2 * (1 - phi) / (phi * (1 - phi2))
    )
    return Boundaries(lambda_e=lam_e, lambda_d=lam_d)


def interval_posterior_prob(
    n: int,
    m: int,
    interval: tuple[float, float],
    prior: tuple[float, float] = (1.0, 1.0),
) -> float:
    """Posterior Beta(a+m, b+n-m) mass of an open interval (lo, hi)."""
    lo, hi = interval
    if not 0 <= lo < hi <= 1:
        raise ParameterError(f"malformed interval {interval}")
    a, b = prior
    pa, pb = a + m, b + n - m
    return float(betainc(pa, pb, hi) - betainc(pa, pb, lo))


@lru_cache(maxsize=None)
def keyboard_keys(phi: float, key_width: float) -> tuple[tuple[tuple[float, float], ...], int]:
    """Equal-width keys tiled outward from the target key.

    Edge strips narrower than key_width are not keys.  Returns (keys,
    index of the target key), keys in ascending order.
    """
    half = key_width / 2
    lo, hi = phi - half, phi + half
    eps = 1e-9
    below = []
    left = lo
    while left - key_width >= -eps:
        below.append((left - key_width, left))
        left -= key_width
    above = []
    right = hi
    while right + key_width <= 1 + eps:
        above.append((right, right + key_width))
        right += key_width
    keys = tuple(reversed(below)) + ((lo, hi),) + tuple(above)
    return keys, len(below)


@lru_cache(maxsize=None)
def decide(params: DesignParams, n: int, m: int) -> Decision:
    """Escalate/retain/de-escalate for m DLTs out of n patients."""
    if n < 1:
        raise ParameterError("n must be >= 1")
    if not 0 <= m <= n:
        raise ParameterError(f"need 0 <= m <= n, got m={m}, n={n}")
    if params.kind is DesignKind.BOIN:
        b = boin_boundaries(params)
        rate = m / n
        if rate <= b.lambda_e:
            return Decision.ESCALATE
        if rate >= b.lambda_d:
            return Decision.DE_ESCALATE
        return Decision.RETAIN
    keys, target = keyboard_keys(params.phi, params.key_width)
    masses = [interval_posterior_prob(n, m, key, params.prior) for key in keys]
    # strongest key; ties go to the target key, then to the lower key
    best = target
    for i, mass in enumerate(masses):
        if i == target:
            continue
        if mass > masses[best] or (mass == masses[best] and best != target and i < best):
            best = i
    if best < target:
        return Decision.ESCALATE
    if best > target:
        return Decision.DE_ESCALATE
    return Decision.RETAIN


@lru_cache(maxsize=None)
def decision_set(params: DesignParams, total_n: int, decision: Decision) -> tuple[int, ...]:
    return tuple(
        m for m in range(total_n + 1) if decide(params, total_n, m) is decision
    )


def retainment_set(params: DesignParams, total_n: int) -> RetainmentSet:
    """DLT totals at total_n patients for which the decision is Retain."""
    if total_n < 1:
        raise ParameterError("total_n must be >= 1")
    return RetainmentSet(
        total_n=total_n, members=decision_set(params, total_n, Decision.RETAIN)
    )


@lru_cache(maxsize=None)
def eliminate_test(params: DesignParams, n: int, m: int) -> bool:
    """Overdose-control test: posterior P(p > phi) > elim_cutoff.

    Applied only once at least 3 patients have been treated at the dose.
    """
    if not 0 <= m <= n:
        raise ParameterError(f"need 0 <= m <= n, got m={m}, n={n}")
    if n < 3:
        return False
    a, b = params.prior
    tail = 1.0 - float(betainc(a + m, b + n - m, params.phi))
    return tail > params.elim_cutoff


def decision_table(params: DesignParams, n_grid: list[int]) -> list[RetainmentSet]:
    """Retainment sets over a grid of patient counts."""
    if not n_grid:
        raise ParameterError("n_grid must be nonempty")
    return [retainment_set(params, n) for n in n_grid]
