"""Decision-rule tests, checked against independent high-precision oracles."""

import math

import mpmath as mp
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from combodose import (
    Decision,
    DesignKind,
    DesignParams,
    ParameterError,
    boin_boundaries,
    decide,
    decision_table,
    eliminate_test,
    interval_posterior_prob,
    retainment_set,
)
from combodose.design import keyboard_keys

mp.mp.dps = 50


# ----------------------------------------------------------------- oracles


def boundary_oracle(phi, phi_other):
    """Observed rate at which the binomial likelihoods under phi and
    phi_other are equal; solved numerically instead of in closed form."""
    f = lambda t: t * mp.log(phi_other / phi) + (1 - t) * mp.log(
        (1 - phi_other) / (1 - phi)
    )
    return float(mp.findroot(f, 0.3))


def beta_cdf_oracle(a, b, x):
    return float(mp.betainc(a, b, 0, x, regularized=True))


def keyboard_oracle(phi, key_width, n, m):
    """Strongest-key decision recomputed from scratch at high precision."""
    half = key_width / 2
    keys = []
    lo = phi - half
    while lo - key_width >= -1e-9:
        lo -= key_width
    cursor = lo
    while cursor + key_width <= 1 + 1e-9:
        keys.append((cursor, cursor + key_width))
        cursor += key_width
    target = keys.index(
        next(k for k in keys if abs(k[0] - (phi - half)) < 1e-9)
    )
    masses = [
        beta_cdf_oracle(1 + m, 1 + n - m, hi) - beta_cdf_oracle(1 + m, 1 + n - m, lo)
        for lo, hi in keys
    ]
    best = target
    for i, mass in enumerate(masses):
        if i == target:
            continue
        if mass > masses[best] + 1e-15:
            best = i
    if best < target:
        return Decision.ESCALATE
    if best > target:
        return Decision.DE_ESCALATE
    return Decision.RETAIN


# ------------------------------------------------------------- boundaries


def test_boin_boundaries_match_reference_values(boin):
    b = boin_boundaries(boin)
    assert b.lambda_e == pytest.approx(0.236, abs=5e-4)
    # the published 3-decimal display truncates: the exact boundary is
    # 0.358519..., which rounds to 0.359 but prints as 0.358
    assert math.floor(b.lambda_d * 1000) / 1000 == 0.358
    assert b.lambda_d == pytest.approx(0.3585195, abs=1e-6)


@pytest.mark.xfail(
    reason="the exact de-escalation boundary 0.358519 sits 2e-5 outside "
    "a symmetric +/-5e-4 band around the truncated display value 0.358",
    strict=True,
)
def test_boin_lambda_d_within_symmetric_band(boin):
    assert boin_boundaries(boin).lambda_d == pytest.approx(0.358, abs=5e-4)


@given(phi=st.floats(0.1, 0.5))
def test_boin_boundaries_match_likelihood_oracle(phi):
    params = DesignParams(kind=DesignKind.BOIN, phi=phi)
    b = boin_boundaries(params)
    assert b.lambda_e == pytest.approx(
        boundary_oracle(phi, params.phi1), abs=1e-10
    )
    assert b.lambda_d == pytest.approx(
        boundary_oracle(phi, params.phi2), abs=1e-10
    )
    assert b.lambda_e < phi < b.lambda_d


def test_custom_phi1_phi2_validation():
    DesignParams(phi=0.3, phi1=0.2, phi2=0.4)
    with pytest.raises(ParameterError):
        DesignParams(phi=0.3, phi1=0.3)
    with pytest.raises(ParameterError):
        DesignParams(phi=0.3, phi2=0.25)
    with pytest.raises(ParameterError):
        DesignParams(phi=1.2)


# -------------------------------------------------------------- decisions


@given(n=st.integers(1, 60), m_frac=st.floats(0, 1))
def test_boin_decision_thresholds(n, m_frac):
    params = DesignParams(kind=DesignKind.BOIN, phi=0.3)
    m = round(m_frac * n)
    b = boin_boundaries(params)
    d = decide(params, n, m)
    rate = m / n
    if rate <= b.lambda_e:
        assert d is Decision.ESCALATE
    elif rate >= b.lambda_d:
        assert d is Decision.DE_ESCALATE
    else:
        assert d is Decision.RETAIN


@given(n=st.integers(1, 30), m_frac=st.floats(0, 1))
@settings(max_examples=60, deadline=None)
def test_keyboard_decision_matches_oracle(n, m_frac):
    params = DesignParams(kind=DesignKind.KEYBOARD, phi=0.3)
    m = round(m_frac * n)
    assert decide(params, n, m) is keyboard_oracle(0.3, 0.1, n, m)


@given(n=st.integers(1, 40))
def test_decision_monotone_in_dlt_count(n):
    """More DLTs can only move the decision toward de-escalation."""
    order = {Decision.ESCALATE: 0, Decision.RETAIN: 1, Decision.DE_ESCALATE: 2}
    for params in (
        DesignParams(kind=DesignKind.BOIN, phi=0.3),
        DesignParams(kind=DesignKind.KEYBOARD, phi=0.3),
    ):
        ranks = [order[decide(params, n, m)] for m in range(n + 1)]
        assert ranks == sorted(ranks)


def test_keyboard_keys_tile_the_unit_interval():
    keys, target = keyboard_keys(0.3, 0.1)
    assert keys[target] == pytest.approx((0.25, 0.35))
    for (a, b), (c, d) in zip(keys, keys[1:]):
        assert b == pytest.approx(c)
        assert d - c == pytest.approx(0.1)
    assert keys[0][0] >= -1e-9 and keys[-1][1] <= 1 + 1e-9


# ------------------------------------------------------- retainment tables


def test_boin_retainment_table(boin):
    rows = decision_table(boin, [3, 6, 9, 12, 15, 18])
    got = {r.total_n: r.members for r in rows}
    assert got == {
        3: (1,),
        6: (2,),
        9: (3,),
        12: (3, 4),
        15: (4, 5),
        18: (5, 6),
    }


def test_keyboard_retainment_table(keyboard):
    rows = decision_table(keyboard, [3, 6, 9, 15, 18])
    got = {r.total_n: r.members for r in rows}
    assert got == {3: (1,), 6: (2,), 9: (3,), 15: (4, 5), 18: (5, 6)}


def test_keyboard_retainment_n12_strongest_key():
    """At n=12 the target key carries the strongest posterior mass for
    m=3 (0.3060 vs 0.2977 above) and loses it for m=5, so the strongest-
    key rule retains exactly {3, 4}."""
    params = DesignParams(kind=DesignKind.KEYBOARD, phi=0.3)
    assert retainment_set(params, 12).members == (3, 4)
    for m in (3, 4):
        assert keyboard_oracle(0.3, 0.1, 12, m) is Decision.RETAIN
    assert keyboard_oracle(0.3, 0.1, 12, 5) is Decision.DE_ESCALATE


@pytest.mark.xfail(
    reason="published reference table lists {4, 5} at n=12, which the "
    "strongest-key rule does not reproduce (posterior mass favors m=3 "
    "over m=5); kept as documentation of the discrepancy",
    strict=True,
)
def test_keyboard_retainment_n12_as_published():
    params = DesignParams(kind=DesignKind.KEYBOARD, phi=0.3)
    assert retainment_set(params, 12).members == (4, 5)


def test_retainment_set_contains():
    params = DesignParams(kind=DesignKind.BOIN, phi=0.3)
    R = retainment_set(params, 15)
    assert 4 in R and 5 in R and 3 not in R


# ------------------------------------------------------------ elimination


@given(n=st.integers(1, 40), m_frac=st.floats(0, 1))
@settings(max_examples=60, deadline=None)
def test_eliminate_matches_posterior_tail_oracle(n, m_frac):
    params = DesignParams(kind=DesignKind.BOIN, phi=0.3)
    m = round(m_frac * n)
    tail = 1 - beta_cdf_oracle(1 + m, 1 + n - m, 0.3)
    expected = n >= 3 and tail > 0.95
    assert eliminate_test(params, n, m) is expected


def test_eliminate_requires_three_patients(boin):
    assert not eliminate_test(boin, 2, 2)
    assert eliminate_test(boin, 3, 3)


def test_eliminate_reference_tails(boin):
    # posterior tails for the two boundary cases at a cohort of three
    assert 1 - beta_cdf_oracle(4, 1, 0.3) == pytest.approx(0.9919, abs=5e-5)
    assert 1 - beta_cdf_oracle(3, 2, 0.3) == pytest.approx(0.9163, abs=5e-5)
    assert eliminate_test(boin, 3, 3)
    assert not eliminate_test(boin, 3, 2)


# ----------------------------------------------------- posterior intervals


@given(
    n=st.integers(0, 50),
    m_frac=st.floats(0, 1),
    lo=st.floats(0.05, 0.45),
    width=st.floats(0.05, 0.5),
)
@settings(max_examples=60, deadline=None)
def test_interval_posterior_matches_mpmath(n, m_frac, lo, width):
    m = round(m_frac * n)
    hi = min(lo + width, 1.0)
    got = interval_posterior_prob(n, m, (lo, hi))
    want = beta_cdf_oracle(1 + m, 1 + n - m, hi) - beta_cdf_oracle(1 + m, 1 + n - m, lo)
    assert got == pytest.approx(want, abs=1e-12)


def test_interval_posterior_reference_value():
    # Beta(2, 3) mass of (0.236, 0.359)
    assert interval_posterior_prob(3, 1, (0.2365, 0.3586)) == pytest.approx(
        0.21287, abs=5e-4
    )


def test_interval_posterior_rejects_malformed():
    with pytest.raises(ParameterError):
        interval_posterior_prob(3, 1, (0.5, 0.4))
