"""Weighted isotonic regression: 1-D PAVA and the bivariate grid version.

The bivariate routine is Dykstra's alternating-projection scheme: cycle
row-wise and column-wise PAVA passes with correction terms until the
fitted matrix stops moving.  Only tried cells (positive weight) take part;
untried cells are reported as NaN.
"""

from __future__ import annotations

from enum import Enum

import numpy as np


class Direction(str, Enum):
    NON_DECREASING = "non-decreasing"
    NON_INCREASING = "non-increasing"


class IsotonicError(ValueError):
    pass


def pava_1d(values, weights=None, direction=Direction.NON_DECREASING):
    """Weighted least-squares projection onto monotone sequences."""
    y = np.asarray(values, dtype=float)
    if y.ndim != 1 or y.size == 0:
        raise IsotonicError("values must be a nonempty 1-D sequence")
    if weights is None:
        w = np.ones_like(y)
    else:
        w = np.asarray(weights, dtype=float)
    if w.shape != y.shape:
        raise IsotonicError("weights must match values in length")
    if np.any(w <= 0):
        raise IsotonicError("weights must be positive")
    if direction is Direction.NON_INCREASING:
        return -pava_1d(-y, w, Direction.NON_DECREASING)

    # pool adjacent violators, block merge with weighted means
    means = []
    wsums = []
    sizes = []
    for yi, wi in zip(y, w):
        means.append(yi)
        wsums.append(wi)
        sizes.append(1)
        while len(means) > 1 and means[-2] > means[-1]:
            m2, w2, s2 = means.pop(), wsums.pop(), sizes.pop()
            m1, w1, s1 = means.pop(), wsums.pop(), sizes.pop()
            wt = w1 + w2
            means.append((m1 * w1 + m2 * w2) / wt)
            wsums.append(wt)
            sizes.append(s1 + s2)
    out = np.empty_like(y)
    pos = 0
    for m, s in zip(means, sizes):
        out[pos : pos + s] = m
        pos += s
    return out


def _row_pass(x, w, mask):
    out = x.copy()
    for j in range(x.shape[0]):
        idx = np.flatnonzero(mask[j])
        if idx.size:
            out[j, idx] = pava_1d(x[j, idx], w[j, idx])
    return out


def _col_pass(x, w, mask):
    out = x.copy()
    for k in range(x.shape[1]):
        idx = np.flatnonzero(mask[:, k])
        if idx.size:
            out[idx, k] = pava_1d(x[idx, k], w[idx, k])
    return out


def bivariate_isotonic(values, weights, tried_mask=None, tol=1e-8, max_cycles=1000):
    """Project a rate matrix onto row- and column-monotone matrices.

    values, weights: J x K arrays; weights are patient counts and must be
    positive wherever tried_mask is true.  Returns a J x K float array
    with NaN at untried cells.
    """
    y = np.asarray(values, dtype=float)
    w = np.asarray(weights, dtype=float)
    if tried_mask is None:
        mask = w > 0
    else:
        mask = np.asarray(tried_mask, dtype=bool)
    if y.shape != w.shape or y.shape != mask.shape:
        raise IsotonicError("values, weights and tried_mask must share a shape")
    if not mask.any():
        raise IsotonicError("no tried cells to regress over")
    if np.any(w[mask] <= 0):
        raise IsotonicError("tried cells need positive weights")

    x = np.where(mask, y, 0.0)
    p = np.zeros_like(x)  # row-pass correction
    q = np.zeros_like(x)  # column-pass correction
    for _ in range(max_cycles):
        r = _row_pass(x + p, w, mask)
        p = x + p - r
        x_new = _col_pass(r + q, w, mask)
        q = r + q - x_new
        if np.max(np.abs(np.where(mask, x_new - x, 0.0))) < tol:
            x = x_new
            break
        x = x_new
    return np.where(mask, x, np.nan)
