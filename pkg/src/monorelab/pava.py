"""Pool-adjacent-violators solvers on chains, with optional box constraints.

Box constraints are applied by clamping the unconstrained fit pointwise,
which is optimal for any convex per-vertex loss.
"""
from __future__ import annotations

import math

import numpy as np

__all__ = ["l2_isotonic_linear", "l1_isotonic_linear"]


def l2_isotonic_linear(values, weights=None, floor=-math.inf, ceil=math.inf) -> np.ndarray:
    """Weighted least-squares nondecreasing fit of a sequence."""
    y = np.asarray(values, dtype=np.float64)
    n = y.size
    w = np.ones(n) if weights is None else np.asarray(weights, dtype=np.float64)
    if n == 0:
        return y.copy()
    # blocks as (weight sum, weighted value sum, length)
    sw, swy, ln = [], [], []
    for i in range(n):
        cw, cwy, cl = w[i], w[i] * y[i], 1
        while sw and cwy * sw[-1] <= swy[-1] * cw:  # mean_new <= mean_prev
            cw += sw.pop()
            cwy += swy.pop()
            cl += ln.pop()
        sw.append(cw)
        swy.append(cwy)
        ln.append(cl)
    out = np.empty(n, dtype=np.float64)
    pos = 0
    for cw, cwy, cl in zip(sw, swy, ln):
        out[pos : pos + cl] = cwy / cw
        pos += cl
    return np.clip(out, floor, ceil)


def _lower_median(sorted_vals) -> float:
    return sorted_vals[(len(sorted_vals) - 1) // 2]


def l1_isotonic_linear(values, floor=-math.inf, ceil=math.inf) -> np.ndarray:
    """Nondecreasing fit minimizing the sum of absolute deviations.

    Block values are lower medians, so the fit stays on the data values;
    quadratic in the worst case, meant for modest segment lengths.
    """
    y = np.asarray(values, dtype=np.float64)
    n = y.size
    if n == 0:
        return y.copy()
    blocks = []  # (sorted member list, length)
    for i in range(n):
        cur = [y[i]]
        while blocks and _lower_median(cur) < _lower_median(blocks[-1]):
            prev = blocks.pop()
            cur = sorted(prev + cur)
        blocks.append(sorted(cur))
    out = np.empty(n, dtype=np.float64)
    pos = 0
    for members in blocks:
        out[pos : pos + len(members)] = _lower_median(members)
        pos += len(members)
    return np.clip(out, floor, ceil)
