"""Strong secondary optimality on linear orders.

Covers the count-then-error dynamic program over potential successors for
p in {1, 2}, the trim-err-augmented longest-nondecreasing-subsequence route
for p = inf, and the staged live-cell DP that makes the stage vector of an
ordinal relabeling lexically last.
"""
from __future__ import annotations

import bisect
import math

import numpy as np
from numba import njit

from .model import Instance, LinearOrder, RegressionResult, finish_result
from .pava import l2_isotonic_linear
from .relabel import trim_err, weak_l0inf

__all__ = [
    "maxmin",
    "strong_l0p_linear",
    "segment_lp_errors",
    "strong_l0inf_linear",
    "strong_l0_ordinal",
]


def maxmin(a, b):
    """Order on (kept-count, error) pairs: larger count wins, then smaller error."""
    if a[0] != b[0]:
        return a if a[0] > b[0] else b
    return a if a[1] <= b[1] else b


def _require_linear(inst: Instance):
    if not isinstance(inst.order, LinearOrder):
        raise TypeError("linear orders only")


# ---------------------------------------------------------------------------
# segment errors between consecutive kept vertices (empty-rectangle case)

def _successor_errors(fp: np.ndarray, i: int, p, S1, S2):
    """(j, error) for every potential successor j of i on the padded array.

    fp has sentinels fp[0] = -inf and fp[n+1] = +inf.  Interior points of a
    potential-successor rectangle all lie strictly outside [fp(i), fp(j)],
    which is what the closed forms below exploit.
    """
    n = fp.size - 2
    fi = fp[i]
    out = []
    if p == 1:
        cntB = sumB = 0.0
        cntA = sumA = 0.0
        delta = 0.0
        min_pref = 0.0
        sv = math.inf
        for j in range(i + 1, n + 1):
            fj = fp[j]
            if fj >= fi and fj < sv:
                err = (sumA - cntA * fj) + (cntB * fj - sumB)
                if min_pref < 0.0:
                    err += (fj - fi) * min_pref
                out.append((j, err))
                if fj == fi:
                    return out
                sv = fj
            # processed or not, j joins the interior of later rectangles
            if fj > fi:
                cntA += 1
                sumA += fj
                delta += 1
            else:
                cntB += 1
                sumB += fj
                delta -= 1
            min_pref = min(min_pref, delta)
        if sv == math.inf:
            # i is a last kept vertex: everything after sits below fp(i)
            out.append((n + 1, cntB * fi - sumB if cntB else 0.0))
        return out

    # p == 2: prefix least-squares blocks, clamped into [fp(i), fp(j)] at query
    starts, sums, sqs, cnts, means, costs, ccost = [], [], [], [], [], [], [0.0]

    def push(x, val):
        s, q, c = val, val * val, 1
        start = x
        while starts and s * cnts[-1] <= sums[-1] * c:
            start = starts.pop()
            s += sums.pop()
            q += sqs.pop()
            c += cnts.pop()
            means.pop()
            costs.pop()
            ccost.pop()
        starts.append(start)
        sums.append(s)
        sqs.append(q)
        cnts.append(c)
        means.append(s / c)
        costs.append(q - s * s / c)
        ccost.append(ccost[-1] + costs[-1])

    def range_cost_at(a, b, y):
        # sum over positions a..b of (f - y)^2 via the global prefix sums
        if a > b:
            return 0.0
        s1 = S1[b] - S1[a - 1]
        s2 = S2[b] - S2[a - 1]
        c = b - a + 1
        return s2 - 2.0 * y * s1 + y * y * c

    def eval_at(j, fj):
        if not starts:
            return 0.0
        lo_end = bisect.bisect_left(means, fi)          # blocks clamped up to fp(i)
        hi_start = max(bisect.bisect_right(means, fj), lo_end)
        err = ccost[hi_start] - ccost[lo_end]
        if lo_end > 0:
            b = starts[lo_end] - 1 if lo_end < len(starts) else j - 1
            err += range_cost_at(starts[0], b, fi)
        if hi_start < len(starts):
            err += range_cost_at(starts[hi_start], j - 1, fj)
        return err

    sv = math.inf
    for j in range(i + 1, n + 1):
        fj = fp[j]
        if fj >= fi and fj < sv:
            out.append((j, eval_at(j, fj)))
            if fj == fi:
                return out
            sv = fj
        push(j, fj)
    if sv == math.inf:
        out.append((n + 1, eval_at(n + 1, math.inf)))
    return out


def segment_lp_errors(values, i: int, p) -> dict:
    """Optimal constrained Lp error from i to each of its potential successors.

    `i` is a 0-based index into values, or -1 for the left sentinel; keys of
    the returned map are 0-based successor indices with len(values) standing
    for the right sentinel.
    """
    if p not in (1, 2):
        raise ValueError("p must be 1 or 2")
    f = np.asarray(values, dtype=np.float64)
    fp = np.concatenate([[-math.inf], f, [math.inf]])
    n = f.size
    S1 = np.concatenate([[0.0], np.cumsum(fp[1 : n + 1])])
    S2 = np.concatenate([[0.0], np.cumsum(fp[1 : n + 1] ** 2)])
    return {j - 1: e for j, e in _successor_errors(fp, i + 1, p, S1, S2)}


def _fill_segment(f: np.ndarray, a: int, b: int, p) -> np.ndarray:
    """Optimal isotonic fill of positions a+1..b-1 (padded indices, pins at a, b)."""
    lo = f[a]
    hi = f[b]
    inner = f[a + 1 : b]
    if inner.size == 0:
        return inner.astype(np.float64)
    if p == 2:
        return l2_isotonic_linear(inner, floor=lo, ceil=hi)
    # p = 1: the fit is fp(a) on a prefix and fp(b) on the suffix
    m = inner.size
    cost_lo = np.abs(inner - lo) if math.isfinite(lo) else None
    cost_hi = np.abs(inner - hi) if math.isfinite(hi) else None
    if cost_lo is None:
        return np.full(m, hi)
    if cost_hi is None:
        return np.full(m, lo)
    suffix_hi = np.concatenate([np.cumsum(cost_hi[::-1])[::-1], [0.0]])
    prefix_lo = np.concatenate([[0.0], np.cumsum(cost_lo)])
    totals = prefix_lo + suffix_hi
    best = totals.min()
    t = int(np.nonzero(totals == best)[0].max())  # ties keep more at fp(a)
    out = np.empty(m, dtype=np.float64)
    out[:t] = lo
    out[t:] = hi
    return out


def strong_l0p_linear(inst: Instance, p) -> RegressionResult:
    """Lp-best relabeling among all maximum kept sets on a chain (p in {1,2}).

    Left-to-right scan keeping, per vertex, the (count, error) pair of the
    best prefix ending there; successors are restricted to the staircase of
    vertices whose rectangle back to the current one is empty.
    """
    _require_linear(inst)
    if p not in (1, 2):
        raise ValueError("p must be 1 or 2")
    f = inst.f_values
    n = inst.n
    fp = np.concatenate([[-math.inf], f, [math.inf]])
    S1 = np.concatenate([[0.0], np.cumsum(fp[1 : n + 1])])
    S2 = np.concatenate([[0.0], np.cumsum(fp[1 : n + 1] ** 2)])
    NEG = -1
    Tc = np.full(n + 2, NEG, dtype=np.int64)
    Ts = np.full(n + 2, math.inf)
    pred = np.full(n + 2, -1, dtype=np.int64)
    Tc[0] = 0
    Ts[0] = 0.0
    for i in range(0, n + 1):
        if Tc[i] < 0:
            continue
        for j, e in _successor_errors(fp, i, p, S1, S2):
            c, s = Tc[i] + 1, Ts[i] + e
            if c > Tc[j] or (c == Tc[j] and s < Ts[j] - 1e-12):
                Tc[j] = c
                Ts[j] = s
                pred[j] = i
    # walk back; kept vertices are the path without the sentinels
    path = []
    cur = n + 1
    while cur >= 0:
        path.append(cur)
        cur = pred[cur]
    path.reverse()
    g = np.empty(n + 2, dtype=np.float64)
    g[0] = -math.inf
    g[n + 1] = math.inf
    for a, b in zip(path, path[1:]):
        g[a + 1 : b] = _fill_segment(fp, a, b, p)
        if 1 <= b <= n:
            g[b] = fp[b]
    res = finish_result(inst, g[1 : n + 1], lp_p=p)
    assert abs(res.lp_error - Ts[n + 1]) < 1e-6, "reconstruction disagrees with DP error"
    return res


# ---------------------------------------------------------------------------
# p = inf via the augmented nondecreasing-subsequence frontier

def strong_l0inf_linear(inst: Instance) -> RegressionResult:
    """Linf-best over all maximum kept sets on a chain.

    Patience-style frontier keyed by value; each entry carries the length of
    the best nondecreasing subsequence ending there and the smallest
    achievable maximum trim-err among such subsequences.  A successor entry
    dies when the new point matches its length with no worse trim-err.
    """
    _require_linear(inst)
    f = inst.f_values
    n = inst.n
    r = trim_err(inst)
    fv, ln, mr, pt = [], [], [], []   # frontier: value, length, min max-r, point
    pred = np.full(n, -1, dtype=np.int64)
    length = np.zeros(n, dtype=np.int64)
    best_r = np.zeros(n, dtype=np.float64)
    for x in range(n):
        k = bisect.bisect_right(fv, f[x])
        if k > 0:
            length[x] = ln[k - 1] + 1
            best_r[x] = max(r[x], mr[k - 1])
            pred[x] = pt[k - 1]
        else:
            length[x] = 1
            best_r[x] = r[x]
        while k < len(fv) and (
            ln[k] < length[x] or (ln[k] == length[x] and mr[k] >= best_r[x])
        ):
            del fv[k], ln[k], mr[k], pt[k]
        fv.insert(k, f[x])
        ln.insert(k, int(length[x]))
        mr.insert(k, float(best_r[x]))
        pt.insert(k, x)
    kept = []
    cur = pt[-1]
    while cur >= 0:
        kept.append(int(cur))
        cur = pred[cur]
    kept.reverse()
    return weak_l0inf(inst, kept)


# ---------------------------------------------------------------------------
# strong L0 for ordinal labels: staged live-cell DP

@njit(cache=True)
def _ordinal_stages(f0, ell):  # pragma: no cover - exercised through the wrapper
    n = f0.size
    NEG = np.int64(-(1 << 40))
    live = np.ones((n, ell), dtype=np.bool_)
    A = np.empty((n, ell), dtype=np.int64)
    B = np.empty((n, ell), dtype=np.int64)
    pA = np.zeros((n, ell), dtype=np.int64)
    qA = np.empty((n, ell), dtype=np.int64)
    pB = np.empty((n, ell), dtype=np.int64)
    qB = np.empty((n, ell), dtype=np.int64)
    for i in range(n):
        for j in range(ell):
            qA[i, j] = j
            pB[i, j] = j
            qB[i, j] = ell - 1
    m = np.zeros(ell, dtype=np.int64)
    for s in range(ell):
        # forward counts
        for j in range(ell):
            if live[0, j]:
                A[0, j] = 1 if abs(j - f0[0]) == s else 0
            else:
                A[0, j] = NEG
        for i in range(1, n):
            for j in range(ell):
                if not live[i, j]:
                    A[i, j] = NEG
                    continue
                best = NEG
                for k in range(pA[i, j], qA[i, j] + 1):
                    if live[i - 1, k] and A[i - 1, k] > best:
                        best = A[i - 1, k]
                newp = -1
                newq = -1
                for k in range(pA[i, j], qA[i, j] + 1):
                    if live[i - 1, k] and A[i - 1, k] == best:
                        if newp < 0:
                            newp = k
                        newq = k
                pA[i, j] = newp
                qA[i, j] = newq
                A[i, j] = best + (1 if abs(j - f0[i]) == s else 0)
        # backward counts
        for j in range(ell):
            if live[n - 1, j]:
                B[n - 1, j] = 1 if abs(j - f0[n - 1]) == s else 0
            else:
                B[n - 1, j] = NEG
        for i in range(n - 2, -1, -1):
            for j in range(ell):
                if not live[i, j]:
                    B[i, j] = NEG
                    continue
                best = NEG
                for k in range(pB[i, j], qB[i, j] + 1):
                    if live[i + 1, k] and B[i + 1, k] > best:
                        best = B[i + 1, k]
                newp = -1
                newq = -1
                for k in range(pB[i, j], qB[i, j] + 1):
                    if live[i + 1, k] and B[i + 1, k] == best:
                        if newp < 0:
                            newp = k
                        newq = k
                pB[i, j] = newp
                qB[i, j] = newq
                B[i, j] = best + (1 if abs(j - f0[i]) == s else 0)
        ms = NEG
        for j in range(ell):
            if live[n - 1, j] and A[n - 1, j] > ms:
                ms = A[n - 1, j]
        m[s] = ms
        for i in range(n):
            for j in range(ell):
                if live[i, j]:
                    ind = 1 if abs(j - f0[i]) == s else 0
                    if A[i, j] + B[i, j] - ind != ms:
                        live[i, j] = False
    return m, live, pA, qA


def strong_l0_ordinal(inst: Instance) -> RegressionResult:
    """Relabeling whose stage vector (n_0, ..., n_{ell-1}) is lexically last.

    Stage s keeps alive exactly the (index, label) cells lying on a function
    optimal for every stage up to s; predecessor intervals shrink across
    stages so later maxima only range over jointly optimal prefixes.
    """
    _require_linear(inst)
    ell = inst.scale.n_labels
    n = inst.n
    f0 = (inst.f_ranks - 1).astype(np.int64)
    if ell == 1:
        return finish_result(inst, inst.f_values)
    m, live, pA, qA = _ordinal_stages(f0, ell)
    g0 = np.empty(n, dtype=np.int64)
    j = 0
    while j < ell and not live[0, j]:
        j += 1
    assert j < ell, "no live cell at the first index"
    g0[0] = j
    for i in range(1, n):
        k = j
        while k < ell and not (live[i, k] and pA[i, k] <= j <= qA[i, k]):
            k += 1
        assert k < ell, "live-cell walk broke off"
        g0[i] = k
        j = k
    res = finish_result(inst, inst.scale.values_of(g0 + 1))
    assert res.stage_counts == tuple(int(x) for x in m), "walk disagrees with stage maxima"
    return res
