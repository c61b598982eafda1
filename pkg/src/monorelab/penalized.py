"""Isotonic regression on chains minimizing sum|f-g|^p + alpha * changed-count.

p in {1, 2} runs the all-pairs successor DP with prefix level-set stacks;
segment errors come from closed-form prefix sums (p = 2) or a persistent
order-statistic tree over the value ranks (p = 1).  p = inf reduces to
scanning trim-err thresholds with an insert-only LIS tracker.
"""
from __future__ import annotations

import bisect
import math

import numpy as np
from numba import njit

from .model import Instance, LinearOrder, RegressionResult, finish_result, hamming_distance
from .pava import l1_isotonic_linear, l2_isotonic_linear
from .relabel import linf_midpoint, trim_err, windows

__all__ = [
    "PersistentStatTree",
    "LisTracker",
    "lis_insert_only",
    "segment_lp_penalized",
    "penalized_lp",
    "penalized_linf",
]


# ---------------------------------------------------------------------------
# persistent order-statistic tree

@njit(cache=True)
def _tree_insert(left, right, cnt, sm, n_nodes, root, lo, hi, pos, val):
    """Functional insert of one (value-rank, value) entry; returns (new_root, n_nodes)."""
    node = n_nodes
    n_nodes += 1
    left[node] = left[root]
    right[node] = right[root]
    cnt[node] = cnt[root] + 1
    sm[node] = sm[root] + val
    top = node
    while lo < hi:
        mid = (lo + hi) // 2
        nxt = n_nodes
        n_nodes += 1
        if pos <= mid:
            src = left[node]
            left[node] = nxt
            hi = mid
        else:
            src = right[node]
            right[node] = nxt
            lo = mid + 1
        left[nxt] = left[src]
        right[nxt] = right[src]
        cnt[nxt] = cnt[src] + 1
        sm[nxt] = sm[src] + val
        node = nxt
    return top, n_nodes


@njit(cache=True)
def _tree_le(left, right, cnt, sm, ra, rb, nvals, upto):
    """(count, sum) of entries with value-rank <= upto between two prefix roots."""
    if upto < 0:
        return 0, 0.0
    lo, hi = 0, nvals - 1
    c = 0
    s = 0.0
    na, nb = ra, rb
    while lo < hi:
        mid = (lo + hi) // 2
        if upto <= mid:
            na, nb = left[na], left[nb]
            hi = mid
        else:
            la, lb = left[na], left[nb]
            c += cnt[lb] - cnt[la]
            s += sm[lb] - sm[la]
            na, nb = right[na], right[nb]
            lo = mid + 1
    if lo <= upto:
        c += cnt[nb] - cnt[na]
        s += sm[nb] - sm[na]
    return c, s


@njit(cache=True)
def _tree_select(left, right, cnt, ra, rb, nvals, k):
    """Value rank of the k-th smallest entry (1-based) between two prefix roots."""
    lo, hi = 0, nvals - 1
    na, nb = ra, rb
    while lo < hi:
        mid = (lo + hi) // 2
        lc = cnt[left[nb]] - cnt[left[na]]
        if k <= lc:
            na, nb = left[na], left[nb]
            hi = mid
        else:
            k -= lc
            na, nb = right[na], right[nb]
            lo = mid + 1
    return lo


class PersistentStatTree:
    """Versioned balanced tree over the value ranks of a sequence.

    Version j answers order statistics over positions c..d (1-based) through
    root-d minus root-(c-1) traversals: counts and sums of values <= x, the
    k-th smallest value, and absolute-deviation costs, all in O(log n).
    Versions are immutable; keys are fixed up front so no rotations occur.
    """

    def __init__(self, values):
        vals = np.asarray(values, dtype=np.float64)
        n = vals.size
        self.values = vals
        self.sorted_vals = np.unique(vals)
        self.n_vals = max(1, self.sorted_vals.size)
        self.ranks = np.searchsorted(self.sorted_vals, vals).astype(np.int64)
        depth = max(1, int(math.ceil(math.log2(self.n_vals))) + 2)
        cap = 4 + (depth + 1) * (n + 1)
        self.left = np.zeros(cap, dtype=np.int64)
        self.right = np.zeros(cap, dtype=np.int64)
        self.cnt = np.zeros(cap, dtype=np.int64)
        self.sm = np.zeros(cap, dtype=np.float64)
        self.roots = np.zeros(n + 1, dtype=np.int64)
        n_nodes = 1  # node 0 is the shared empty node
        for x in range(n):
            root, n_nodes = _tree_insert(
                self.left, self.right, self.cnt, self.sm, n_nodes,
                self.roots[x], 0, self.n_vals - 1, self.ranks[x], vals[x],
            )
            self.roots[x + 1] = root

    def count_sum_le(self, c, d, x):
        """Count and sum of values <= x among positions c..d (1-based, inclusive)."""
        if d < c:
            return 0, 0.0
        upto = int(np.searchsorted(self.sorted_vals, x, side="right")) - 1
        return _tree_le(self.left, self.right, self.cnt, self.sm,
                        self.roots[c - 1], self.roots[d], self.n_vals, upto)

    def select(self, c, d, k):
        """k-th smallest value among positions c..d (1-based k)."""
        rk = _tree_select(self.left, self.right, self.cnt,
                          self.roots[c - 1], self.roots[d], self.n_vals, k)
        return float(self.sorted_vals[rk])

    def abs_cost(self, c, d, y):
        """Sum of |value - y| over positions c..d."""
        if d < c:
            return 0.0
        cle, sle = self.count_sum_le(c, d, y)
        tot_c = d - c + 1
        _, stot = self.count_sum_le(c, d, math.inf)
        return (y * cle - sle) + ((stot - sle) - y * (tot_c - cle))


# ---------------------------------------------------------------------------
# the p in {1, 2} dynamic program

@njit(cache=True)
def _penalized_dp(f, alpha, p, left, right, cnt, sm, roots, nvals, svals, ranks, S1, S2):
    n = f.size
    INF = math.inf
    T = np.full(n + 2, INF)
    pred = np.full(n + 2, -1, dtype=np.int64)
    T[0] = 0.0
    bstart = np.empty(n + 1, dtype=np.int64)
    bval = np.empty(n + 1)
    ccost = np.empty(n + 2)
    for i in range(0, n + 1):
        if T[i] == INF:
            continue
        fi = -INF if i == 0 else f[i - 1]
        top = 0
        ccost[0] = 0.0
        for j in range(i + 1, n + 2):
            fj = INF if j == n + 1 else f[j - 1]
            if fj >= fi:
                # zone of blocks clamped up to fi, then natural, then down to fj
                lo_e = np.searchsorted(bval[:top], fi, side="left")
                hi_s = np.searchsorted(bval[:top], fj, side="right")
                if hi_s < lo_e:
                    hi_s = lo_e
                err = ccost[hi_s] - ccost[lo_e]
                if lo_e > 0:
                    a = bstart[0]
                    b = bstart[lo_e] - 1 if lo_e < top else j - 1
                    if p == 2:
                        c = b - a + 1
                        err += (S2[b] - S2[a - 1]) - 2.0 * fi * (S1[b] - S1[a - 1]) + fi * fi * c
                    else:
                        upto = np.searchsorted(svals, fi, side="right") - 1
                        cle, sle = _tree_le(left, right, cnt, sm, roots[a - 1], roots[b], nvals, upto)
                        ctot = b - a + 1
                        stot = S1[b] - S1[a - 1]
                        err += (fi * cle - sle) + ((stot - sle) - fi * (ctot - cle))
                if hi_s < top:
                    a = bstart[hi_s]
                    b = j - 1
                    if p == 2:
                        c = b - a + 1
                        err += (S2[b] - S2[a - 1]) - 2.0 * fj * (S1[b] - S1[a - 1]) + fj * fj * c
                    else:
                        upto = np.searchsorted(svals, fj, side="right") - 1
                        cle, sle = _tree_le(left, right, cnt, sm, roots[a - 1], roots[b], nvals, upto)
                        ctot = b - a + 1
                        stot = S1[b] - S1[a - 1]
                        err += (fj * cle - sle) + ((stot - sle) - fj * (ctot - cle))
                cand = T[i] + alpha * (j - i - 1) + err
                if cand <= T[j] + 1e-12:
                    if cand < T[j]:
                        T[j] = cand
                    pred[j] = i
            if j <= n:
                # push position j, merging while the block value dips
                start = j
                while True:
                    a = start
                    b = j
                    if p == 2:
                        val = (S1[b] - S1[a - 1]) / (b - a + 1)
                    else:
                        k = (b - a + 2) // 2  # lower median
                        rk = _tree_select(left, right, cnt, roots[a - 1], roots[b], nvals, k)
                        val = svals[rk]
                    if top == 0 or bval[top - 1] <= val:
                        break
                    top -= 1
                    start = bstart[top]
                if p == 2:
                    c = b - a + 1
                    s1 = S1[b] - S1[a - 1]
                    cost = (S2[b] - S2[a - 1]) - s1 * s1 / c
                else:
                    upto = np.searchsorted(svals, val, side="right") - 1
                    cle, sle = _tree_le(left, right, cnt, sm, roots[a - 1], roots[b], nvals, upto)
                    ctot = b - a + 1
                    stot = S1[b] - S1[a - 1]
                    cost = (val * cle - sle) + ((stot - sle) - val * (ctot - cle))
                bstart[top] = start
                bval[top] = val
                top += 1
                ccost[top] = ccost[top - 1] + cost
    return T, pred


def segment_lp_penalized(values, i: int, j: int, p) -> float:
    """Optimal sum|f-g|^p on i..j among isotonic g with g(i)=f(i), g(j)=f(j).

    i = -1 and j = len(values) act as the unbounded sentinels.  Interior
    values may fall inside the pinned range.
    """
    f = np.asarray(values, dtype=np.float64)
    n = f.size
    lo = -math.inf if i < 0 else float(f[i])
    hi = math.inf if j >= n else float(f[j])
    if hi < lo:
        raise ValueError("f(j) < f(i): not a valid successor")
    inner = f[i + 1 : j]
    if inner.size == 0:
        return 0.0
    fit = l2_isotonic_linear(inner, floor=lo, ceil=hi) if p == 2 else \
        l1_isotonic_linear(inner, floor=lo, ceil=hi)
    return float(np.sum(np.abs(inner - fit) ** p))


def penalized_lp(inst: Instance, alpha: float, p) -> RegressionResult:
    """Minimize sum|f-g|^p + alpha * (number of changed vertices) on a chain."""
    if not isinstance(inst.order, LinearOrder):
        raise TypeError("penalized regression is defined on linear orders only")
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if p not in (1, 2):
        raise ValueError("p must be 1 or 2 (use penalized_linf for p = inf)")
    f = inst.f_values
    n = inst.n
    tree = PersistentStatTree(f)
    S1 = np.concatenate([[0.0], np.cumsum(f)])
    S2 = np.concatenate([[0.0], np.cumsum(f * f)])
    T, pred = _penalized_dp(
        f, float(alpha), int(p),
        tree.left, tree.right, tree.cnt, tree.sm, tree.roots,
        tree.n_vals, tree.sorted_vals, tree.ranks, S1, S2,
    )
    path = []
    cur = n + 1
    while cur >= 0:
        path.append(cur)
        cur = pred[cur]
    path.reverse()
    g = np.empty(n, dtype=np.float64)
    for a, b in zip(path, path[1:]):
        lo = -math.inf if a == 0 else f[a - 1]
        hi = math.inf if b == n + 1 else f[b - 1]
        inner = f[a : b - 1]
        if inner.size:
            fit = l2_isotonic_linear(inner, floor=lo, ceil=hi) if p == 2 else \
                l1_isotonic_linear(inner, floor=lo, ceil=hi)
            g[a : b - 1] = fit
        if 1 <= b <= n:
            g[b - 1] = f[b - 1]
    res = finish_result(inst, g, lp_p=p, objective=float(T[n + 1]), alpha=float(alpha))
    direct = res.lp_error + alpha * res.l0_distance
    assert abs(direct - T[n + 1]) < 1e-6, "reconstruction disagrees with DP objective"
    return res


# ---------------------------------------------------------------------------
# insert-only dynamic LIS and the p = inf route

class LisTracker:
    """Longest nondecreasing subsequence of a growing set of (position, value) points.

    Insertion order is arbitrary; the current length is recomputed by a
    patience pass over the points in position order, which keeps the whole
    insert stream within the quadratic-ish budget.
    """

    def __init__(self):
        self._pos = []
        self._val = []

    def insert(self, pos, val) -> int:
        k = bisect.bisect_left(self._pos, pos)
        if k < len(self._pos) and self._pos[k] == pos:
            raise ValueError(f"duplicate position {pos}")
        self._pos.insert(k, pos)
        self._val.insert(k, val)
        return self.length

    @property
    def length(self) -> int:
        tails = []
        for v in self._val:
            t = bisect.bisect_right(tails, v)
            if t == len(tails):
                tails.append(v)
            else:
                tails[t] = v
        return len(tails)


def lis_insert_only(stream):
    """Lengths of the longest nondecreasing subsequence after each insert."""
    tracker = LisTracker()
    return [tracker.insert(pos, val) for pos, val in stream]


def _lex_smallest_lis(f, eligible):
    """Max nondecreasing subsequence within `eligible`, lexicographically
    smallest by values (then by positions)."""
    idx = [v for v in range(f.size) if eligible[v]]
    m = len(idx)
    if m == 0:
        return []
    len_from = [1] * m
    for a in range(m - 2, -1, -1):
        for b in range(a + 1, m):
            if f[idx[b]] >= f[idx[a]] and len_from[b] + 1 > len_from[a]:
                len_from[a] = len_from[b] + 1
    L = max(len_from)
    chosen = []
    prev_val = -math.inf
    start = 0
    for need in range(L, 0, -1):
        best = None
        for a in range(start, m):
            if len_from[a] == need and f[idx[a]] >= prev_val:
                if best is None or f[idx[a]] < f[idx[best]]:
                    best = a
        chosen.append(idx[best])
        prev_val = f[idx[best]]
        start = best + 1
    return chosen


def penalized_linf(inst: Instance, alpha: float) -> RegressionResult:
    """Minimize max|f-g| + alpha * changed-count on a chain.

    Scans the trim-err thresholds: vertices enter the LIS tracker in
    trim-err order, and each distinct threshold eps scores
    max(unrestricted-Linf, eps) + alpha * (n - L(eps)).  The winning
    threshold's kept set is refilled by trimming the midpoint regression.
    """
    if not isinstance(inst.order, LinearOrder):
        raise TypeError("penalized regression is defined on linear orders only")
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    f = inst.f_values
    n = inst.n
    g_prime = linf_midpoint(inst)
    d_inf = float(np.max(np.abs(f - g_prime)))
    r = trim_err(inst)
    order = sorted(range(n), key=lambda v: (r[v], v))
    tracker = LisTracker()
    candidates = [(d_inf + alpha * n, -math.inf)]  # keep nothing
    k = 0
    while k < n:
        eps = r[order[k]]
        while k < n and r[order[k]] == eps:
            v = order[k]
            tracker.insert(v, f[v])
            k += 1
        L = tracker.length
        candidates.append((max(d_inf, eps) + alpha * (n - L), eps))
    best_obj, best_eps = min(candidates, key=lambda t: (t[0], t[1]))
    if best_eps == -math.inf:
        C = []
    else:
        C = _lex_smallest_lis(f, r <= best_eps + 1e-12)
    w = windows(inst, C)
    g = w.clip_values(g_prime)
    linf = float(np.max(np.abs(f - g)))
    res = finish_result(inst, g, lp_p=math.inf,
                        objective=linf + alpha * hamming_distance(f, g),
                        alpha=float(alpha))
    assert abs(res.objective - best_obj) < 1e-9, "threshold scan disagrees with the refit"
    return res
