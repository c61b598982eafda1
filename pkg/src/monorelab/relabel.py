"""Windows, trims, and the end-to-end Hamming-optimal relabeling pipeline,
plus the dag-level secondary objectives (weak L0-L1, weak/strong L0-Linf,
staged weak L0-L0, and the weighted-L2 approximation on chains).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .flow import max_isotonic_set
from .model import Instance, LinearOrder, RegressionResult, finish_result
from .pava import l2_isotonic_linear
from .violator import ViolatorDag, transitive_reduction, violating_pairs

__all__ = [
    "Windows",
    "windows",
    "windows_pinned",
    "trim",
    "trim_err",
    "l0_regression",
    "l1_isotonic_dag",
    "weak_l01",
    "weak_l0inf",
    "strong_l0inf",
    "weak_l00",
    "weak_l02_approx",
    "linf_midpoint",
    "max_isotonic_vertices",
]


# ---------------------------------------------------------------------------
# sweeps

def _sweep_max(inst: Instance, seed: np.ndarray) -> np.ndarray:
    """out[v] = max(seed[u] : u <= v), by one pass in topological order."""
    out = seed.astype(np.float64).copy()
    pred = inst.pred_lists
    for v in inst.topo:
        m = out[v]
        for u in pred[v]:
            if out[u] > m:
                m = out[u]
        out[v] = m
    return out


def _sweep_min(inst: Instance, seed: np.ndarray) -> np.ndarray:
    """out[v] = min(seed[u] : u >= v), by one pass in reverse topological order."""
    out = seed.astype(np.float64).copy()
    pred = inst.pred_lists
    for v in inst.topo[::-1]:
        m = out[v]
        for u in pred[v]:
            if m < out[u]:
                out[u] = m
    return out


# ---------------------------------------------------------------------------
# windows and trims

@dataclass
class Windows:
    """Per-vertex label interval compatible with the pinned vertices.

    Rank bounds use the sentinels 1 and ell where nothing constrains the
    vertex; value bounds use -inf/+inf there instead, so trimming arbitrary
    real-valued regressions never invents a label.
    """

    lo_rank: np.ndarray
    hi_rank: np.ndarray
    lo_val: np.ndarray
    hi_val: np.ndarray

    def clip_ranks(self, ranks) -> np.ndarray:
        return np.clip(np.asarray(ranks, dtype=np.int64), self.lo_rank, self.hi_rank)

    def clip_values(self, values) -> np.ndarray:
        return np.clip(np.asarray(values, dtype=np.float64), self.lo_val, self.hi_val)


def windows_pinned(inst: Instance, pinned_ranks: np.ndarray) -> Windows:
    """Windows induced by arbitrary pinned ranks (-1 marks an unpinned vertex)."""
    ell = inst.scale.n_labels
    pin = pinned_ranks >= 0
    seed_lo = np.where(pin, pinned_ranks.astype(np.float64), -math.inf)
    seed_hi = np.where(pin, pinned_ranks.astype(np.float64), math.inf)
    lo = _sweep_max(inst, seed_lo)
    hi = _sweep_min(inst, seed_hi)
    if np.any(lo > hi):
        raise ValueError("pinned values are not isotonic on the order")
    lo_rank = np.where(np.isfinite(lo), lo, 1).astype(np.int64)
    hi_rank = np.where(np.isfinite(hi), hi, ell).astype(np.int64)
    vals = inst.scale.rank_values()
    lo_val = np.where(np.isfinite(lo), vals[np.clip(lo_rank - 1, 0, ell - 1)], -math.inf)
    hi_val = np.where(np.isfinite(hi), vals[np.clip(hi_rank - 1, 0, ell - 1)], math.inf)
    return Windows(lo_rank=lo_rank, hi_rank=hi_rank, lo_val=lo_val, hi_val=hi_val)


def windows(inst: Instance, C) -> Windows:
    """Windows induced by keeping f fixed on the f-isotonic set C."""
    pins = np.full(inst.n, -1, dtype=np.int64)
    C = list(C)
    pins[C] = inst.f_ranks[C]
    return windows_pinned(inst, pins)


def trim(values, w: Windows, ranks: bool = False) -> np.ndarray:
    """Clamp a value (or rank) sequence into the windows; idempotent."""
    return w.clip_ranks(values) if ranks else w.clip_values(values)


def trim_err(inst: Instance) -> np.ndarray:
    """Error each vertex forces on others if kept: the two-sided max formula."""
    f = inst.f_values
    maxpre = _sweep_max(inst, f)
    minsuf = _sweep_min(inst, f)
    return np.maximum(maxpre - f, f - minsuf)


def linf_midpoint(inst: Instance) -> np.ndarray:
    """The classic Linf-optimal isotonic regression (prefix-max + suffix-min)/2."""
    f = inst.f_values
    return (_sweep_max(inst, f) + _sweep_min(inst, f)) / 2.0


# ---------------------------------------------------------------------------
# pipeline

def max_isotonic_vertices(inst: Instance, required=None, vio: ViolatorDag | None = None):
    """Full maximum f-isotonic set: flow antichain plus the never-violating vertices."""
    if vio is None:
        vio = transitive_reduction(violating_pairs(inst))
    C, _ = max_isotonic_set(vio, required)
    outside = sorted(set(range(inst.n)) - set(vio.vio_vertices))
    return sorted(set(C) | set(outside)), vio


def _isotonic_closure_fill(inst: Instance, w: Windows) -> np.ndarray:
    """Isotonic function through the windows staying as close to f as trimming allows.

    The raw trim of f need not be isotonic, so take its running max along the
    order; the result still fits under the (isotonic) upper bounds.
    """
    t = w.clip_ranks(inst.f_ranks).astype(np.float64)
    g = _sweep_max(inst, t)
    assert np.all(g <= w.hi_rank), "closure fill escaped the windows"
    return g.astype(np.int64)


def l0_regression(inst: Instance) -> RegressionResult:
    """Hamming-optimal relabeling: violator dag, min-flow antichain, window fill."""
    kept, vio = max_isotonic_vertices(inst)
    w = windows(inst, kept)
    g_ranks = _isotonic_closure_fill(inst, w)
    res = finish_result(inst, inst.scale.values_of(g_ranks))
    assert res.l0_distance == len(vio.vio_vertices) - (len(kept) - (inst.n - len(vio.vio_vertices)))
    return res


# ---------------------------------------------------------------------------
# weak/strong secondary objectives on arbitrary orders

def l1_isotonic_dag(inst: Instance, values, weights=None, lo=None, hi=None) -> np.ndarray:
    """Weighted-L1-optimal isotonic fit with values drawn from the data values.

    Recursive value partitioning: split the sorted candidates at the median,
    decide the side of every vertex by a minimum s-t cut (project selection
    over the order edges), recurse on each side.  Box constraints enter as
    infinite side costs; ties resolve toward the lower value.
    """
    from .flow import _Dinic

    values = np.asarray(values, dtype=np.float64)
    n = values.size
    w = np.ones(n) if weights is None else np.asarray(weights, dtype=np.float64)
    lo = np.full(n, -math.inf) if lo is None else np.asarray(lo, dtype=np.float64)
    hi = np.full(n, math.inf) if hi is None else np.asarray(hi, dtype=np.float64)
    cand = np.unique(np.concatenate([values, lo[np.isfinite(lo)], hi[np.isfinite(hi)]]))
    edges = [(u, v) for v in range(n) for u in inst.pred_lists[v]]
    g = np.empty(n, dtype=np.float64)
    big = float(np.sum(w * (np.abs(values) + np.abs(cand).max() + 1.0))) + 1.0

    def solve(verts, a, b):
        if not verts:
            return
        if a == b:
            g[list(verts)] = cand[a]
            return
        mid = (a + b) // 2
        vlo, vhi = cand[mid], cand[mid + 1]
        vset = set(verts)
        idx = {v: i for i, v in enumerate(verts)}
        m = len(verts)
        din = _Dinic(m + 2)
        S, T = m, m + 1
        for v in verts:
            i = idx[v]
            c0 = big if lo[v] > vlo else w[v] * abs(values[v] - vlo)
            c1 = big if hi[v] < vhi else w[v] * abs(values[v] - vhi)
            din.add_edge(S, i, c1)  # paid when v lands on the high side
            din.add_edge(i, T, c0)  # paid when v lands on the low side
        for u, v in edges:
            if u in vset and v in vset:
                din.add_edge(idx[v], idx[u], big * (n + 1))
        din.max_flow(S, T)
        # maximal source side = most vertices on the low side (lower-value ties)
        reach_t = [False] * (m + 2)
        reach_t[T] = True
        stack = [T]
        while stack:
            x = stack.pop()
            for eid in din.adj[x]:
                y = din.to[eid]
                if not reach_t[y] and din.cap[eid ^ 1] > 1e-12:
                    reach_t[y] = True
                    stack.append(y)
        low = [v for v in verts if not reach_t[idx[v]]]
        high = [v for v in verts if reach_t[idx[v]]]
        solve(low, a, mid)
        solve(high, mid + 1, b)

    solve(list(range(n)), 0, cand.size - 1)
    return g


def weak_l01(inst: Instance, C=None) -> RegressionResult:
    """L1-best isotonic function among those agreeing with f on the kept set.

    Trim f into the windows of C, then solve the window-constrained L1
    isotonic regression of the trimmed values.
    """
    if C is None:
        C, _ = max_isotonic_vertices(inst)
    w = windows(inst, C)
    trimmed = w.clip_values(inst.f_values)
    g = l1_isotonic_dag(inst, trimmed, lo=w.lo_val, hi=w.hi_val)
    return finish_result(inst, g, lp_p=1)


def weak_l0inf(inst: Instance, C=None) -> RegressionResult:
    """Linf-best isotonic function agreeing with f on the kept set:
    the midpoint regression trimmed into C's windows."""
    if C is None:
        C, _ = max_isotonic_vertices(inst)
    w = windows(inst, C)
    g = w.clip_values(linf_midpoint(inst))
    return finish_result(inst, g, lp_p=math.inf)


def strong_l0inf(inst: Instance) -> RegressionResult:
    """Linf-best over every maximum kept set, by binary search on trim-err.

    Zeroing the unit lower bounds of all vertices with trim-err above t keeps
    the antichain maximum exactly when some maximum kept set avoids them; the
    smallest such t gives the set to fill against.
    """
    vio = transitive_reduction(violating_pairs(inst))
    if not vio.vio_vertices:
        return finish_result(inst, inst.f_values, lp_p=math.inf)
    r = trim_err(inst)
    C_all, _ = max_isotonic_set(vio)
    target = len(C_all)
    cands = sorted({float(r[v]) for v in vio.vio_vertices})

    def solve_at(t):
        required = {v: bool(r[v] <= t + 1e-12) for v in vio.vio_vertices}
        C, _ = max_isotonic_set(vio, required)
        return C

    lo_i, hi_i = 0, len(cands) - 1
    best = C_all
    while lo_i <= hi_i:
        mid = (lo_i + hi_i) // 2
        C = solve_at(cands[mid])
        if len(C) == target:
            best = C
            hi_i = mid - 1
        else:
            lo_i = mid + 1
    kept = sorted(set(best) | (set(range(inst.n)) - set(vio.vio_vertices)))
    return weak_l0inf(inst, kept)


def weak_l00(inst: Instance) -> RegressionResult:
    """Staged relabeling: maximize unchanged labels, then one-step changes, etc.

    Stage d re-trims f against the values pinned so far, runs the flow with
    unit lower bounds only on the vertices exactly d steps from their trim,
    and pins the resulting antichain at its trimmed values.  Vertices the
    stages never pin (their distance can stall below the stage counter) are
    filled at the end from the final windows.
    """
    vio = transitive_reduction(violating_pairs(inst))
    n = inst.n
    ell = inst.scale.n_labels
    ranks = inst.f_ranks
    pinned = np.full(n, -1, dtype=np.int64)
    nonvio = sorted(set(range(n)) - set(vio.vio_vertices))
    for d in range(ell):
        w = windows_pinned(inst, pinned)
        t = w.clip_ranks(ranks)
        dist = np.abs(t - ranks)
        in_stage = (pinned < 0) & (dist == d)
        required = {v: bool(in_stage[v]) for v in vio.vio_vertices}
        if any(required.values()):
            C, _ = max_isotonic_set(vio, required)
        else:
            C = []
        for v in C:
            pinned[v] = t[v]
        if d == 0:
            for v in nonvio:
                pinned[v] = ranks[v]
    w = windows_pinned(inst, pinned)
    g_ranks = _isotonic_closure_fill(inst, w)
    return finish_result(inst, inst.scale.values_of(g_ranks))


def weak_l02_approx(inst: Instance, C=None, eps: float = 1e-6) -> RegressionResult:
    """Within-eps approximation of the weak L0,2 optimum on a chain.

    Weighted L2 isotonic regression with weight sum|f|/eps on the kept set
    and 1 elsewhere, then trimmed into the kept set's windows.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if not isinstance(inst.order, LinearOrder):
        raise TypeError("weak_l02_approx is defined on linear orders only")
    if C is None:
        C, _ = max_isotonic_vertices(inst)
    f = inst.f_values
    alpha = float(np.sum(np.abs(f))) / eps
    if alpha <= 0:
        alpha = 1.0
    weights = np.ones(inst.n)
    weights[list(C)] = alpha
    g_prime = l2_isotonic_linear(f, weights)
    w = windows(inst, C)
    g = w.clip_values(g_prime)
    return finish_result(inst, g, lp_p=2)
