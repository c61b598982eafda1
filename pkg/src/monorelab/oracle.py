"""Brute-force reference solvers used to generate and check expected values.

Everything here is deliberately independent of the production algorithms:
precedence comes from boolean matrix closure, optima from exhaustive
enumeration over subsets, nondecreasing fills, or block partitions.  Budgets
are hard caps; oracles refuse oversized inputs rather than degrade.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .model import DagOrder, Instance, LinearOrder, PointsOrder

__all__ = [
    "OracleBudget",
    "OracleBudgetError",
    "brute_max_isotonic_set",
    "brute_best_regression",
    "strict_relation",
    "oracle_trim_err",
    "oracle_weak_lp",
    "oracle_weak_linf",
    "oracle_strong_lp_linear",
    "oracle_stage_lexmax",
    "oracle_penalized",
    "random_linear_instance",
    "random_dag_instance",
    "random_points_instance",
]


class OracleBudgetError(ValueError):
    """Input exceeds the exhaustive-search budget."""


@dataclass(frozen=True)
class OracleBudget:
    max_n: int = 14
    max_labels: int = 6
    max_distinct_values: int = 8

    def check(self, n: int, n_labels: int | None = None):
        if n > self.max_n:
            raise OracleBudgetError(f"n={n} exceeds oracle budget {self.max_n}")
        if n_labels is not None and n_labels > self.max_labels:
            raise OracleBudgetError(
                f"{n_labels} labels exceed oracle budget {self.max_labels}"
            )


DEFAULT_BUDGET = OracleBudget()


def strict_relation(inst: Instance) -> np.ndarray:
    """Boolean matrix R with R[u, v] iff u strictly precedes v."""
    order = inst.order
    n = inst.n
    if isinstance(order, LinearOrder):
        return np.triu(np.ones((n, n), dtype=bool), k=1)
    if isinstance(order, DagOrder):
        rel = np.zeros((n, n), dtype=bool)
        for u, v in order.edges:
            rel[u, v] = True
        while True:
            nxt = rel | (rel @ rel)
            if np.array_equal(nxt, rel):
                return rel
            rel = nxt
    coords = order.coords
    rel = np.zeros((n, n), dtype=bool)
    for u in range(n):
        ge = np.all(coords >= coords[u], axis=1) & ~np.all(coords == coords[u], axis=1)
        rel[u] = ge
    return rel


def _conflict_masks(inst: Instance) -> list:
    """Per-vertex bitmask of partners it forms a violating pair with."""
    rel = strict_relation(inst)
    f = inst.f_ranks
    n = inst.n
    conf = [0] * n
    for u in range(n):
        for v in range(n):
            if (rel[u, v] and f[u] > f[v]) or (rel[v, u] and f[v] > f[u]):
                conf[u] |= 1 << v
    return conf


def brute_max_isotonic_set(inst: Instance, budget: OracleBudget = DEFAULT_BUDGET):
    """Exact maximum f-isotonic subset size and every witness of that size."""
    budget.check(inst.n)
    n = inst.n
    conf = _conflict_masks(inst)
    best = -1
    witnesses = []
    for mask in range(1 << n):
        m = mask
        ok = True
        while m:
            v = (m & -m).bit_length() - 1
            if conf[v] & mask:
                ok = False
                break
            m &= m - 1
        if not ok:
            continue
        size = mask.bit_count()
        if size > best:
            best = size
            witnesses = [mask]
        elif size == best:
            witnesses.append(mask)
    sets = [tuple(v for v in range(n) if m >> v & 1) for m in witnesses]
    return best, sets


def iter_isotonic_fills(inst: Instance, candidates, pinned=None):
    """Yield every isotonic assignment over the candidate values.

    Vertices are filled in topological order; `pinned` maps vertex -> value.
    Candidate values must be sorted ascending.
    """
    rel = strict_relation(inst)
    topo = inst.topo.tolist()
    n = inst.n
    cand = np.asarray(candidates, dtype=np.float64)
    pinned = pinned or {}
    g = np.empty(n, dtype=np.float64)

    def rec(k):
        if k == n:
            yield g.copy()
            return
        v = topo[k]
        lo = -math.inf
        for j in range(k):
            u = topo[j]
            if rel[u, v]:
                lo = max(lo, g[u])
        if v in pinned:
            if pinned[v] >= lo:
                g[v] = pinned[v]
                yield from rec(k + 1)
            return
        for val in cand[cand >= lo]:
            g[v] = val
            yield from rec(k + 1)

    yield from rec(0)


def oracle_trim_err(inst: Instance) -> np.ndarray:
    """Two-sided forced-error values straight from the definition."""
    rel = strict_relation(inst)
    f = inst.f_values
    n = inst.n
    r = np.zeros(n, dtype=np.float64)
    for v in range(n):
        a = 0.0
        for w in range(n):
            if (rel[w, v] or w == v) and f[w] >= f[v]:
                a = max(a, f[w] - f[v])
        b = 0.0
        for w in range(n):
            if (rel[v, w] or w == v) and f[w] <= f[v]:
                b = max(b, f[v] - f[w])
        r[v] = max(a, b)
    return r


def oracle_weak_lp(inst: Instance, C, p, budget: OracleBudget = DEFAULT_BUDGET):
    """Minimum sum |f-g|^p over isotonic g with g = f on C (grid fills).

    Returns (error, optimizer); enumeration is lexicographic in topological
    order so the optimizer is deterministic.
    """
    budget.check(inst.n)
    f = inst.f_values
    pinned = {int(v): float(f[v]) for v in C}
    cand = np.unique(f)
    best = math.inf
    best_g = None
    for g in iter_isotonic_fills(inst, cand, pinned):
        err = float(np.sum(np.abs(f - g) ** p))
        if err < best - 1e-12:
            best = err
            best_g = g
    return best, best_g


def oracle_weak_linf(inst: Instance, C):
    """Minimum max |f-g| over isotonic g with g = f on C, by feasibility search."""
    rel = strict_relation(inst)
    f = inst.f_values
    n = inst.n
    pin = np.zeros(n, dtype=bool)
    pin[list(C)] = True
    diffs = {0.0}
    for u in range(n):
        for v in range(n):
            d = abs(f[u] - f[v])
            diffs.add(d)
            diffs.add(d / 2.0)

    def feasible(eps):
        lo = f - eps
        hi = f + eps
        lo = np.where(pin, f, lo)
        hi = np.where(pin, f, hi)
        run = lo.copy()
        for v in inst.topo:
            for u in range(n):
                if rel[u, v]:
                    run[v] = max(run[v], run[u])
            if run[v] > hi[v] + 1e-12:
                return False
        return True

    return min(e for e in sorted(diffs) if feasible(e))


def _segments_of_pins(n, kept, fvals):
    """Free index runs between consecutive pinned vertices on a chain."""
    kept = sorted(kept)
    bounds = []
    prev = -1
    floor = -math.inf
    for k in kept + [n]:
        ceil = float(fvals[k]) if k < n else math.inf
        if k - prev > 1:
            bounds.append((prev + 1, k - 1, floor, ceil))
        if k < n:
            floor = float(fvals[k])
        prev = k
    return bounds


def _segment_l2_oracle(vals, floor, ceil):
    """Exact constrained L2 fit of one free run by block-partition search."""
    m = len(vals)
    if m == 0:
        return 0.0, []
    best = math.inf
    best_fill = None
    for cuts in itertools.product([0, 1], repeat=m - 1):
        blocks = []
        start = 0
        for i, c in enumerate(cuts):
            if c:
                blocks.append((start, i))
                start = i + 1
        blocks.append((start, m - 1))
        fill = []
        for a, b in blocks:
            y = float(np.mean(vals[a : b + 1]))
            y = min(max(y, floor), ceil)
            fill.extend([y] * (b - a + 1))
        if any(b < a for a, b in zip(fill, fill[1:])):
            continue
        err = float(np.sum((np.asarray(vals) - np.asarray(fill)) ** 2))
        if err < best - 1e-15:
            best = err
            best_fill = fill
    return best, best_fill


def oracle_weak_l2_linear(inst: Instance, C):
    """Exact weak L0,2 optimum on a chain: independent per free run."""
    if not isinstance(inst.order, LinearOrder):
        raise TypeError("linear orders only")
    f = inst.f_values
    g = f.astype(np.float64).copy()
    total = 0.0
    for a, b, floor, ceil in _segments_of_pins(inst.n, C, f):
        err, fill = _segment_l2_oracle(f[a : b + 1], floor, ceil)
        total += err
        g[a : b + 1] = fill
    return total, g


def oracle_strong_lp_linear(inst: Instance, p, budget: OracleBudget = DEFAULT_BUDGET):
    """Min over all maximum kept sets of the constrained Lp fill optimum.

    Returns (error, optimizer); the optimizer is None for p = inf, where the
    feasibility search does not build a witness function.
    """
    budget.check(inst.n)
    _, witnesses = brute_max_isotonic_set(inst, budget)
    best = math.inf
    best_g = None
    for C in witnesses:
        g = None
        if p == 2:
            err, g = oracle_weak_l2_linear(inst, C)
        elif p == math.inf:
            err = oracle_weak_linf(inst, C)
        else:
            err, g = oracle_weak_lp(inst, C, p, budget)
        if err < best - 1e-12:
            best = err
            best_g = g
    return best, best_g


def _iter_nondecreasing(n, n_values):
    """All nondecreasing index sequences of length n over range(n_values)."""
    for comb in itertools.combinations_with_replacement(range(n_values), n):
        yield comb


def oracle_stage_lexmax(inst: Instance, budget: OracleBudget = DEFAULT_BUDGET):
    """Lexically last stage vector over every isotonic relabeling of a chain."""
    if not isinstance(inst.order, LinearOrder):
        raise TypeError("linear orders only")
    ell = inst.scale.n_labels
    budget.check(inst.n, ell)
    fr = inst.f_ranks
    n = inst.n
    best = None
    best_g = None
    for seq in _iter_nondecreasing(n, ell):
        ranks = np.asarray(seq, dtype=np.int64) + 1
        steps = np.abs(ranks - fr)
        hist = tuple(int(np.count_nonzero(steps == k)) for k in range(ell))
        if best is None or hist > best:
            best = hist
            best_g = ranks
    return best, best_g


def _iter_isotonic_subsets(inst: Instance):
    conf = _conflict_masks(inst)
    n = inst.n
    for mask in range(1 << n):
        m = mask
        ok = True
        while m:
            v = (m & -m).bit_length() - 1
            if conf[v] & mask:
                ok = False
                break
            m &= m - 1
        if ok:
            yield [v for v in range(n) if mask >> v & 1]


def _segment_l1_grid(inner, lo, hi):
    """Constrained L1 fit of one free run by a grid DP over clamped data values."""
    m = len(inner)
    if m == 0:
        return 0.0
    cand = sorted({min(max(float(v), lo), hi) for v in inner}
                  | {x for x in (lo, hi) if math.isfinite(x)})
    prev = [0.0] * len(cand)
    for v in inner:
        run = math.inf
        cur = []
        for c, y in enumerate(cand):
            run = min(run, prev[c])
            cur.append(run + abs(v - y))
        prev = cur
    return min(prev)


def _segment_linf_oracle(inner, lo, hi):
    """Minimum max deviation of a nondecreasing fill inside [lo, hi]."""
    m = len(inner)
    if m == 0:
        return 0.0
    cands = {0.0}
    for a in range(m):
        for b in range(m):
            cands.add(abs(inner[a] - inner[b]) / 2.0)
        if math.isfinite(lo):
            cands.add(abs(inner[a] - lo))
        if math.isfinite(hi):
            cands.add(abs(inner[a] - hi))

    def feasible(eps):
        cur = lo
        for v in inner:
            low = max(cur, v - eps)
            if low > v + eps + 1e-12 or low > hi + 1e-12:
                return False
            cur = low
        return True

    return min(e for e in sorted(cands) if feasible(e))


def oracle_penalized_table(inst: Instance, p, budget: OracleBudget = DEFAULT_BUDGET):
    """(fit-cost, kept-size) for every f-isotonic kept set on a chain.

    Fit costs decompose over the free runs between consecutive pins, so a
    segment-cost table indexed by the two pins makes the subset sweep cheap.
    """
    if not isinstance(inst.order, LinearOrder):
        raise TypeError("linear orders only")
    budget.check(inst.n)
    f = inst.f_values
    n = inst.n
    seg = {}
    for i in range(-1, n):
        lo = -math.inf if i < 0 else float(f[i])
        for j in range(i + 1, n + 1):
            hi = math.inf if j >= n else float(f[j])
            if hi < lo:
                continue
            inner = [float(x) for x in f[i + 1 : j]]
            if p == math.inf:
                seg[(i, j)] = _segment_linf_oracle(inner, lo, hi)
            elif p == 2:
                seg[(i, j)] = _segment_l2_oracle(np.asarray(inner), lo, hi)[0]
            else:
                seg[(i, j)] = _segment_l1_grid(inner, lo, hi)
    out = []
    combine = max if p == math.inf else sum
    for K in _iter_isotonic_subsets(inst):
        pins = [-1] + K + [n]
        parts = [seg[(a, b)] for a, b in zip(pins, pins[1:])]
        out.append((float(combine(parts)) if parts else 0.0, len(K)))
    return out


def oracle_penalized(inst: Instance, p, alpha, budget: OracleBudget = DEFAULT_BUDGET):
    """Minimum sum|f-g|^p + alpha * changed-count over isotonic g on a chain.

    Enumerates every f-isotonic kept set; overcounted alpha terms for
    coincidental agreements are covered by the larger kept set itself.
    """
    n = inst.n
    return min(fit + alpha * (n - size)
               for fit, size in oracle_penalized_table(inst, p, budget))


def brute_best_regression(inst: Instance, objective: str,
                          p=None, alpha=None, C=None,
                          budget: OracleBudget = DEFAULT_BUDGET):
    """Uniform entry point over the oracle objectives.

    objective is one of 'l0', 'weak-lp', 'weak-linf', 'strong-lp',
    'stage-lexmax', 'penalized'.  Returns (optimum, witness-or-None).
    """
    if objective == "l0":
        size, sets = brute_max_isotonic_set(inst, budget)
        return inst.n - size, sets[0]
    if objective == "weak-lp":
        err, g = oracle_weak_lp(inst, C, p, budget)
        return err, g
    if objective == "weak-linf":
        return oracle_weak_linf(inst, C), None
    if objective == "strong-lp":
        return oracle_strong_lp_linear(inst, p, budget)
    if objective == "stage-lexmax":
        hist, g = oracle_stage_lexmax(inst, budget)
        return hist, g
    if objective == "penalized":
        return oracle_penalized(inst, p, alpha, budget), None
    raise ValueError(f"unknown objective {objective!r}")


# ---------------------------------------------------------------------------
# seeded instance generators


def _scale_and_ranks(rng, n, max_labels):
    from .model import LabelFunction, LabelScale, validate

    n_vals = int(rng.integers(1, min(max_labels, n) + 1))
    pool = rng.choice(np.arange(-9, 10), size=n_vals, replace=False)
    vals = np.sort(pool.astype(np.float64))
    picks = vals[rng.integers(0, n_vals, size=n)]
    picks[rng.integers(0, n)] = vals[-1]  # every scale needs its labels used somewhere
    scale = LabelScale.from_values(np.unique(picks))
    ranks = [scale.rank_of(float(v)) for v in picks]
    return scale, LabelFunction.from_ranks(ranks)


def random_linear_instance(rng, max_n=10, max_labels=4) -> Instance:
    from .model import validate

    n = int(rng.integers(1, max_n + 1))
    scale, f = _scale_and_ranks(rng, n, max_labels)
    return validate(LinearOrder(n), f, scale)


def random_dag_instance(rng, max_n=9, max_labels=4, edge_prob=0.35) -> Instance:
    from .model import validate

    n = int(rng.integers(1, max_n + 1))
    edges = []
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < edge_prob:
                edges.append((u, v))
    scale, f = _scale_and_ranks(rng, n, max_labels)
    return validate(DagOrder(n, tuple(edges)), f, scale)


def random_points_instance(rng, max_n=9, max_labels=4, d=2) -> Instance:
    from .model import validate

    n = int(rng.integers(1, max_n + 1))
    coords = rng.integers(0, 5, size=(n, d)).astype(np.float64)
    scale, f = _scale_and_ranks(rng, n, max_labels)
    return validate(PointsOrder(coords), f, scale)
