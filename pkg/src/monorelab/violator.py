"""Violator dags: the partial order of violating pairs.

A violating pair is u < v in the base order with f(u) > f(v).  The violator
dag collects exactly the vertices appearing in at least one such pair;
vertices outside it keep their label in every Hamming-optimal relabeling.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import DagOrder, Instance, LinearOrder, PointsOrder, _dominance_pairs

__all__ = ["ViolatorDag", "violating_pairs", "violating_pairs_dag",
           "violating_pairs_points", "transitive_reduction"]


@dataclass(frozen=True)
class ViolatorDag:
    """Vertices and edges of the violating-pair order.

    `edges` is either the full transitive closure of the violating-pair
    relation (is_closure=True) or its transitive reduction; reachability is
    identical either way.
    """

    n: int                      # size of the underlying vertex set
    vio_vertices: tuple         # sorted vertex ids taking part in a violation
    edges: tuple                # (u, v) pairs, deterministic order
    is_closure: bool

    def succ_sets(self) -> dict:
        succ = {v: set() for v in self.vio_vertices}
        for u, v in self.edges:
            succ[u].add(v)
        return succ


def _from_pairs(n: int, us: np.ndarray, vs: np.ndarray, is_closure: bool) -> ViolatorDag:
    pairs = sorted(zip(us.tolist(), vs.tolist()))
    verts = sorted({u for u, _ in pairs} | {v for _, v in pairs})
    return ViolatorDag(n=n, vio_vertices=tuple(verts), edges=tuple(pairs),
                       is_closure=is_closure)


def _linear_closure(fvals: np.ndarray) -> tuple:
    """All (u, v) with u < v and f(u) > f(v) on a chain."""
    us, vs = [], []
    n = fvals.size
    for u in range(n - 1):
        hit = np.nonzero(fvals[u + 1:] < fvals[u])[0]
        if hit.size:
            us.append(np.full(hit.size, u, dtype=np.int64))
            vs.append(hit.astype(np.int64) + u + 1)
    if not us:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    return np.concatenate(us), np.concatenate(vs)


def violating_pairs_dag(inst: Instance) -> ViolatorDag:
    """Transitive closure of the violating-pair order for linear/dag instances.

    Reachability is computed by one BFS per vertex over the given edges
    (theta(n m)); linear orders take a vectorized suffix scan instead.
    """
    order = inst.order
    f = inst.f_ranks
    if isinstance(order, LinearOrder):
        us, vs = _linear_closure(f)
        return _from_pairs(order.n, us, vs, True)
    if not isinstance(order, DagOrder):
        raise TypeError("violating_pairs_dag expects a linear or dag order")
    n = order.n
    succ = [[] for _ in range(n)]
    for u, v in order.edges:
        succ[u].append(v)
    us_all, vs_all = [], []
    seen = np.zeros(n, dtype=bool)
    for u in range(n):
        seen[:] = False
        stack = list(succ[u])
        reach = []
        while stack:
            w = stack.pop()
            if seen[w]:
                continue
            seen[w] = True
            reach.append(w)
            stack.extend(succ[w])
        for v in reach:
            if f[u] > f[v]:
                us_all.append(u)
                vs_all.append(v)
    return _from_pairs(n, np.asarray(us_all, dtype=np.int64),
                       np.asarray(vs_all, dtype=np.int64), True)


def violating_pairs_points(inst: Instance) -> ViolatorDag:
    """Violator dag of a point set by the O(n^2) pairwise dominance scan."""
    order = inst.order
    if not isinstance(order, PointsOrder):
        raise TypeError("violating_pairs_points expects a point-set order")
    f = inst.f_ranks
    us, vs = _dominance_pairs(order.coords)
    keep = f[us] > f[vs]
    return _from_pairs(order.n, us[keep], vs[keep], True)


def violating_pairs(inst: Instance) -> ViolatorDag:
    """Dispatch on the order variant."""
    if isinstance(inst.order, PointsOrder):
        return violating_pairs_points(inst)
    return violating_pairs_dag(inst)


def transitive_reduction(vio: ViolatorDag) -> ViolatorDag:
    """Minimal edge set with the same reachability (unique for dags).

    An edge (u, v) is dropped iff v is reachable from u through at least two
    edges; vertices are processed in sorted order for determinism.
    """
    succ = vio.succ_sets()
    kept = []
    for u in vio.vio_vertices:
        direct = sorted(succ[u])
        two_hop = set()
        for w in direct:
            two_hop |= succ[w]
        # successors of successors may chain further, but on a closure every
        # multi-edge path is witnessed by some length-2 path
        for v in direct:
            if v not in two_hop:
                kept.append((u, v))
    kept.sort()
    return ViolatorDag(n=vio.n, vio_vertices=vio.vio_vertices,
                       edges=tuple(kept), is_closure=False)
