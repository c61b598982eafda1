"""Lower-bounded flow graphs over violator dags and maximum antichains.

Each violator vertex u splits into u_in -> u_out with lower bound 1 (0 when
the vertex is not required); violator edges, source, and sink arcs carry
lower bound 0 and unbounded capacity.  The minimum feasible s->t flow value
equals the maximum antichain size, and the antichain is read off the unit
arcs crossing the canonical s-side cut of the final residual network.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .violator import ViolatorDag

__all__ = ["FlowNetwork", "build_flow_graph", "minimum_flow", "max_isotonic_set"]

INF = 1 << 60


@dataclass
class FlowNetwork:
    """Split-vertex flow graph of a violator dag.

    Arcs are parallel arrays; `unit_arcs` maps each violator vertex to the
    index of its u_in -> u_out arc.  `flow` is filled in by minimum_flow.
    """

    n_nodes: int
    source: int
    sink: int
    tail: np.ndarray
    head: np.ndarray
    lower: np.ndarray
    unit_arcs: dict
    vio: ViolatorDag
    flow: np.ndarray | None = None

    @property
    def n_arcs(self) -> int:
        return self.tail.size

    def node_in(self, v: int) -> int:
        return 2 + 2 * self._slot[v]

    def node_out(self, v: int) -> int:
        return 3 + 2 * self._slot[v]

    _slot: dict = field(default_factory=dict)


def build_flow_graph(vio: ViolatorDag, required=None) -> FlowNetwork:
    """Construct the split-vertex network for a violator dag.

    required[v] = False drops the lower bound of v's unit arc to 0, leaving
    the vertex as a pass-through (used by the staged and the binary-search
    solvers).  Node ids: 0 = source, 1 = sink, then (in, out) pairs in
    sorted violator-vertex order.
    """
    verts = list(vio.vio_vertices)
    slot = {v: i for i, v in enumerate(verts)}
    n_nodes = 2 + 2 * len(verts)
    has_in = {v: False for v in verts}
    has_out = {v: False for v in verts}
    for u, v in vio.edges:
        has_out[u] = True
        has_in[v] = True

    tails, heads, lowers = [], [], []
    unit_arcs = {}

    def add(t, h, lo):
        tails.append(t)
        heads.append(h)
        lowers.append(lo)
        return len(tails) - 1

    for v in verts:
        if not has_in[v]:
            add(0, 2 + 2 * slot[v], 0)
    for v in verts:
        lo = 1
        if required is not None and not required.get(v, True):
            lo = 0
        unit_arcs[v] = add(2 + 2 * slot[v], 3 + 2 * slot[v], lo)
    for u, v in vio.edges:
        add(3 + 2 * slot[u], 2 + 2 * slot[v], 0)
    for v in verts:
        if not has_out[v]:
            add(3 + 2 * slot[v], 1, 0)

    net = FlowNetwork(
        n_nodes=n_nodes,
        source=0,
        sink=1,
        tail=np.asarray(tails, dtype=np.int64),
        head=np.asarray(heads, dtype=np.int64),
        lower=np.asarray(lowers, dtype=np.int64),
        unit_arcs=unit_arcs,
        vio=vio,
    )
    net._slot = slot
    return net


class _Dinic:
    """Blocking-flow max flow on an adjacency-list residual graph."""

    def __init__(self, n):
        self.n = n
        self.to = []
        self.cap = []
        self.adj = [[] for _ in range(n)]

    def add_edge(self, u, v, cap):
        self.adj[u].append(len(self.to))
        self.to.append(v)
        self.cap.append(cap)
        self.adj[v].append(len(self.to))
        self.to.append(u)
        self.cap.append(0)
        return len(self.to) - 2

    def max_flow(self, s, t):
        to, cap, adj = self.to, self.cap, self.adj
        total = 0
        n = self.n
        while True:
            level = [-1] * n
            level[s] = 0
            q = deque([s])
            while q:
                u = q.popleft()
                for e in adj[u]:
                    v = to[e]
                    if cap[e] > 0 and level[v] < 0:
                        level[v] = level[u] + 1
                        q.append(v)
            if level[t] < 0:
                return total
            it = [0] * n
            # iterative blocking-flow DFS; path holds the edge ids taken
            path = []
            u = s
            while True:
                if u == t:
                    pushed = min(cap[e] for e in path)
                    for e in path:
                        cap[e] -= pushed
                        cap[e ^ 1] += pushed
                    total += pushed
                    # retreat to the first saturated edge
                    cut = next(i for i, e in enumerate(path) if cap[e] == 0)
                    path = path[:cut]
                    u = to[path[-1]] if path else s
                    continue
                advanced = False
                while it[u] < len(adj[u]):
                    e = adj[u][it[u]]
                    v = to[e]
                    if cap[e] > 0 and level[v] == level[u] + 1:
                        path.append(e)
                        u = v
                        advanced = True
                        break
                    it[u] += 1
                if advanced:
                    continue
                if u == s:
                    break
                level[u] = -1  # dead end for this phase
                e = path.pop()
                u = to[e ^ 1]


def _feasible_flow(net: FlowNetwork) -> np.ndarray:
    """Route one s->t path through every required unit arc.

    Paths climb an arbitrary (lowest-id) predecessor chain to a minimal
    violator vertex and descend a successor chain to a maximal one, so the
    initial value equals the number of required vertices.
    """
    vio = net.vio
    pred = {v: None for v in vio.vio_vertices}
    succ = {v: None for v in vio.vio_vertices}
    for u, v in vio.edges:  # edges sorted: lowest partner wins
        if succ[u] is None:
            succ[u] = v
        if pred[v] is None:
            pred[v] = u

    arc_of_edge = {}
    n_src = sum(1 for v in vio.vio_vertices if pred[v] is None)
    base_edges = n_src + len(vio.vio_vertices)
    for i, (u, v) in enumerate(vio.edges):
        arc_of_edge[(u, v)] = base_edges + i
    src_arc = {}
    snk_arc = {}
    k = 0
    for v in vio.vio_vertices:
        if pred[v] is None:
            src_arc[v] = k
            k += 1
    k = base_edges + len(vio.edges)
    for v in vio.vio_vertices:
        if succ[v] is None:
            snk_arc[v] = k
            k += 1

    flow = np.zeros(net.n_arcs, dtype=np.int64)
    for v in vio.vio_vertices:
        if net.lower[net.unit_arcs[v]] == 0:
            continue
        up = [v]
        while pred[up[-1]] is not None:
            up.append(pred[up[-1]])
        down = [v]
        while succ[down[-1]] is not None:
            down.append(succ[down[-1]])
        chain = list(reversed(up)) + down[1:]
        flow[src_arc[chain[0]]] += 1
        for a, b in zip(chain, chain[1:]):
            flow[net.unit_arcs[a]] += 1
            flow[arc_of_edge[(a, b)]] += 1
        flow[net.unit_arcs[chain[-1]]] += 1
        flow[snk_arc[chain[-1]]] += 1
    return flow


def minimum_flow(net: FlowNetwork) -> int:
    """Minimum integral s->t flow meeting every lower bound.

    Builds the feasible flow, then cancels the excess with a blocking-flow
    max flow from sink to source on the residual network.  Per-arc flows are
    stored on the network; the value is returned.
    """
    flow = _feasible_flow(net)
    feas_value = int(flow[net.tail == net.source].sum())

    din = _Dinic(net.n_nodes)
    reduce_edge = np.empty(net.n_arcs, dtype=np.int64)
    for a in range(net.n_arcs):
        # pushing t->s flow backward along an arc reclaims flow above the
        # lower bound; the paired reverse edge allows re-increasing it
        e = din.add_edge(int(net.head[a]), int(net.tail[a]),
                         int(flow[a] - net.lower[a]))
        din.cap[e ^ 1] = INF
        reduce_edge[a] = e
    cancelled = din.max_flow(net.sink, net.source)

    final = net.lower + np.asarray([din.cap[reduce_edge[a]] for a in range(net.n_arcs)],
                                   dtype=np.int64)
    net.flow = final
    value = feas_value - cancelled
    assert value == int(final[net.tail == net.source].sum())
    return value


def max_isotonic_set(vio: ViolatorDag, required=None):
    """Maximum f-isotonic subset of the violator vertices.

    Returns (C, net) where C is the antichain read from the canonical
    s-reachable cut of the solved network.  With `required`, C is maximum
    among antichains avoiding the non-required vertices.
    """
    net = build_flow_graph(vio, required)
    value = minimum_flow(net)

    # residual traversal: forward along arcs with slack above the lower
    # bound, backward along any arc (capacities are unbounded)
    fwd = [[] for _ in range(net.n_nodes)]
    bwd = [[] for _ in range(net.n_nodes)]
    flow = net.flow
    for a in range(net.n_arcs):
        t, h = int(net.tail[a]), int(net.head[a])
        if flow[a] > net.lower[a]:
            fwd[t].append(h)
        bwd[h].append(t)
    seen = np.zeros(net.n_nodes, dtype=bool)
    seen[net.source] = True
    q = deque([net.source])
    while q:
        u = q.popleft()
        for v in fwd[u]:
            if not seen[v]:
                seen[v] = True
                q.append(v)
        for v in bwd[u]:
            if not seen[v]:
                seen[v] = True
                q.append(v)

    chosen = []
    for v in vio.vio_vertices:
        a = net.unit_arcs[v]
        if net.lower[a] == 1 and seen[net.tail[a]] and not seen[net.head[a]]:
            chosen.append(v)
    assert len(chosen) == value, "cut size disagrees with the minimum flow"
    return chosen, net
