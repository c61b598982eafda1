"""Core domain types, validation, and metrics for monotonic relabeling.

Vertices are dense 0-based integers.  Labels live on an ordered scale and
are held internally as ranks 1..ell; numeric label values, when the scale
has them, are consulted only by the Lp metrics and the real-valued
regression routines.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ValidationError",
    "LabelScale",
    "LabelFunction",
    "LinearOrder",
    "DagOrder",
    "PointsOrder",
    "Instance",
    "validate",
    "is_isotonic",
    "hamming_distance",
    "lp_error",
    "RegressionResult",
]


class ValidationError(ValueError):
    """Malformed order, scale, or label function."""


# ---------------------------------------------------------------------------
# labels


@dataclass(frozen=True)
class LabelScale:
    """Ordered label alphabet, optionally with numeric values.

    Parameters
    ----------
    labels : tuple
        Distinct label tokens in strictly increasing order.
    numeric_values : tuple of float, optional
        Strictly increasing numeric value per label.  If omitted and every
        token itself parses as a number, those numbers are adopted.
    """

    labels: tuple
    numeric_values: tuple | None = None

    def __post_init__(self):
        labels = tuple(self.labels)
        object.__setattr__(self, "labels", labels)
        if len(labels) == 0:
            raise ValidationError("label scale is empty")
        if len(set(labels)) != len(labels):
            raise ValidationError("duplicate labels in scale")
        vals = self.numeric_values
        if vals is None:
            try:
                vals = tuple(float(x) for x in labels)
            except (TypeError, ValueError):
                vals = None
        else:
            vals = tuple(float(x) for x in vals)
            if len(vals) != len(labels):
                raise ValidationError("numeric_values must have one entry per label")
        if vals is not None:
            if any(b <= a for a, b in zip(vals, vals[1:])):
                raise ValidationError("numeric label values must be strictly increasing")
        object.__setattr__(self, "numeric_values", vals)

    @classmethod
    def from_values(cls, values) -> "LabelScale":
        """Scale holding the distinct numeric values occurring in `values`."""
        distinct = sorted({float(v) for v in values})
        if not distinct:
            raise ValidationError("no values given")
        return cls(labels=tuple(distinct))

    @classmethod
    def ordinal(cls, tokens) -> "LabelScale":
        """Purely ordinal scale (no metric) over `tokens` in the given order."""
        return cls(labels=tuple(tokens), numeric_values=None)

    @property
    def n_labels(self) -> int:
        return len(self.labels)

    @property
    def is_numeric(self) -> bool:
        return self.numeric_values is not None

    def rank_of(self, label) -> int:
        """1-based rank of a label token."""
        try:
            return self.labels.index(label) + 1
        except ValueError:
            raise ValidationError(f"label {label!r} not on the scale") from None

    def rank_values(self) -> np.ndarray:
        """Numeric value per rank (ranks themselves when the scale is ordinal)."""
        if self.numeric_values is not None:
            return np.asarray(self.numeric_values, dtype=np.float64)
        return np.arange(1, self.n_labels + 1, dtype=np.float64)

    def values_of(self, ranks) -> np.ndarray:
        return self.rank_values()[np.asarray(ranks, dtype=np.int64) - 1]


@dataclass(frozen=True)
class LabelFunction:
    """Per-vertex label assignment, stored as ranks 1..ell."""

    ranks: tuple

    def __post_init__(self):
        object.__setattr__(self, "ranks", tuple(int(r) for r in self.ranks))

    @classmethod
    def from_ranks(cls, ranks) -> "LabelFunction":
        return cls(ranks=tuple(ranks))

    @classmethod
    def from_labels(cls, labels, scale: LabelScale) -> "LabelFunction":
        return cls(ranks=tuple(scale.rank_of(x) for x in labels))

    def __len__(self) -> int:
        return len(self.ranks)


# ---------------------------------------------------------------------------
# orders


@dataclass(frozen=True)
class LinearOrder:
    """Chain 0 < 1 < ... < n-1."""

    n: int


@dataclass(frozen=True)
class DagOrder:
    """Explicit dag; the order is reachability over `edges`."""

    n: int
    edges: tuple

    def __post_init__(self):
        object.__setattr__(
            self, "edges", tuple((int(u), int(v)) for u, v in self.edges)
        )


@dataclass(frozen=True, eq=False)
class PointsOrder:
    """d-dimensional points under dominance: x < y iff x != y and x_i <= y_i for all i."""

    coords: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.coords, dtype=np.float64)
        object.__setattr__(self, "coords", arr)

    @property
    def n(self) -> int:
        return self.coords.shape[0]

    @property
    def d(self) -> int:
        return self.coords.shape[1]


OrderSpec = LinearOrder | DagOrder | PointsOrder


def _toposort(n: int, edges) -> np.ndarray:
    """Kahn topological order, lowest vertex id first among ready vertices."""
    indeg = np.zeros(n, dtype=np.int64)
    succ = [[] for _ in range(n)]
    for u, v in edges:
        succ[u].append(v)
        indeg[v] += 1
    import heapq

    ready = [v for v in range(n) if indeg[v] == 0]
    heapq.heapify(ready)
    order = []
    while ready:
        u = heapq.heappop(ready)
        order.append(u)
        for v in succ[u]:
            indeg[v] -= 1
            if indeg[v] == 0:
                heapq.heappush(ready, v)
    if len(order) != n:
        raise ValidationError("cycle detected in dag edges")
    return np.asarray(order, dtype=np.int64)


def _dominance_pairs(coords: np.ndarray):
    """All pairs (u, v) with v dominating u, as two index arrays."""
    n = coords.shape[0]
    us, vs = [], []
    for u in range(n):
        ge = np.all(coords >= coords[u], axis=1)
        ge[u] = False
        # ties in every coordinate are not dominance
        eq = np.all(coords == coords[u], axis=1)
        ge &= ~eq
        idx = np.nonzero(ge)[0]
        us.append(np.full(idx.size, u, dtype=np.int64))
        vs.append(idx.astype(np.int64))
    if not us:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    return np.concatenate(us), np.concatenate(vs)


class Instance:
    """Validated (order, label function, scale) triple.

    Immutable after construction; exposes the arrays and adjacency the
    algorithms sweep over.  Build through :func:`validate`.
    """

    def __init__(self, order: OrderSpec, f: LabelFunction, scale: LabelScale):
        self.order = order
        self.f = f
        self.scale = scale
        self.n = _order_size(order)
        self.f_ranks = np.asarray(f.ranks, dtype=np.int64)
        self._topo = None
        self._pred = None

    @property
    def f_values(self) -> np.ndarray:
        """Label values of f (numeric values when available, else ranks)."""
        return self.scale.values_of(self.f_ranks)

    @property
    def topo(self) -> np.ndarray:
        """A fixed linear extension of the order."""
        if self._topo is None:
            order = self.order
            if isinstance(order, LinearOrder):
                self._topo = np.arange(order.n, dtype=np.int64)
            elif isinstance(order, DagOrder):
                self._topo = _toposort(order.n, order.edges)
            else:
                keys = [tuple(row) for row in order.coords]
                self._topo = np.asarray(
                    sorted(range(order.n), key=lambda i: (keys[i], i)), dtype=np.int64
                )
        return self._topo

    @property
    def pred_lists(self) -> list:
        """Direct predecessors per vertex (their closure generates the order)."""
        if self._pred is None:
            order = self.order
            pred = [[] for _ in range(self.n)]
            if isinstance(order, LinearOrder):
                for v in range(1, order.n):
                    pred[v].append(v - 1)
            elif isinstance(order, DagOrder):
                for u, v in order.edges:
                    pred[v].append(u)
            else:
                us, vs = _dominance_pairs(order.coords)
                for u, v in zip(us.tolist(), vs.tolist()):
                    pred[v].append(u)
            self._pred = pred
        return self._pred


def _order_size(order: OrderSpec) -> int:
    return order.n


def validate(order: OrderSpec, f: LabelFunction, scale: LabelScale) -> Instance:
    """Check mutual consistency and return a normalized instance.

    Raises
    ------
    ValidationError
        On a cycle in dag edges, a rank out of 1..ell, a coordinate
        dimension mismatch, or a size mismatch between order and f.
    """
    n = _order_size(order)
    if n < 1:
        raise ValidationError("order must contain at least one vertex")
    if len(f) != n:
        raise ValidationError(f"label function has {len(f)} entries for {n} vertices")
    ell = scale.n_labels
    if ell > n:
        raise ValidationError("scale has more labels than vertices; include only labels that occur")
    ranks = np.asarray(f.ranks, dtype=np.int64)
    if ranks.size and (ranks.min() < 1 or ranks.max() > ell):
        raise ValidationError("rank out of range for the attached scale")
    if isinstance(order, DagOrder):
        for u, v in order.edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValidationError(f"edge ({u},{v}) out of vertex range")
        _toposort(n, order.edges)  # cycle check
    elif isinstance(order, PointsOrder):
        if order.coords.ndim != 2:
            raise ValidationError("dimension mismatch: coords must be an n x d array")
        if order.coords.shape[0] != n or order.coords.shape[1] < 1:
            raise ValidationError("dimension mismatch in point coordinates")
    inst = Instance(order, f, scale)
    inst.topo  # force the linear-extension computation (and dag cycle check)
    return inst


# ---------------------------------------------------------------------------
# metrics


def is_isotonic(order: OrderSpec, g) -> bool:
    """True iff there is no u < v in the order with g(u) > g(v)."""
    g = np.asarray(g)
    if isinstance(order, LinearOrder):
        return bool(np.all(g[1:] >= g[:-1])) if g.size > 1 else True
    if isinstance(order, DagOrder):
        return all(g[u] <= g[v] for u, v in order.edges)
    coords = order.coords
    for u in range(order.n):
        ge = np.all(coords >= coords[u], axis=1)
        ge[u] = False
        ge &= ~np.all(coords == coords[u], axis=1)
        if np.any(g[ge] < g[u]):
            return False
    return True


def hamming_distance(f, g) -> int:
    """Number of vertices whose label differs between f and g."""
    f = np.asarray(f)
    g = np.asarray(g)
    if f.shape != g.shape:
        raise ValidationError("length mismatch between label functions")
    return int(np.count_nonzero(f != g))


def lp_error(f, g, p) -> float:
    """Lp distance between two value sequences.

    p = 0 counts changed positions, p = inf is the max absolute deviation,
    and 1 <= p < inf is the usual norm (sum of |f-g|^p to the 1/p).
    """
    f = np.asarray(f, dtype=np.float64)
    g = np.asarray(g, dtype=np.float64)
    if f.shape != g.shape:
        raise ValidationError("length mismatch between label functions")
    if p == 0:
        return float(hamming_distance(f, g))
    if p == math.inf:
        return float(np.max(np.abs(f - g))) if f.size else 0.0
    if p < 1:
        raise ValidationError("p < 1 is only defined for the L0 case")
    return float(np.sum(np.abs(f - g) ** p) ** (1.0 / p))


# ---------------------------------------------------------------------------
# results


@dataclass
class RegressionResult:
    """Outcome of a relabeling/regression routine.

    g is in the label value domain (numeric values when the scale has them,
    otherwise ranks); g_ranks is set whenever every value of g is a label.
    lp_error uses the summed |f-g|^p convention for finite p and the max
    deviation for p = inf.  stage_counts[k] counts vertices moved exactly k
    rank steps and is present only for label-valued outputs.
    """

    g: np.ndarray
    kept_set: list
    l0_distance: int
    g_ranks: np.ndarray | None = None
    stage_counts: tuple | None = None
    lp_error: float | None = None
    lp_p: float | None = None
    objective: float | None = None
    alpha: float | None = None

    def __post_init__(self):
        self.g = np.asarray(self.g)
        self.kept_set = sorted(int(v) for v in self.kept_set)


def finish_result(
    inst: Instance,
    g_values: np.ndarray,
    lp_p=None,
    objective=None,
    alpha=None,
) -> RegressionResult:
    """Assemble a RegressionResult from a fitted value sequence."""
    fvals = inst.f_values
    g_values = np.asarray(g_values, dtype=np.float64)
    kept = np.nonzero(g_values == fvals)[0].tolist()
    l0 = int(inst.n - len(kept))
    scale_vals = inst.scale.rank_values()
    pos = np.searchsorted(scale_vals, g_values)
    pos = np.clip(pos, 0, scale_vals.size - 1)
    on_scale = np.isclose(scale_vals[pos], g_values, rtol=0.0, atol=0.0)
    g_ranks = None
    stage_counts = None
    if bool(np.all(on_scale)):
        g_ranks = (pos + 1).astype(np.int64)
        steps = np.abs(g_ranks - inst.f_ranks)
        stage_counts = tuple(
            int(np.count_nonzero(steps == k)) for k in range(inst.scale.n_labels)
        )
    lpv = None
    if lp_p is not None:
        diff = np.abs(fvals - g_values)
        lpv = float(np.max(diff)) if lp_p == math.inf else float(np.sum(diff ** lp_p))
    return RegressionResult(
        g=g_values,
        kept_set=kept,
        l0_distance=l0,
        g_ranks=g_ranks,
        stage_counts=stage_counts,
        lp_error=lpv,
        lp_p=lp_p,
        objective=objective,
        alpha=alpha,
    )
