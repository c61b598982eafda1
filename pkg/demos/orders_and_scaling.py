"""The same pipeline over explicit dags and multidimensional points, plus a
look at how large the violator dag can get.
"""
import pathlib
import sys
import time

import numpy as np

from monorelab import (
    DagOrder,
    LabelFunction,
    LabelScale,
    LinearOrder,
    PointsOrder,
    l0_regression,
    validate,
    weak_l0inf,
)
from monorelab.linear_strong import strong_l0_ordinal
from monorelab.violator import transitive_reduction, violating_pairs

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent))
from _common import linear_instance  # noqa: E402

# --- an explicit dag (a diamond) -------------------------------------------
scale = LabelScale.from_values([0, 1, 2])
dag = DagOrder(4, ((0, 1), (0, 2), (1, 3), (2, 3)))
f = LabelFunction.from_ranks([3, 2, 2, 3])  # top label first: two violations
inst = validate(dag, f, scale)
res = l0_regression(inst)
print("diamond dag labels:", inst.f_values.tolist(), "->", res.g.tolist(),
      f"({res.l0_distance} changed)")

# --- 2-D points under dominance --------------------------------------------
rng = np.random.default_rng(11)
coords = rng.integers(0, 6, size=(10, 2)).astype(float)
labels = rng.integers(0, 3, size=10) + 1
labels[0] = 3  # every label occurs
pts = validate(PointsOrder(coords), LabelFunction.from_ranks(labels),
               LabelScale.from_values([10, 20, 30]))
res = weak_l0inf(pts)
print("\n2-D points:", [tuple(map(int, c)) for c in coords])
print("labels    :", pts.f_values.tolist())
print("relabeled :", res.g.tolist(), f"  max deviation {res.lp_error}")

# --- how big the violator dag gets -----------------------------------------
print("\nhalf-swap family: the closure reaches n^2/4 edges")
print(f"  {'n':>6} {'violators':>9} {'closure':>8} {'reduction':>9}")
for n in (8, 32, 128):
    vals = list(range(n // 2 + 1, n + 1)) + list(range(1, n // 2 + 1))
    vio = violating_pairs(linear_instance(vals))
    red = transitive_reduction(vio)
    print(f"  {n:>6} {len(vio.vio_vertices):>9} {len(vio.edges):>8} {len(red.edges):>9}")

# --- the staged ordinal solver at scale -------------------------------------
n, ell = 100_000, 10
ranks = np.random.default_rng(0).integers(1, ell + 1, size=n)
ranks[:ell] = np.arange(1, ell + 1)
big = validate(
    LinearOrder(n),
    LabelFunction.from_ranks(ranks),
    LabelScale.from_values(list(range(ell))),
)
strong_l0_ordinal(linear_instance([2, 1, 3]))  # warm the jit once
t0 = time.perf_counter()
res = strong_l0_ordinal(big)
print(f"\nstrong ordinal relabeling of n={n}, ell={ell}: "
      f"{time.perf_counter() - t0:.2f}s, stage vector {res.stage_counts}")
