"""Relabeling an ordinal dataset with the fewest possible changes.

Walks the full pipeline on a small weight-category survey: find the
violating pairs, pick a maximum set of records to leave untouched, and move
every other record the smallest admissible amount.
"""
from monorelab import (
    LabelFunction,
    LabelScale,
    LinearOrder,
    l0_regression,
    max_isotonic_vertices,
    validate,
    weak_l00,
    windows,
)
from monorelab.linear_strong import strong_l0_ordinal
from monorelab.violator import transitive_reduction, violating_pairs

scale = LabelScale.ordinal(("under", "normal", "over", "obese"))
categories = ["normal", "over", "obese", "under", "under", "normal", "over", "over"]
print("records ordered by carbohydrate intake:")
print(" ", categories)

inst = validate(
    LinearOrder(len(categories)),
    LabelFunction.from_labels(categories, scale),
    scale,
)

vio = violating_pairs(inst)
print(f"\nviolating pairs: {len(vio.edges)} among {len(vio.vio_vertices)} records")
print("  closure edges:", vio.edges)
red = transitive_reduction(vio)
print("  reduction    :", red.edges)

kept, _ = max_isotonic_vertices(inst)
print("\nlargest set of records we can keep as-is:", kept)

w = windows(inst, kept)
print("admissible label windows per record (rank space):")
for v in range(inst.n):
    lo, hi = w.lo_rank[v], w.hi_rank[v]
    mark = "*" if v in kept else " "
    print(f"  {mark} record {v}: [{scale.labels[lo - 1]}, {scale.labels[hi - 1]}]")

res = l0_regression(inst)
relabeled = [scale.labels[r - 1] for r in res.g_ranks]
print(f"\nminimum-change relabeling ({res.l0_distance} records move):")
print(" ", relabeled)

staged = weak_l00(inst)
print("\nstaged refinement (prefer one-step moves, then two-step, ...):")
print("  per-distance counts:", staged.stage_counts)
print("  relabeling:", [scale.labels[r - 1] for r in staged.g_ranks])

strong = strong_l0_ordinal(inst)
print("\nlexically best stage vector over all monotonic relabelings:")
print("  per-distance counts:", strong.stage_counts)
print("  relabeling:", [scale.labels[r - 1] for r in strong.g_ranks])
