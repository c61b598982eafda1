"""Choosing among the many Hamming-optimal relabelings of numeric data.

Two small sequences show why the obvious shortcuts fail: optimizing L1
first and trimming after loses to trimming first, while for the max norm
it is the other way around.  The strong solvers then minimize over every
maximum kept set at once.
"""
import math

import numpy as np

from monorelab import (
    l1_isotonic_dag,
    linf_midpoint,
    lp_error,
    max_isotonic_vertices,
    strong_l0inf,
    weak_l01,
    weak_l0inf,
    windows,
)
from monorelab.linear_strong import strong_l0inf_linear, strong_l0p_linear
from monorelab.relabel import trim_err

import sys
import pathlib

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent))
from _common import linear_instance  # noqa: E402

# --- L1 refinement ---------------------------------------------------------
vals = [0, 3, 1, -1, -2, -3, -4, 2]
inst = linear_instance(vals)
kept, _ = max_isotonic_vertices(inst)
print("data:", vals)
print("unique maximum kept set:", kept)

plain = l1_isotonic_dag(inst, inst.f_values)
trimmed_after = windows(inst, kept).clip_values(plain)
print("\nL1-optimize then trim:", trimmed_after,
      " L1 error", np.abs(inst.f_values - trimmed_after).sum())

res = weak_l01(inst)
print("trim then L1-optimize:", res.g, " L1 error", res.lp_error)

# --- Linf refinement -------------------------------------------------------
vals2 = [0, 0, 8, -2, 2, 2]
inst2 = linear_instance(vals2)
kept2, _ = max_isotonic_vertices(inst2)
w2 = windows(inst2, kept2)
print("\ndata:", vals2)
print("trim-err per vertex:", trim_err(inst2))

trim_first = linear_instance(list(w2.clip_values(inst2.f_values)))
alt = linf_midpoint(trim_first)
print("trim then Linf-optimize:", alt, " max error",
      lp_error(inst2.f_values, alt, math.inf))

res2 = weak_l0inf(inst2)
print("Linf-optimize then trim:", res2.g, " max error", res2.lp_error)

strong2 = strong_l0inf(inst2)
print("best over all maximum kept sets:", strong2.g, " max error", strong2.lp_error)
print("(same instance through the chain-only route:",
      strong_l0inf_linear(inst2).g, ")")

# --- strong Lp on a chain --------------------------------------------------
vals3 = [0, 5, 5, -1, 3, 3]
inst3 = linear_instance(vals3)
print("\ndata:", vals3)
for p in (1, 2):
    r = strong_l0p_linear(inst3, p)
    print(f"strong L0,{p} regression: {r.g}  sum|f-g|^{p} = {r.lp_error}")
