"""Trading fit quality against the number of changed values.

penalized_lp / penalized_linf minimize sum|f-g|^p + alpha * (#changed):
small alpha approaches the unconstrained isotonic fit, large alpha keeps
more of the data untouched.
"""
import pathlib
import sys

import numpy as np

from monorelab import penalized_linf, penalized_lp

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent))
from _common import linear_instance  # noqa: E402

rng = np.random.default_rng(5)
vals = np.cumsum(rng.integers(-2, 4, size=14))
inst = linear_instance(vals)
print("noisy data:", vals.tolist())

print("\nalpha sweep, p = 2:")
print(f"  {'alpha':>6} {'changed':>8} {'sum sq err':>11} {'objective':>10}")
for alpha in (0.1, 0.5, 1.0, 2.0, 5.0, 20.0):
    res = penalized_lp(inst, alpha, 2)
    print(f"  {alpha:>6} {res.l0_distance:>8} {res.lp_error:>11.3f} {res.objective:>10.3f}")

print("\nalpha sweep, p = 1:")
for alpha in (0.1, 1.0, 5.0):
    res = penalized_lp(inst, alpha, 1)
    print(f"  alpha={alpha}: changed {res.l0_distance}, fit {res.g}")

# the max-norm variant cannot split into independent halves
vals2 = [0, 3, -3, -3, 0, -6, 6, 0]
inst2 = linear_instance(vals2)
print("\ndata:", vals2)
res = penalized_linf(inst2, 2.0)
print("penalized Linf at alpha=2:", res.g)
print("  max error", res.lp_error, " changed", res.l0_distance,
      " objective", res.objective)
glue = np.zeros(8)
obj_glue = max(abs(np.asarray(vals2, float) - glue)) + 2.0 * np.count_nonzero(
    np.asarray(vals2, float) != glue)
print("  gluing the separately-optimal halves would score", obj_glue)
