"""Hamming-optimal isotonic regression (monotonic relabeling) with secondary objectives.

The pipeline follows the classic three steps: build the violator dag of a
label function, extract a maximum antichain through a lower-bounded minimum
flow, and fill the windows the kept vertices induce.  On top of that sit the
secondary-objective solvers: weak/strong L1, L2, and Linf refinements, the
staged ordinal refinement, strong optimality on chains, and penalized
(Lp + alpha * Hamming) regression.
"""

from .model import (
    DagOrder,
    Instance,
    LabelFunction,
    LabelScale,
    LinearOrder,
    PointsOrder,
    RegressionResult,
    ValidationError,
    hamming_distance,
    is_isotonic,
    lp_error,
    validate,
)
from .violator import ViolatorDag, transitive_reduction, violating_pairs
from .flow import FlowNetwork, build_flow_graph, max_isotonic_set, minimum_flow
from .relabel import (
    Windows,
    l0_regression,
    l1_isotonic_dag,
    linf_midpoint,
    max_isotonic_vertices,
    strong_l0inf,
    trim,
    trim_err,
    weak_l00,
    weak_l01,
    weak_l02_approx,
    weak_l0inf,
    windows,
)
from .linear_strong import (
    segment_lp_errors,
    strong_l0_ordinal,
    strong_l0inf_linear,
    strong_l0p_linear,
)
from .penalized import (
    LisTracker,
    PersistentStatTree,
    lis_insert_only,
    penalized_linf,
    penalized_lp,
    segment_lp_penalized,
)

__version__ = "0.1.0"
