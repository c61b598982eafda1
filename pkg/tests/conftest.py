import os

import numpy as np
import pytest

from monorelab.model import (
    DagOrder,
    LabelFunction,
    LabelScale,
    LinearOrder,
    PointsOrder,
    validate,
)

MASTER_SEED = 20240817


def linear_from_values(vals):
    """Validated linear instance whose scale is the distinct values of vals."""
    scale = LabelScale.from_values(vals)
    f = LabelFunction.from_ranks([scale.rank_of(float(v)) for v in vals])
    return validate(LinearOrder(len(vals)), f, scale)


def dag_from_values(edges, vals):
    scale = LabelScale.from_values(vals)
    f = LabelFunction.from_ranks([scale.rank_of(float(v)) for v in vals])
    return validate(DagOrder(len(vals), tuple(edges)), f, scale)


def points_from_values(coords, vals):
    scale = LabelScale.from_values(vals)
    f = LabelFunction.from_ranks([scale.rank_of(float(v)) for v in vals])
    return validate(PointsOrder(np.asarray(coords, dtype=float)), f, scale)


def trials(default):
    """Number of randomized trials; override with MONORELAB_TRIALS."""
    return int(os.environ.get("MONORELAB_TRIALS", default))


@pytest.fixture
def rng():
    return np.random.default_rng(MASTER_SEED)
