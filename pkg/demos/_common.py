"""Small builders shared by the demo scripts."""
from monorelab import LabelFunction, LabelScale, LinearOrder, validate


def linear_instance(values):
    scale = LabelScale.from_values(values)
    f = LabelFunction.from_ranks([scale.rank_of(float(v)) for v in values])
    return validate(LinearOrder(len(values)), f, scale)
