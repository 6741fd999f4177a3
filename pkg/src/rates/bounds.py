"""
Rate model construction and the dominating thinning rate.
"""

import logging

from .base_rates import CONSTANT_MATRIX, LINEAR_LOAD_DEPENDENT, RateBounds, RateModel, RateModelSpec
from .constant_matrix import ConstantMatrixRates
from .load_dependent import LinearLoadDependentRates

logger = logging.getLogger(__name__)

RATE_MODELS = {
    CONSTANT_MATRIX: ConstantMatrixRates,
    LINEAR_LOAD_DEPENDENT: LinearLoadDependentRates,
}


def build_rate_model(spec: RateModelSpec, scenario) -> RateModel:
    """Instantiate the rate model class named by spec.variant."""
    try:
        model_class = RATE_MODELS[spec.variant]
    except KeyError:
        raise ValueError(f"unknown rate model variant: {spec.variant!r}") from None
    return model_class(spec, scenario)


def uniform_bound(spec: RateModelSpec, scenario) -> RateBounds:
    """
    Per-edge dominating rates and their network sum.

    For the load-dependent law the sup over the reachable load box is
    max(λ_down_max, λ_rep_max); for constant matrices it is the largest row
    sum. Both are scaled by spec.bound_inflation.

    Args:
        spec: Rate model parameters
        scenario: Validated scenario

    Returns:
        RateBounds with λ̄^e per edge
    """
    bounds = build_rate_model(spec, scenario).bounds()
    logger.debug("uniform rate bound %.6g (per edge %s)", bounds.total, bounds.per_edge)
    return bounds
