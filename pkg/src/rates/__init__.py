from .base_rates import (
    CONSTANT_MATRIX,
    LINEAR_LOAD_DEPENDENT,
    RateBounds,
    RateModel,
    RateModelSpec,
)
from .constant_matrix import ConstantMatrixRates
from .load_dependent import LinearLoadDependentRates
from .load_indicators import ur, rwip, utilization_ratios, work_in_progress_ratios
from .bounds import build_rate_model, uniform_bound

__all__ = [
    'CONSTANT_MATRIX',
    'LINEAR_LOAD_DEPENDENT',
    'RateBounds',
    'RateModel',
    'RateModelSpec',
    'ConstantMatrixRates',
    'LinearLoadDependentRates',
    'ur',
    'rwip',
    'utilization_ratios',
    'work_in_progress_ratios',
    'build_rate_model',
    'uniform_bound'
]
