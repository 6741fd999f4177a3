from .metrics import (
    discrete_tv,
    g_net_out,
    mass_balance_residual,
    q_net,
    stationary_capacity,
    variation_profile,
)
from .statistics import (
    HISTOGRAM_BINS,
    TERMINAL_MEASURES,
    TIME_SERIES_MEASURES,
    EnsembleStats,
    RunningMoments,
    accumulate,
    merge,
    merge_all,
)
from .statistical_tests import DistributionTestRunner
from .benchmarks import (
    CapacityBenchmark,
    ReferenceEvaluator,
    ReferenceValue,
    availability,
    is_strictly_monotone,
)
from .ensemble import EnsembleConfig, EnsembleResult, run_ensemble

__all__ = [
    'discrete_tv',
    'g_net_out',
    'mass_balance_residual',
    'q_net',
    'stationary_capacity',
    'variation_profile',
    'HISTOGRAM_BINS',
    'TERMINAL_MEASURES',
    'TIME_SERIES_MEASURES',
    'EnsembleStats',
    'RunningMoments',
    'accumulate',
    'merge',
    'merge_all',
    'DistributionTestRunner',
    'CapacityBenchmark',
    'ReferenceEvaluator',
    'ReferenceValue',
    'availability',
    'is_strictly_monotone',
    'EnsembleConfig',
    'EnsembleResult',
    'run_ensemble'
]
