from .signals import PiecewiseConstantSignal, SignalTable, eval_signal
from .topology import Edge, Topology
from .scenario import (
    CapacityTable,
    DistributionRates,
    InitialState,
    ProcessorParams,
    Scenario,
    density_flux_bounds,
    queue_bounds,
)
from .validation import ValidationReport, validate_scenario

__all__ = [
    'PiecewiseConstantSignal',
    'SignalTable',
    'eval_signal',
    'Edge',
    'Topology',
    'CapacityTable',
    'DistributionRates',
    'InitialState',
    'ProcessorParams',
    'Scenario',
    'density_flux_bounds',
    'queue_bounds',
    'ValidationReport',
    'validate_scenario'
]
