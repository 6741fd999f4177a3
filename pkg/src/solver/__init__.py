from .grid import Grid
from .state import FluxLedger, NetworkState, l1_distance
from .fluxes import (
    compute_g_in,
    compute_g_out,
    exit_fluxes,
    flux,
    step_g_in,
    upwind_edge_step,
    upwind_network_step,
)
from .evolution import FlowCursor, evolve, step

__all__ = [
    'Grid',
    'FluxLedger',
    'NetworkState',
    'l1_distance',
    'compute_g_in',
    'compute_g_out',
    'exit_fluxes',
    'flux',
    'step_g_in',
    'upwind_edge_step',
    'upwind_network_step',
    'FlowCursor',
    'evolve',
    'step'
]
