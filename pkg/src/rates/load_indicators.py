"""
Load indicators UR (utilization ratio) and RWIP (ratio of work in progress).

Both are cell sums over an edge normalized by μ_e^max·L^e. A processor with
μ_e^max = 0 has both indicators defined as 0.
"""

from typing import TYPE_CHECKING, Sequence

import numpy as np

if TYPE_CHECKING:
    from ..solver.state import NetworkState


def utilization_ratios(state: "NetworkState", mu: np.ndarray) -> np.ndarray:
    """
    UR of every edge evaluated at capacities mu.

    Args:
        state: Network state
        mu: Capacity per edge used inside min(μ, vρ)

    Returns:
        Array of UR values in [0, 1]
    """
    grid = state.grid
    produced = np.minimum(grid.cell_velocity * state.densities, np.asarray(mu)[grid.edge_of_cell])
    return grid.dx * np.add.reduceat(produced, grid.offsets) * grid.load_scale


def work_in_progress_ratios(state: "NetworkState") -> np.ndarray:
    """RWIP of every edge (unclamped)."""
    grid = state.grid
    stored = grid.dx * np.add.reduceat(state.densities, grid.offsets)
    return grid.velocity_array * stored * grid.load_scale


def ur(state: "NetworkState", regimes: Sequence[int], e: int) -> float:
    """UR of edge e at its current capacity μ^e(r_e)."""
    mu = state.grid.capacities.capacities(regimes)
    return float(utilization_ratios(state, mu)[e])


def rwip(state: "NetworkState", e: int) -> float:
    """RWIP of edge e."""
    return float(work_in_progress_ratios(state)[e])
