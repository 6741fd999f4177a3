"""
Deterministic network state (q⃗, ρ⃗) and its flux ledger.
"""

from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from ..exceptions import DomainError
from ..network.scenario import Scenario
from .grid import Grid


@dataclass(frozen=True)
class FluxLedger:
    """
    Fluxes of the most recent step plus cumulative network totals.

    g_in, g_out and exit_flux are per edge; inflow and outflow accumulate
    Δt-weighted network inflow and outflow (left-endpoint rule, exactly as
    the scheme moves mass).
    """

    g_in: np.ndarray
    g_out: np.ndarray
    exit_flux: np.ndarray
    inflow: float = 0.0
    outflow: float = 0.0

    @classmethod
    def empty(cls, num_edges: int) -> "FluxLedger":
        zeros = np.zeros(num_edges)
        return cls(zeros, zeros.copy(), zeros.copy())


@dataclass(frozen=True)
class NetworkState:
    """Queues and cell-averaged densities of every edge at one time."""

    time: float
    queues: np.ndarray
    densities: np.ndarray
    grid: Grid = field(repr=False)
    ledger: Optional[FluxLedger] = None

    @classmethod
    def initial(cls, scenario: Scenario, grid: Grid) -> "NetworkState":
        """x_0 restricted to (q⃗, ρ⃗)."""
        densities = np.concatenate(
            [np.asarray(row, dtype=float) for row in scenario.initial.densities]
        ) if scenario.initial.densities else np.zeros(0)
        if densities.size != grid.total_cells:
            raise DomainError(
                f"initial densities have {densities.size} cells, grid has {grid.total_cells}"
            )
        return cls(
            time=0.0,
            queues=np.asarray(scenario.initial.queues, dtype=float),
            densities=densities,
            grid=grid,
            ledger=FluxLedger.empty(grid.num_edges),
        )

    @classmethod
    def zeros(cls, grid: Grid, time: float = 0.0) -> "NetworkState":
        return cls(
            time=time,
            queues=np.zeros(grid.num_edges),
            densities=np.zeros(grid.total_cells),
            grid=grid,
            ledger=FluxLedger.empty(grid.num_edges),
        )

    def rho(self, e: int) -> np.ndarray:
        """Density vector ρ^e[1..m_e] of edge index e."""
        return self.densities[self.grid.edge_slice(e)]

    def edge_contents(self) -> np.ndarray:
        """Δx Σ_j ρ^e[j] per edge."""
        return self.grid.dx * np.add.reduceat(self.densities, self.grid.offsets)

    def network_mass(self) -> float:
        """Goods stored in all queues and processors."""
        return float(np.sum(self.queues) + np.sum(self.edge_contents()))

    def at_time(self, t: float) -> "NetworkState":
        return replace(self, time=t)


def l1_distance(a: NetworkState, b: NetworkState) -> float:
    """
    Discrete L1 distance Σ_e (Δx Σ_j |ρ_a − ρ_b| + |q_a − q_b|).

    Raises:
        DomainError: If the two states live on different grids
    """
    if not a.grid.same_as(b.grid):
        raise DomainError("states are defined on different grids")
    return float(
        a.grid.dx * np.sum(np.abs(a.densities - b.densities))
        + np.sum(np.abs(a.queues - b.queues))
    )
