"""
Deterministic evolution S_{st}^μ at frozen capacities.

Each step runs, in order: exit fluxes from the current densities, g_in per
edge averaged over the step, g_out per edge, forward Euler queue update,
upwind density update with boundary flux g_out. Full steps land on grid
times k·Δt; an evolution to an off-grid time ends with one truncated step.
"""

from typing import Optional, Sequence

import numpy as np

from ..exceptions import DomainError
from ..network.scenario import Scenario
from .fluxes import compute_g_out, exit_fluxes, step_g_in, upwind_network_step
from .grid import GRID_SNAP, Grid
from .state import FluxLedger, NetworkState


def step(
    state: NetworkState,
    mu: np.ndarray,
    h: float,
    new_time: float,
    scenario: Scenario
) -> NetworkState:
    """
    Advance every queue and density by one step of size h ≤ Δt.

    Inflows and distribution rates enter as their exact average over the
    step, so a breakpoint inside the step neither creates nor loses goods.
    """
    leaving = exit_fluxes(state, mu)
    g_in, injected = step_g_in(state, leaving, state.time, h, scenario)
    g_out = compute_g_out(state.queues, g_in, mu, h)
    queues = np.maximum(state.queues + h * (g_in - g_out), 0.0)
    densities, _ = upwind_network_step(state, g_out, mu, h)

    previous = state.ledger or FluxLedger.empty(state.grid.num_edges)
    ledger = FluxLedger(
        g_in=g_in,
        g_out=g_out,
        exit_flux=leaving,
        inflow=previous.inflow + injected,
        outflow=previous.outflow + h * float(np.sum(leaving[scenario.topology.outflow_edge_mask])),
    )
    return NetworkState(new_time, queues, densities, state.grid, ledger)


def evolve(
    state: NetworkState,
    regimes: Sequence[int],
    t1: float,
    scenario: Scenario,
    grid: Optional[Grid] = None
) -> NetworkState:
    """
    Evolve the deterministic network from state.time to t1 at μ(r⃗).

    Args:
        state: Starting state
        regimes: Regime vector (1-based), frozen over the interval
        t1: Target time, state.time ≤ t1 ≤ T
        scenario: Scenario with coupling data
        grid: Grid to step on (defaults to the state's grid)

    Returns:
        State at exactly t1, with the flux ledger updated

    Raises:
        DomainError: If t1 < state.time or t1 > T
    """
    grid = grid or state.grid
    slack = GRID_SNAP * grid.dt
    if t1 < state.time - slack:
        raise DomainError(f"cannot evolve backwards from {state.time} to {t1}")
    if t1 > scenario.horizon + slack:
        raise DomainError(f"target time {t1} beyond horizon {scenario.horizon}")
    mu = grid.capacities.capacities(regimes)

    while True:
        k = grid.floor_index(state.time)
        on_grid = abs(state.time - grid.grid_time(k)) <= slack
        t0 = grid.grid_time(k) if on_grid else state.time
        if t1 - t0 <= slack:
            break
        next_time = grid.grid_time(k + 1)
        if t1 >= next_time - slack:
            h = grid.dt if on_grid else next_time - t0
            state = step(state.at_time(t0), mu, h, next_time, scenario)
        else:
            state = step(state.at_time(t0), mu, t1 - t0, t1, scenario)
            break
    return state.at_time(t1)


class FlowCursor:
    """
    Incremental evaluation of φ_{t_n s}(y_n) for increasing s.

    The cursor commits only grid-aligned states. `peek(s)` returns the same
    state as a fresh `evolve(y_n, r⃗, s)`, so rejected candidates never
    change the deterministic path.
    """

    def __init__(self, state: NetworkState, regimes: Sequence[int], scenario: Scenario):
        self.committed = state
        self.regimes = tuple(int(r) for r in regimes)
        self.scenario = scenario
        self.grid = state.grid

    def peek(self, t: float) -> NetworkState:
        grid = self.grid
        anchor = grid.grid_time(grid.floor_index(t))
        if anchor > self.committed.time + GRID_SNAP * grid.dt:
            self.committed = evolve(self.committed, self.regimes, anchor, self.scenario, grid)
        return evolve(self.committed, self.regimes, t, self.scenario, grid)
