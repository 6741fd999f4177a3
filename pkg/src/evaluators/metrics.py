#!/usr/bin/env python3
"""
Performance measures on simulated paths.
"""

from typing import Dict, Optional, Sequence

import numpy as np
from scipy.integrate import trapezoid

from ..network.scenario import Scenario
from ..pdmp.path import PathRecord
from ..solver.evolution import evolve
from ..solver.fluxes import compute_g_in, compute_g_out, exit_fluxes
from ..solver.state import NetworkState


def q_net(path: PathRecord, t: float) -> float:
    """Accumulated network queue Σ_e ∫_0^t q^e ds (trapezoid on the output grid)."""
    return float(path.q_net[path.index_of(t)])


def g_net_out(path: PathRecord, t: float) -> float:
    """Accumulated outflow through edges ending at outflow vertices, from the flux ledger."""
    return float(path.g_net_out[path.index_of(t)])


def discrete_tv(rho: Sequence[float]) -> float:
    """Total variation Σ_j |ρ[j+1] − ρ[j]| of a density vector."""
    rho = np.asarray(rho, dtype=float)
    return float(np.sum(np.abs(np.diff(rho)))) if rho.size > 1 else 0.0


def mass_balance_residual(path: PathRecord, initial_mass: float) -> np.ndarray:
    """
    Relative mass-balance residual at each output time.

    network mass + accumulated outflow − initial mass − accumulated inflow,
    divided by max(1, initial mass + accumulated inflow).
    """
    supplied = initial_mass + path.g_net_in
    residual = path.network_mass() + path.g_net_out - supplied
    return residual / np.maximum(1.0, np.abs(supplied))


def stationary_capacity(
    mean_capacity: np.ndarray,
    times: np.ndarray,
    edge: int,
    t_from: float,
    t_to: float
) -> float:
    """Time average of an ensemble-mean capacity series over [t_from, t_to]."""
    window = (times >= t_from - 1e-9) & (times <= t_to + 1e-9)
    series = mean_capacity[window, edge]
    span = times[window]
    if span.size < 2:
        return float(series.mean()) if series.size else float("nan")
    return float(trapezoid(series, span) / (span[-1] - span[0]))


def variation_profile(
    scenario: Scenario,
    state: NetworkState,
    regimes: Sequence[int],
    t1: float,
    report_step: Optional[float] = None
) -> Dict[str, np.ndarray]:
    """
    Total variation history of a frozen-capacity evolution.

    Tracks, per edge, TV of the density plus the boundary oscillation
    |ρ_1 − g_out/v|, and compares it with the initial TV plus the variation
    of the injected boundary data seen so far.

    Returns:
        Dict with "times", "tv" (per time and edge) and "budget"
    """
    grid = state.grid
    step = report_step or grid.dt
    count = int(round((t1 - state.time) / step))
    times = state.time + step * np.arange(count + 1)
    times[-1] = t1
    mu = grid.capacities.capacities(regimes)

    def boundary_value(s: NetworkState) -> np.ndarray:
        leaving = exit_fluxes(s, mu)
        g_in = compute_g_in(s, leaving, s.time, scenario)
        g_out = compute_g_out(s.queues, g_in, mu, grid.dt)
        return g_out / grid.velocity_array

    def edge_tv(s: NetworkState, inject: np.ndarray) -> np.ndarray:
        out = np.zeros(grid.num_edges)
        for e in range(grid.num_edges):
            rho = s.rho(e)
            out[e] = discrete_tv(rho) + abs(rho[0] - inject[e])
        return out

    inject = boundary_value(state)
    tv = [edge_tv(state, inject)]
    budget = [tv[0].copy()]
    previous_inject = inject
    current = state
    for t in times[1:]:
        current = evolve(current, regimes, t, scenario)
        inject = boundary_value(current)
        tv.append(edge_tv(current, inject))
        budget.append(budget[-1] + np.abs(inject - previous_inject))
        previous_inject = inject
    return {"times": times, "tv": np.array(tv), "budget": np.array(budget)}
