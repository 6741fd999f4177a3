"""
Flux functions and the left-sided upwind kernel.

All functions accept scalars or numpy arrays; the network step calls the
vectorized forms on every edge at once.
"""

from typing import Tuple, Union

import numpy as np

from ..exceptions import CFLViolationError
from ..network.scenario import Scenario
from .state import NetworkState

ArrayLike = Union[float, np.ndarray]


def flux(rho: ArrayLike, mu: ArrayLike, v: ArrayLike) -> ArrayLike:
    """Processor flux f(ρ) = min(v·ρ, μ)."""
    assert np.all(np.asarray(rho) >= 0) and np.all(np.asarray(mu) >= 0), \
        "flux inputs must be nonnegative"
    assert np.all(np.asarray(v) > 0), "velocity must be positive"
    return np.minimum(v * rho, mu)


def compute_g_in(
    state: NetworkState,
    exit_fluxes: np.ndarray,
    t: float,
    scenario: Scenario
) -> np.ndarray:
    """
    Queue inflow of every edge.

    Edges leaving an inflow vertex receive G_in^{s(e)}(t) (split by the
    distribution rates when the vertex feeds several edges). All other edges
    receive A^{s(e),e}(t) times the summed exit flux of δ_{s(e)}⁻.

    Args:
        state: Current network state (unused beyond its grid shape)
        exit_fluxes: Exit flux at b^e per edge, from the pre-update densities
        t: Time at which signals are evaluated
        scenario: Scenario providing topology, inflows and splits

    Returns:
        Array of g_in^e
    """
    topo = scenario.topology
    supply = np.bincount(
        topo.end_index, weights=exit_fluxes, minlength=len(topo.vertices)
    ) + scenario.inflow_table(t)
    return scenario.split_table(t) * supply[topo.start_index]


def step_g_in(
    state: NetworkState,
    exit_fluxes: np.ndarray,
    t0: float,
    h: float,
    scenario: Scenario
) -> Tuple[np.ndarray, float]:
    """
    Queue inflow averaged over the step [t0, t0 + h].

    Exit fluxes are frozen within a step, so averaging g_in over the pieces
    between signal breakpoints integrates inflows and splits exactly.

    Returns:
        (average g_in per edge, network inflow ∫ Σ_v G_in^v over the step)
    """
    pieces = scenario.step_pieces(t0, h)
    if len(pieces) == 1:
        t_signal = pieces[0][0]
        g_in = compute_g_in(state, exit_fluxes, t_signal, scenario)
        return g_in, h * float(np.sum(scenario.inflow_table(t_signal)))
    g_in = np.zeros(len(exit_fluxes))
    injected = 0.0
    for t_signal, width in pieces:
        g_in += width * compute_g_in(state, exit_fluxes, t_signal, scenario)
        injected += width * float(np.sum(scenario.inflow_table(t_signal)))
    return g_in / h, injected


def compute_g_out(q: ArrayLike, g_in: ArrayLike, mu: ArrayLike, dt: float) -> ArrayLike:
    """
    Release rate from queue to processor, min(μ, g_in + q/Δt).

    For q = 0 this is min(g_in, μ); for a long queue it is μ; in between it
    empties the queue in exactly one step so the Euler update stays ≥ 0.
    """
    return np.minimum(mu, g_in + q / dt)


def _upwind_update(
    rho: np.ndarray,
    boundary_flux: np.ndarray,
    mu_cell: np.ndarray,
    v_cell: np.ndarray,
    offsets: np.ndarray,
    last_cells: np.ndarray,
    h: float,
    dx: float
) -> Tuple[np.ndarray, np.ndarray]:
    face = np.minimum(v_cell * rho, mu_cell)
    upstream = np.empty_like(face)
    upstream[1:] = face[:-1]
    upstream[offsets] = boundary_flux
    return rho - (h / dx) * (face - upstream), face[last_cells]


def upwind_edge_step(
    rho: np.ndarray,
    boundary_flux: float,
    mu: float,
    v: float,
    dt: float,
    dx: float
) -> Tuple[np.ndarray, float]:
    """
    One left-sided upwind step on a single processor.

    Args:
        rho: Cell densities ρ_1..ρ_m
        boundary_flux: Injection flux F_0 = g_out at a^e
        mu: Capacity
        v: Velocity
        dt: Step size
        dx: Cell width

    Returns:
        Updated densities and the exit flux F_m of the pre-update state

    Raises:
        CFLViolationError: If v * dt > dx
    """
    if v * dt > dx * (1.0 + 1e-12):
        raise CFLViolationError(f"v * dt = {v * dt} exceeds dx = {dx}")
    rho = np.asarray(rho, dtype=float)
    m = rho.size
    new_rho, exit_flux = _upwind_update(
        rho,
        np.array([boundary_flux], dtype=float),
        np.full(m, float(mu)),
        np.full(m, float(v)),
        np.array([0]),
        np.array([m - 1]),
        dt,
        dx,
    )
    return new_rho, float(exit_flux[0])


def upwind_network_step(
    state: NetworkState,
    boundary_flux: np.ndarray,
    mu: np.ndarray,
    h: float
) -> Tuple[np.ndarray, np.ndarray]:
    """Upwind update of every edge's densities; returns (densities, exit fluxes)."""
    grid = state.grid
    return _upwind_update(
        state.densities,
        boundary_flux,
        mu[grid.edge_of_cell],
        grid.cell_velocity,
        grid.offsets,
        grid.last_cells,
        h,
        grid.dx,
    )


def exit_fluxes(state: NetworkState, mu: np.ndarray) -> np.ndarray:
    """Exit flux at b^e of every edge, from its last cell."""
    grid = state.grid
    return np.minimum(grid.velocity_array * state.densities[grid.last_cells], mu)
