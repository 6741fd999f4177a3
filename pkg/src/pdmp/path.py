"""
Sample paths of the load-dependent production network.

`simulate_path` alternates thinning and post-jump sampling from x_0 until
the horizon, sampling the hybrid state on a fixed output grid. Jump times
are kept exactly in the event list; they are never snapped to the grid.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from scipy.integrate import cumulative_trapezoid

from ..exceptions import DomainError, RateBoundViolationError
from ..network.scenario import Scenario, density_flux_bounds, queue_bounds
from ..rates.base_rates import RateBounds, RateModel
from ..rates.load_indicators import utilization_ratios, work_in_progress_ratios
from ..solver.evolution import FlowCursor
from ..solver.fluxes import compute_g_in, compute_g_out, exit_fluxes
from ..solver.grid import Grid
from ..solver.state import NetworkState
from .rng import RngStream
from .thinning import HybridState, JumpEvent, next_jump, sample_post_jump

logger = logging.getLogger(__name__)

OUTPUT_TOLERANCE = 1e-9


@dataclass
class PathRecord:
    """
    Output-grid samples of one path plus its exact jump list.

    Per-edge arrays have shape (len(times), num_edges).
    """

    times: np.ndarray
    edge_ids: tuple
    regimes: np.ndarray
    capacity: np.ndarray
    queue: np.ndarray
    content: np.ndarray
    ur: np.ndarray
    rwip: np.ndarray
    exit_flux: np.ndarray
    g_in: np.ndarray
    g_out: np.ndarray
    peak_load: np.ndarray
    g_net_in: np.ndarray
    g_net_out: np.ndarray
    q_net: np.ndarray = field(default=None)
    events: List[JumpEvent] = field(default_factory=list)
    candidates: int = 0
    seed: int = 0
    path_index: int = 0
    final_state: Optional[NetworkState] = field(default=None, repr=False)

    @property
    def horizon(self) -> float:
        return float(self.times[-1])

    def network_mass(self) -> np.ndarray:
        """Goods stored in queues and processors at each output time."""
        return self.queue.sum(axis=1) + self.content.sum(axis=1)

    def index_of(self, t: float) -> int:
        """Output-grid index of time t."""
        k = int(np.searchsorted(self.times, t - OUTPUT_TOLERANCE))
        if k >= len(self.times) or abs(self.times[k] - t) > OUTPUT_TOLERANCE:
            raise DomainError(f"time {t} is not on the output grid")
        return k


def output_times(horizon: float, output_step: float) -> np.ndarray:
    count = int(round(horizon / output_step))
    times = output_step * np.arange(count + 1)
    times[-1] = horizon
    return times


class _Recorder:
    """Fills the output arrays as the flow passes output times."""

    def __init__(self, times: np.ndarray, scenario: Scenario, grid: Grid):
        self.times = times
        self.scenario = scenario
        self.grid = grid
        k, n = len(times), scenario.num_edges
        self.next = 0
        self.arrays = {
            name: np.zeros((k, n))
            for name in ("capacity", "queue", "content", "ur", "rwip",
                         "exit_flux", "g_in", "g_out", "peak_load")
        }
        self.regimes = np.zeros((k, n), dtype=int)
        self.g_net_in = np.zeros(k)
        self.g_net_out = np.zeros(k)

    def observe(self, cursor: FlowCursor, limit: float, inclusive: bool) -> None:
        while self.next < len(self.times):
            tau = self.times[self.next]
            if tau < limit or (inclusive and tau <= limit + OUTPUT_TOLERANCE):
                self.record(self.next, cursor.peek(tau), cursor.regimes)
                self.next += 1
            else:
                break

    def record(self, k: int, state: NetworkState, regimes) -> None:
        grid, a = self.grid, self.arrays
        mu = grid.capacities.capacities(regimes)
        leaving = exit_fluxes(state, mu)
        g_in = compute_g_in(state, leaving, state.time, self.scenario)
        self.regimes[k] = regimes
        a["capacity"][k] = mu
        a["queue"][k] = state.queues
        a["content"][k] = state.edge_contents()
        a["ur"][k] = utilization_ratios(state, mu)
        a["rwip"][k] = work_in_progress_ratios(state)
        a["exit_flux"][k] = leaving
        a["g_in"][k] = g_in
        a["g_out"][k] = compute_g_out(state.queues, g_in, mu, grid.dt)
        a["peak_load"][k] = np.maximum.reduceat(grid.cell_velocity * state.densities, grid.offsets)
        self.g_net_in[k] = state.ledger.inflow
        self.g_net_out[k] = state.ledger.outflow


def simulate_path(
    scenario: Scenario,
    model: RateModel,
    seed: int,
    path_index: int = 0,
    output_step: Optional[float] = None,
    bound: Optional[RateBounds] = None,
    grid: Optional[Grid] = None,
    keep_states: bool = False
) -> PathRecord:
    """
    Simulate one path X(t) = φ_{T_N(t) t}(Y_N(t)) on [0, T].

    Args:
        scenario: Validated scenario
        model: Rate model built for the scenario
        seed: Master seed
        path_index: Index of the path; (seed, path_index) fixes the stream
        output_step: Sampling step (defaults to the scenario's)
        bound: Precomputed dominating rates
        grid: Precomputed grid
        keep_states: Store post-jump hybrid states in the events

    Returns:
        PathRecord with output-grid samples and exact jump events

    Raises:
        RateBoundViolationError: With the path index attached
    """
    grid = grid or Grid.from_scenario(scenario)
    bound = bound or model.bounds()
    times = output_times(scenario.horizon, output_step or scenario.output_step)
    rng = RngStream(seed, path_index)
    recorder = _Recorder(times, scenario, grid)

    y = HybridState(tuple(scenario.initial.regimes), NetworkState.initial(scenario, grid))
    events: List[JumpEvent] = []
    candidates = 0
    try:
        while True:
            outcome = next_jump(y, bound, model, scenario, rng, observer=recorder.observe)
            candidates += outcome.candidates
            if outcome.horizon_reached:
                final_state = outcome.state
                break
            y, event = sample_post_jump(
                outcome.time, HybridState(y.regimes, outcome.state), model, rng,
                scenario=scenario, keep_state=keep_states
            )
            events.append(event)
    except RateBoundViolationError as exc:
        raise exc.with_path(path_index) from exc

    logger.debug(
        "path %d: %d jumps from %d candidates", path_index, len(events), candidates
    )
    q_total = recorder.arrays["queue"].sum(axis=1)
    return PathRecord(
        times=times,
        edge_ids=scenario.topology.edge_ids,
        regimes=recorder.regimes,
        g_net_in=recorder.g_net_in,
        g_net_out=recorder.g_net_out,
        q_net=cumulative_trapezoid(q_total, times, initial=0.0),
        events=events,
        candidates=candidates,
        seed=seed,
        path_index=path_index,
        final_state=final_state,
        **recorder.arrays,
    )


def pathwise_bound_violations(path: PathRecord, scenario: Scenario) -> List[str]:
    """
    Check the a.s. queue and density bounds at every output time.

    Returns:
        One message per violated (time, edge) pair; empty when all hold
    """
    q_max = queue_bounds(scenario)
    load_max = density_flux_bounds(scenario)
    problems = []
    tol = 1e-9
    over_q = np.argwhere(path.queue > q_max * (1 + tol) + tol)
    over_load = np.argwhere(path.peak_load > load_max * (1 + tol) + tol)
    for k, e in over_q:
        problems.append(
            f"t={path.times[k]:.6g} edge {path.edge_ids[e]}: queue {path.queue[k, e]:.6g} > {q_max[e]:.6g}"
        )
    for k, e in over_load:
        problems.append(
            f"t={path.times[k]:.6g} edge {path.edge_ids[e]}: v*rho {path.peak_load[k, e]:.6g} > {load_max[e]:.6g}"
        )
    return problems


def flip_frequencies(
    scenario: Scenario,
    model: RateModel,
    probe_dt: float,
    samples: int,
    seed: int
) -> dict:
    """
    Empirical probability that each edge flips within probe_dt of t = 0.

    For small probe_dt this should match probe_dt · λ^e_{r_e r_e}(0, x_0).

    Returns:
        Dict with "observed" and "expected" per-edge arrays
    """
    grid = Grid.from_scenario(scenario)
    bound = model.bounds()
    start = HybridState(tuple(scenario.initial.regimes), NetworkState.initial(scenario, grid))
    counts = np.zeros(scenario.num_edges)
    for index in range(samples):
        rng = RngStream(seed, index)
        outcome = next_jump(start, bound, model, scenario, rng, horizon=probe_dt)
        if outcome.horizon_reached:
            continue
        _, event = sample_post_jump(
            outcome.time, HybridState(start.regimes, outcome.state), model, rng
        )
        counts[event.edge] += 1
    expected = probe_dt * model.exit_rates(0.0, start.state, start.regimes)
    return {"observed": counts / samples, "expected": expected}


def first_jump_times(
    scenario: Scenario,
    model: RateModel,
    samples: int,
    seed: int,
    bound: Optional[RateBounds] = None
) -> np.ndarray:
    """
    First jump time T_1 of paths 0..samples−1 started from x_0.

    Paths without a jump before T report T (right-censored).
    """
    grid = Grid.from_scenario(scenario)
    bound = bound or model.bounds()
    start = HybridState(tuple(scenario.initial.regimes), NetworkState.initial(scenario, grid))
    times = np.empty(samples)
    for index in range(samples):
        outcome = next_jump(start, bound, model, scenario, RngStream(seed, index))
        times[index] = outcome.time
    return times
