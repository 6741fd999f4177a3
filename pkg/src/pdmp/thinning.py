"""
Thinning construction of the marked point process (T_n, Y_n).

Candidate times come from a homogeneous Poisson process with the
dominating rate λ̄. A candidate s is accepted with probability
ψ(s, φ_{t_n s}(y_n)) / λ̄; the post-jump regime is drawn from η, which
flips exactly one edge e to a regime l ≠ r_e with weight λ^e_{r_e l} / ψ.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from ..exceptions import RateBoundViolationError
from ..network.scenario import Scenario
from ..rates.base_rates import RateBounds, RateModel
from ..solver.evolution import FlowCursor
from ..solver.state import NetworkState
from .rng import RngStream

logger = logging.getLogger(__name__)

# Relative slack before ψ > λ̄ counts as a bound violation.
BOUND_SLACK = 1e-12


@dataclass(frozen=True)
class HybridState:
    """Regime vector r⃗ (1-based) together with the deterministic state."""

    regimes: Tuple[int, ...]
    state: NetworkState

    @property
    def time(self) -> float:
        return self.state.time


@dataclass(frozen=True)
class JumpEvent:
    """One accepted jump: time, flipped edge and its regime change."""

    time: float
    edge: int
    edge_id: int
    from_regime: int
    to_regime: int
    post_state: Optional[HybridState] = None


@dataclass(frozen=True)
class ThinningOutcome:
    """Result of one `next_jump` call."""

    time: float
    state: NetworkState
    horizon_reached: bool
    candidates: int


Observer = Callable[[FlowCursor, float, bool], None]


def psi(model: RateModel, t: float, y: HybridState) -> float:
    """Aggregate jump rate ψ(t, y) = Σ_e λ^e_{r_e r_e}."""
    return model.psi(t, y.state, y.regimes)


def next_jump(
    y: HybridState,
    bound: RateBounds,
    model: RateModel,
    scenario: Scenario,
    rng: RngStream,
    observer: Optional[Observer] = None,
    horizon: Optional[float] = None
) -> ThinningOutcome:
    """
    Sample the next jump time after y.time by thinning.

    Args:
        y: Post-jump hybrid state Y_n at time T_n
        bound: Dominating rates; λ̄ = bound.total
        model: Rate model evaluated along the deterministic flow
        scenario: Scenario driving the flow
        rng: Random stream (ξ then U per candidate)
        observer: Called as observer(cursor, s, inclusive) before each
            candidate s is evaluated, so callers can sample the flow at
            times before s
        horizon: Stop time (defaults to the scenario horizon)

    Returns:
        ThinningOutcome with the accepted time and pre-jump state, or with
        horizon_reached=True and the state at the horizon

    Raises:
        RateBoundViolationError: If ψ exceeds λ̄ at a candidate
    """
    horizon = scenario.horizon if horizon is None else horizon
    lam = bound.total
    cursor = FlowCursor(y.state, y.regimes, scenario)
    s = y.time
    candidates = 0
    while True:
        s = s + rng.exponential(lam) if lam > 0 else math.inf
        if s >= horizon:
            if observer is not None:
                observer(cursor, horizon, True)
            return ThinningOutcome(horizon, cursor.peek(horizon), True, candidates)
        candidates += 1
        if observer is not None:
            observer(cursor, s, False)
        candidate = cursor.peek(s)
        rate = model.psi(s, candidate, y.regimes)
        if rate > lam * (1.0 + BOUND_SLACK):
            raise RateBoundViolationError(rate, lam, s)
        u = rng.uniform()
        if rate > 0 and u <= rate / lam:
            return ThinningOutcome(s, candidate, False, candidates)


def sample_post_jump(
    t: float,
    y: HybridState,
    model: RateModel,
    rng: RngStream,
    scenario: Optional[Scenario] = None,
    keep_state: bool = False
) -> Tuple[HybridState, JumpEvent]:
    """
    Draw Y_{n+1} from η(t, y, ·).

    Only one regime coordinate changes; queues and densities are carried
    over unchanged.

    Raises:
        ValueError: If ψ(t, y) = 0
    """
    edges, targets, weights = [], [], []
    rows = model.transition_rows(t, y.state, y.regimes)
    for e, (r, row) in enumerate(zip(y.regimes, rows)):
        for l, w in enumerate(row, start=1):
            if l != r and w > 0:
                edges.append(e)
                targets.append(l)
                weights.append(w)
    total = float(np.sum(weights)) if weights else 0.0
    if total <= 0:
        raise ValueError("post-jump kernel needs psi > 0")
    cumulative = np.cumsum(weights)
    pick = int(np.searchsorted(cumulative, rng.uniform() * total, side="right"))
    pick = min(pick, len(weights) - 1)

    e, l = edges[pick], targets[pick]
    regimes = list(y.regimes)
    previous = regimes[e]
    regimes[e] = l
    post = HybridState(tuple(regimes), y.state)
    edge_id = scenario.topology.edges[e].id if scenario is not None else e + 1
    event = JumpEvent(t, e, edge_id, previous, l, post if keep_state else None)
    logger.debug("jump at t=%.6f: edge %s %d -> %d", t, edge_id, previous, l)
    return post, event
