"""
Scenario object model.

A Scenario bundles everything one experiment needs: topology, processor
parameters, capacity tables, distribution rates, inflows, the rate model,
initial data and discretization. Instances are immutable and safe to share
read-only across worker processes.
"""

from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Hashable, List, Optional, Tuple

import numpy as np

from ..rates.base_rates import RateModelSpec
from .signals import PiecewiseConstantSignal, SignalTable
from .topology import Topology

# Relative tolerance for "dx divides L" and "output step divides T".
DIVISIBILITY_TOLERANCE = 1e-12
# Relative distance below which a signal breakpoint counts as a step end.
KNOT_TOLERANCE = 1e-12


@dataclass(frozen=True)
class ProcessorParams:
    """Per-edge interval [a^e, b^e] and processing velocity v^e."""

    a: Tuple[float, ...]
    length: Tuple[float, ...]
    velocity: Tuple[float, ...]

    @property
    def b(self) -> Tuple[float, ...]:
        return tuple(a + l for a, l in zip(self.a, self.length))


@dataclass(frozen=True)
class CapacityTable:
    """Capacity values μ^e(1..C^e) per edge."""

    values: Tuple[Tuple[float, ...], ...]

    def states(self, e: int) -> int:
        return len(self.values[e])

    def mu(self, e: int, r: int) -> float:
        """Capacity of edge index e in regime r (1-based)."""
        return self.values[e][r - 1]

    @cached_property
    def mu_max(self) -> np.ndarray:
        return np.array([max(row) if row else 0.0 for row in self.values], dtype=float)

    def capacities(self, regimes: np.ndarray) -> np.ndarray:
        """μ(r⃗) for a regime vector."""
        return np.array(
            [row[r - 1] for row, r in zip(self.values, regimes)], dtype=float
        )


@dataclass(frozen=True)
class DistributionRates:
    """A^{v,e}(t): vertex -> {edge index -> signal} for vertices with outgoing edges."""

    rates: Dict[Hashable, Dict[int, PiecewiseConstantSignal]]

    def signal(self, v: Hashable, e: int) -> Optional[PiecewiseConstantSignal]:
        return self.rates.get(v, {}).get(e)


@dataclass(frozen=True)
class InitialState:
    """x_0: queues, cell-averaged densities and regimes (1-based) per edge."""

    queues: Tuple[float, ...]
    densities: Tuple[Tuple[float, ...], ...]
    regimes: Tuple[int, ...]


@dataclass(frozen=True)
class Scenario:
    """Full experiment description."""

    topology: Topology
    processors: ProcessorParams
    capacities: CapacityTable
    distribution: DistributionRates
    inflows: Dict[Hashable, PiecewiseConstantSignal]
    rates: RateModelSpec
    initial: InitialState
    horizon: float
    dx: float
    output_step: float
    dt: Optional[float] = None
    name: str = field(default="scenario")

    @property
    def num_edges(self) -> int:
        return self.topology.num_edges

    @cached_property
    def velocity(self) -> np.ndarray:
        return np.asarray(self.processors.velocity, dtype=float)

    @cached_property
    def length(self) -> np.ndarray:
        return np.asarray(self.processors.length, dtype=float)

    @property
    def cfl_dt_max(self) -> float:
        """Largest stable step Δx / max_e v^e."""
        vmax = max(self.processors.velocity) if self.processors.velocity else 0.0
        return self.dx / vmax if vmax > 0 else float("inf")

    @property
    def time_step(self) -> float:
        """Δt actually used: explicit value or the CFL-equal default."""
        return self.dt if self.dt is not None else self.cfl_dt_max

    @cached_property
    def cell_counts(self) -> Tuple[int, ...]:
        return tuple(int(round(l / self.dx)) for l in self.processors.length)

    @cached_property
    def split_table(self) -> SignalTable:
        """A^{s(e),e}(t) as one vector signal over edges."""
        signals = []
        for i, edge in enumerate(self.topology.edges):
            sig = self.distribution.signal(edge.start, i)
            if sig is None:
                sig = PiecewiseConstantSignal.constant(
                    1.0 if len(self.topology.outgoing(edge.start)) == 1 else 0.0,
                    self.horizon
                )
            signals.append(sig)
        return SignalTable(signals, self.horizon)

    @cached_property
    def inflow_table(self) -> SignalTable:
        """G_in^v(t) as one vector signal over vertex indices (zero off V_in)."""
        zero = PiecewiseConstantSignal.constant(0.0, self.horizon)
        signals = [self.inflows.get(v, zero) for v in self.topology.vertices]
        return SignalTable(signals, self.horizon)

    @cached_property
    def signal_knots(self) -> np.ndarray:
        """Sorted breakpoints of every inflow and distribution signal."""
        return np.union1d(self.inflow_table.breakpoints, self.split_table.breakpoints)

    def step_pieces(self, t0: float, h: float) -> List[Tuple[float, float]]:
        """
        Cut the step [t0, t0 + h] at signal breakpoints.

        Breakpoints within roundoff of either end do not cut. A step
        without an interior breakpoint is returned as its own midpoint.

        Returns:
            (midpoint, width) of every piece on which all signals are constant
        """
        t1 = t0 + h
        tol = KNOT_TOLERANCE * max(1.0, abs(t1))
        knots = self.signal_knots
        lo = int(np.searchsorted(knots, t0 + tol, side="right"))
        hi = int(np.searchsorted(knots, t1 - tol, side="left"))
        if hi <= lo:
            return [(t0 + 0.5 * h, h)]
        cuts = [t0, *knots[lo:hi].tolist(), t1]
        return [(0.5 * (a + b), b - a) for a, b in zip(cuts, cuts[1:])]

    def initial_density_peak(self) -> np.ndarray:
        """‖ρ_0^e‖_∞ per edge."""
        return np.array(
            [max(row) if row else 0.0 for row in self.initial.densities], dtype=float
        )

    def initial_mass(self) -> float:
        """Goods in queues and processors at t = 0."""
        return float(
            sum(self.initial.queues)
            + self.dx * sum(sum(row) for row in self.initial.densities)
        )

    def total_inflow(self, t1: Optional[float] = None) -> float:
        """∫_0^{t1} Σ_v G_in^v dt."""
        t1 = self.horizon if t1 is None else t1
        return float(sum(sig.integral(0.0, t1) for sig in self.inflows.values()))


def density_flux_bounds(scenario: Scenario) -> np.ndarray:
    """
    Almost-sure bound on v^e ρ^e per edge: max(v^e ‖ρ_0^e‖_∞, μ_e^max).

    Args:
        scenario: Scenario to bound

    Returns:
        Array of per-edge flux-density bounds
    """
    return np.maximum(
        scenario.velocity * scenario.initial_density_peak(),
        scenario.capacities.mu_max
    )


def queue_bounds(scenario: Scenario) -> np.ndarray:
    """
    Almost-sure queue bound q_e^max per edge over [0, T].

    For an edge fed by an inflow vertex this is q_0^e plus the integrated
    inflow share; otherwise q_0^e plus the largest possible upstream exit
    flux times the integrated distribution rate.
    """
    topo = scenario.topology
    flux_cap = density_flux_bounds(scenario)
    bounds = np.zeros(topo.num_edges)
    for i, edge in enumerate(topo.edges):
        share = scenario.distribution.signal(edge.start, i)
        if share is None:
            share_integral = scenario.horizon if len(topo.outgoing(edge.start)) == 1 else 0.0
        else:
            share_integral = share.integral()
        q0 = scenario.initial.queues[i]
        if edge.start in topo.inflow_vertices:
            sig = scenario.inflows.get(edge.start)
            if sig is None:
                bounds[i] = q0
            elif share is None:
                bounds[i] = q0 + sig.integral()
            else:
                # Exact integral of the product of two step functions.
                table = SignalTable([sig, share], scenario.horizon)
                knots = np.append(table.breakpoints, scenario.horizon)
                widths = np.diff(knots)
                bounds[i] = q0 + float(np.sum(table.pieces()[:, 0] * table.pieces()[:, 1] * widths))
        else:
            upstream = sum(flux_cap[j] for j in topo.ingoing(edge.start))
            bounds[i] = q0 + upstream * share_integral
    return bounds
