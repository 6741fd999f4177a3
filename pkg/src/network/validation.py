"""
Scenario validation.

Every broken invariant becomes one entry of the report; nothing here raises.
Callers refuse to simulate when the violation list is non-empty.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from ..rates.base_rates import CONSTANT_MATRIX, LINEAR_LOAD_DEPENDENT, VARIANTS
from .scenario import DIVISIBILITY_TOLERANCE, Scenario
from .signals import SignalTable

logger = logging.getLogger(__name__)

SUM_TOLERANCE = 1e-12


@dataclass(frozen=True)
class ValidationReport:
    """Violations, warnings and the CFL step limit of a scenario."""

    violations: List[str] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)
    cfl_dt_max: float = float("inf")
    dt: Optional[float] = None

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "violations": list(self.violations),
            "warnings": list(self.warnings),
            "cfl_dt_max": self.cfl_dt_max,
            "dt": self.dt,
        }


def _divides(step: float, total: float) -> bool:
    if step <= 0:
        return False
    ratio = total / step
    return abs(ratio - round(ratio)) <= DIVISIBILITY_TOLERANCE * max(1.0, abs(ratio))


def _check_processors(s: Scenario, out: List[str]) -> None:
    p = s.processors
    n = s.num_edges
    for name, values in (("a", p.a), ("length", p.length), ("velocity", p.velocity)):
        if len(values) != n:
            out.append(f"processor {name} given for {len(values)} edges, network has {n}")
            return
    for i, edge_id in enumerate(s.topology.edge_ids):
        if not p.velocity[i] > 0:
            out.append(f"velocity must be positive on edge {edge_id}")
        if not p.length[i] > 0:
            out.append(f"interval must satisfy b > a on edge {edge_id}")
        elif s.dx > 0 and not _divides(s.dx, p.length[i]):
            out.append(f"dx={s.dx} does not divide length {p.length[i]} of edge {edge_id}")


def _check_capacities(s: Scenario, out: List[str]) -> None:
    table = s.capacities.values
    if len(table) != s.num_edges:
        out.append(f"capacities given for {len(table)} edges, network has {s.num_edges}")
        return
    for edge_id, row in zip(s.topology.edge_ids, table):
        if len(row) < 1:
            out.append(f"edge {edge_id} needs at least one capacity state")
        if any(not np.isfinite(mu) or mu < 0 for mu in row):
            out.append(f"capacities must be finite and nonnegative on edge {edge_id}")


def _check_signals(s: Scenario, out: List[str], warnings: List[str]) -> None:
    topo = s.topology
    sources = set(topo.inflow_vertices)
    for v, sig in s.inflows.items():
        if v not in topo.vertex_index:
            out.append(f"inflow given for unknown vertex {v}")
            continue
        if v not in sources:
            out.append(f"inflow given for vertex {v}, which has ingoing edges")
        elif not topo.outgoing(v):
            out.append(f"inflow vertex {v} has no outgoing edge")
        for issue in sig.problems():
            out.append(f"inflow at vertex {v}: {issue}")
    for v in sources:
        if topo.outgoing(v) and v not in s.inflows:
            out.append(f"inflow vertex {v} has no inflow signal")

    for v, splits in s.distribution.rates.items():
        if v not in topo.vertex_index:
            out.append(f"distribution rates given for unknown vertex {v}")
            continue
        outgoing = set(topo.outgoing(v))
        for e, sig in splits.items():
            if e not in outgoing:
                out.append(
                    f"distribution rate at vertex {v} names edge {topo.edges[e].id}, "
                    f"which does not leave it"
                )
            for issue in sig.problems():
                out.append(f"distribution rate A^({v},{topo.edges[e].id}): {issue}")
            if any(val > 1.0 for val in sig.values):
                out.append(f"distribution rate A^({v},{topo.edges[e].id}) exceeds 1")

    for v in topo.vertices:
        outgoing = topo.outgoing(v)
        if not outgoing:
            continue
        splits = s.distribution.rates.get(v, {})
        if not splits:
            if len(outgoing) > 1:
                out.append(f"vertex {v} has {len(outgoing)} outgoing edges but no distribution rates")
            continue
        missing = [topo.edges[e].id for e in outgoing if e not in splits]
        if missing:
            out.append(f"vertex {v} has no distribution rate for edges {missing}")
            continue
        signals = [splits[e] for e in outgoing]
        if any(sig.problems() for sig in signals):
            continue
        sums = SignalTable(signals, s.horizon).pieces().sum(axis=1)
        worst = int(np.argmax(np.abs(sums - 1.0)))
        if abs(sums[worst] - 1.0) > SUM_TOLERANCE:
            out.append(f"distribution rates sum {sums[worst]:.12g} ≠ 1 at vertex {v}")


def _check_initial(s: Scenario, out: List[str]) -> None:
    init = s.initial
    n = s.num_edges
    ids = s.topology.edge_ids
    if len(init.queues) != n or len(init.densities) != n or len(init.regimes) != n:
        out.append("initial queues, densities and regimes must cover every edge")
        return
    for i, edge_id in enumerate(ids):
        if not init.queues[i] >= 0:
            out.append(f"initial queue must be nonnegative on edge {edge_id} (initial.queues)")
        if any(not rho >= 0 for rho in init.densities[i]):
            out.append(f"initial density must be nonnegative on edge {edge_id} (initial.densities)")
        if s.dx > 0 and i < len(s.processors.length) and len(init.densities[i]) != s.cell_counts[i]:
            out.append(
                f"initial density of edge {edge_id} has {len(init.densities[i])} cells, "
                f"expected {s.cell_counts[i]}"
            )
        if i < len(s.capacities.values):
            states = len(s.capacities.values[i])
            if not 1 <= init.regimes[i] <= states:
                out.append(f"initial regime {init.regimes[i]} of edge {edge_id} outside 1..{states}")


def _check_rates(s: Scenario, out: List[str]) -> None:
    spec = s.rates
    n = s.num_edges
    ids = s.topology.edge_ids
    if spec.variant not in VARIANTS:
        out.append(f"unknown rate model variant {spec.variant!r}")
        return
    if not spec.bound_inflation >= 1.0:
        out.append(f"bound inflation must be at least 1, got {spec.bound_inflation}")
    if spec.variant == CONSTANT_MATRIX:
        if len(spec.matrices) != n:
            out.append(f"rate matrices given for {len(spec.matrices)} edges, network has {n}")
            return
        for i, matrix in enumerate(spec.matrices):
            states = len(s.capacities.values[i]) if i < len(s.capacities.values) else 0
            if len(matrix) != states or any(len(row) != states for row in matrix):
                out.append(f"rate matrix of edge {ids[i]} must be {states}x{states}")
            elif any(not val >= 0 for r, row in enumerate(matrix) for c, val in enumerate(row) if r != c):
                out.append(f"rate matrix of edge {ids[i]} has negative off-diagonal entries")
    elif spec.variant == LINEAR_LOAD_DEPENDENT:
        for name, values in (("down_ref", spec.down_ref), ("rep_ref", spec.rep_ref), ("beta", spec.beta)):
            if len(values) != n:
                out.append(f"rate parameter {name} given for {len(values)} edges, network has {n}")
                return
        for i, edge_id in enumerate(ids):
            if not spec.down_ref[i] > 0:
                out.append(f"down_ref must be positive on edge {edge_id}")
            if not spec.rep_ref[i] > 0:
                out.append(f"rep_ref must be positive on edge {edge_id}")
            if not 0.0 <= spec.beta[i] <= 1.0:
                out.append(f"beta must lie in [0, 1] on edge {edge_id}")
            if i < len(s.capacities.values):
                row = s.capacities.values[i]
                if len(row) != 2:
                    out.append(f"load-dependent rates need exactly 2 capacity states on edge {edge_id}")
                elif row[1] != max(row) or row[0] > row[1]:
                    out.append(
                        f"edge {edge_id}: capacity state 2 must be the intact capacity μ_max "
                        f"and state 1 the failed one"
                    )


def _check_numerics(s: Scenario, out: List[str]) -> None:
    if not s.horizon > 0:
        out.append(f"horizon must be positive, got {s.horizon}")
    if not s.dx > 0:
        out.append(f"dx must be positive, got {s.dx}")
    if not _divides(s.output_step, s.horizon):
        out.append(f"output step {s.output_step} does not divide horizon {s.horizon}")
    if s.dt is not None:
        if not s.dt > 0:
            out.append(f"explicit dt must be positive, got {s.dt}")
        elif s.dt > s.cfl_dt_max * (1.0 + 1e-12):
            out.append(f"dt={s.dt} violates the CFL bound dt ≤ {s.cfl_dt_max}")


def validate_scenario(s: Scenario) -> ValidationReport:
    """
    Check every invariant of a scenario.

    Args:
        s: Parsed or programmatically built scenario

    Returns:
        ValidationReport; an empty violation list means the scenario is runnable
    """
    violations: List[str] = []
    warnings: List[str] = []

    topo_violations, topo_warnings = s.topology.problems()
    violations.extend(topo_violations)
    warnings.extend(topo_warnings)
    _check_numerics(s, violations)
    _check_processors(s, violations)
    _check_capacities(s, violations)
    if s.horizon > 0:
        _check_signals(s, violations, warnings)
    _check_initial(s, violations)
    _check_rates(s, violations)

    for message in warnings:
        logger.warning("scenario %s: %s", s.name, message)

    cfl = s.cfl_dt_max if all(v > 0 for v in s.processors.velocity) else float("nan")
    return ValidationReport(
        violations=violations,
        warnings=warnings,
        cfl_dt_max=cfl,
        dt=s.time_step if not violations else s.dt,
    )
