#!/usr/bin/env python3
"""
Reference values for the diamond network experiments and checks against them.
"""

import json
import logging
from dataclasses import dataclass
from typing import Any, Dict, Optional, Sequence

import numpy as np

from .metrics import stationary_capacity
from .statistics import EnsembleStats

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ReferenceValue:
    """Expected value of a measure with its acceptance tolerance."""

    expected: float
    tolerance: float

    def accepts(self, measured: float) -> bool:
        return abs(measured - self.expected) <= self.tolerance


# Stationary expected capacity of the first processor, averaged over t in
# [20, 30], for down/repair reference rates 1/0.85 and 1/0.15.
STATIONARY_CAPACITY = {
    0.0: ReferenceValue(1.7, 0.03),
    0.25: ReferenceValue(1.57, 0.05),
    0.5: ReferenceValue(1.35, 0.05),
}
STATIONARY_WINDOW = (20.0, 30.0)


def availability(down_rate: float, repair_rate: float) -> float:
    """Stationary up-probability of a two-state machine with constant rates."""
    total = down_rate + repair_rate
    return repair_rate / total if total > 0 else 1.0


def is_strictly_monotone(values: Sequence[float], increasing: bool = True) -> bool:
    steps = np.diff(np.asarray(values, dtype=float))
    return bool(np.all(steps > 0) if increasing else np.all(steps < 0))


class CapacityBenchmark:
    """Reference stationary capacities, optionally overridden from a JSON file."""

    def __init__(self, reference_path: Optional[str] = None):
        self.references: Dict[float, ReferenceValue] = dict(STATIONARY_CAPACITY)
        self.window = STATIONARY_WINDOW
        if reference_path:
            self.load_reference_data(reference_path)

    def load_reference_data(self, file_path: str) -> None:
        """Load {"window": [t0, t1], "stationary_capacity": {beta: [expected, tol]}}."""
        with open(file_path, 'r', encoding='utf-8') as f:
            data = json.load(f)
        if "window" in data:
            self.window = tuple(float(x) for x in data["window"])
        for beta, (expected, tol) in data.get("stationary_capacity", {}).items():
            self.references[float(beta)] = ReferenceValue(float(expected), float(tol))

    def reference(self, beta: float) -> Optional[ReferenceValue]:
        for key, value in self.references.items():
            if abs(key - beta) < 1e-12:
                return value
        return None


class ReferenceEvaluator:
    """Evaluates ensemble results against a benchmark."""

    def __init__(self, benchmark: Optional[CapacityBenchmark] = None):
        self.benchmark = benchmark or CapacityBenchmark()

    def evaluate_capacity(self, stats: EnsembleStats, beta: float, edge: int = 0) -> Dict[str, Any]:
        """
        Time-averaged mean capacity of one edge against its reference.

        Returns:
            Dict with the measured value and, when a reference exists for
            β, the expected value, tolerance and pass flag
        """
        t_from, t_to = self.benchmark.window
        measured = stationary_capacity(stats.mean("capacity"), stats.times, edge, t_from, t_to)
        result: Dict[str, Any] = {"beta": beta, "edge": stats.edge_ids[edge], "measured": measured}
        reference = self.benchmark.reference(beta)
        if reference is not None:
            result.update(
                expected=reference.expected,
                tolerance=reference.tolerance,
                passed=reference.accepts(measured)
            )
            logger.info(
                "beta=%g stationary capacity %.4f (reference %.2f ± %.2f)",
                beta, measured, reference.expected, reference.tolerance
            )
        return result

    def evaluate_trends(self, network_means: Dict[float, Dict[str, float]]) -> Dict[str, bool]:
        """Queue integral should rise and outflow fall with β."""
        betas = sorted(network_means)
        return {
            "q_net_increasing": is_strictly_monotone([network_means[b]["q_net"] for b in betas], True),
            "g_net_out_decreasing": is_strictly_monotone(
                [network_means[b]["g_net_out"] for b in betas], False
            ),
        }
