"""
Linear load-dependent failure and repair rates for two-state processors.

Regime 2 is the intact state (capacity μ_e^max), regime 1 the failed one.
Failures speed up with utilization, repairs slow down with work in progress:

    λ21 = λ_down_min + (λ_down_max − λ_down_min) · UR(2, q, ρ)
    λ12 = λ_rep_max − (λ_rep_max − λ_rep_min) · RWIP(1, q, ρ)

with λ_min = (1 − β) λ_ref and λ_max = (1 + β) λ_ref.
"""

from typing import List, Sequence

import numpy as np

from .base_rates import RateModel, RateModelSpec
from .load_indicators import utilization_ratios, work_in_progress_ratios

UP = 2
DOWN = 1


class LinearLoadDependentRates(RateModel):
    """Failure rate driven by UR, repair rate driven by RWIP."""

    def __init__(self, spec: RateModelSpec, scenario):
        super().__init__(spec, scenario)
        self.down_min = spec.down_min()
        self.down_max = spec.down_max()
        self.rep_min = spec.rep_min()
        self.rep_max = spec.rep_max()
        # UR inside λ21 is always taken at the intact capacity μ^e(2).
        self.mu_up = np.array(
            [scenario.capacities.mu(e, UP) for e in range(scenario.num_edges)], dtype=float
        )

    def failure_rates(self, state) -> np.ndarray:
        load = utilization_ratios(state, self.mu_up)
        return self.down_min + (self.down_max - self.down_min) * load

    def repair_rates(self, state) -> np.ndarray:
        load = np.clip(work_in_progress_ratios(state), 0.0, 1.0)
        return self.rep_max - (self.rep_max - self.rep_min) * load

    def transition_row(self, e: int, i: int, t: float, state, regimes: Sequence[int]) -> np.ndarray:
        row = np.zeros(2)
        if i == UP:
            row[DOWN - 1] = self.failure_rates(state)[e]
        else:
            row[UP - 1] = self.repair_rates(state)[e]
        return row

    def transition_rows(self, t: float, state, regimes: Sequence[int]) -> List[np.ndarray]:
        failure = self.failure_rates(state)
        repair = self.repair_rates(state)
        rows = []
        for e, r in enumerate(regimes):
            row = np.zeros(2)
            if r == UP:
                row[DOWN - 1] = failure[e]
            else:
                row[UP - 1] = repair[e]
            rows.append(row)
        return rows

    def exit_rates(self, t: float, state, regimes: Sequence[int]) -> np.ndarray:
        up = np.asarray(regimes) == UP
        return np.where(up, self.failure_rates(state), self.repair_rates(state))

    def edge_bounds(self) -> np.ndarray:
        return np.maximum(self.down_max, self.rep_max)
