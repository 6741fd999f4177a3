"""
Constant transition-rate matrices.

Rates do not depend on time or load. Used for analytic checks of the jump
law (exponential holding times, categorical post-jump distribution).
"""

from typing import Sequence

import numpy as np

from .base_rates import RateModel, RateModelSpec


class ConstantMatrixRates(RateModel):
    """Per-edge C^e x C^e matrices; the diagonal is ignored."""

    def __init__(self, spec: RateModelSpec, scenario):
        super().__init__(spec, scenario)
        self.matrices = []
        for matrix in spec.matrices:
            table = np.array(matrix, dtype=float)
            np.fill_diagonal(table, 0.0)
            self.matrices.append(table)
        width = max(self.states) if self.states else 0
        self.row_sums = np.zeros((len(self.matrices), width))
        for e, table in enumerate(self.matrices):
            self.row_sums[e, :table.shape[0]] = table.sum(axis=1)
        self._edges = np.arange(len(self.matrices))

    def transition_row(self, e: int, i: int, t: float, state, regimes: Sequence[int]) -> np.ndarray:
        return self.matrices[e][i - 1].copy()

    def exit_rates(self, t: float, state, regimes: Sequence[int]) -> np.ndarray:
        return self.row_sums[self._edges, np.asarray(regimes) - 1]

    def edge_bounds(self) -> np.ndarray:
        return self.row_sums.max(axis=1) if self.row_sums.size else np.zeros(0)
