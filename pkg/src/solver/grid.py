"""
Finite-volume grid shared by all edges.

Densities of every edge live in one flat array; `offsets` marks the first
cell of each edge. Grid times are k * dt for integer k.
"""

from dataclasses import dataclass
from functools import cached_property
from typing import Tuple

import math
import numpy as np

from ..exceptions import CFLViolationError
from ..network.scenario import CapacityTable, Scenario

# Times within this fraction of dt of a grid point count as on the grid.
GRID_SNAP = 1e-9


@dataclass(frozen=True)
class Grid:
    """Spatial cells per edge and the global time step."""

    dx: float
    dt: float
    cells: Tuple[int, ...]
    velocity: Tuple[float, ...]
    length: Tuple[float, ...]
    capacities: CapacityTable

    @classmethod
    def from_scenario(cls, scenario: Scenario) -> "Grid":
        grid = cls(
            dx=float(scenario.dx),
            dt=float(scenario.time_step),
            cells=scenario.cell_counts,
            velocity=tuple(float(v) for v in scenario.processors.velocity),
            length=tuple(float(l) for l in scenario.processors.length),
            capacities=scenario.capacities,
        )
        grid.check_cfl(grid.dt)
        return grid

    @property
    def num_edges(self) -> int:
        return len(self.cells)

    @cached_property
    def offsets(self) -> np.ndarray:
        return np.concatenate(([0], np.cumsum(self.cells)[:-1])).astype(int)

    @cached_property
    def last_cells(self) -> np.ndarray:
        return (self.offsets + np.asarray(self.cells) - 1).astype(int)

    @property
    def total_cells(self) -> int:
        return int(sum(self.cells))

    @cached_property
    def edge_of_cell(self) -> np.ndarray:
        return np.repeat(np.arange(self.num_edges), self.cells)

    @cached_property
    def cell_velocity(self) -> np.ndarray:
        return np.asarray(self.velocity)[self.edge_of_cell]

    @cached_property
    def velocity_array(self) -> np.ndarray:
        return np.asarray(self.velocity, dtype=float)

    @cached_property
    def length_array(self) -> np.ndarray:
        return np.asarray(self.length, dtype=float)

    @cached_property
    def load_scale(self) -> np.ndarray:
        """1 / (μ_e^max·L^e) per edge, 0 where the product is 0."""
        scale = self.capacities.mu_max * self.length_array
        return np.divide(1.0, scale, out=np.zeros_like(scale), where=scale > 0)

    def edge_slice(self, e: int) -> slice:
        start = int(self.offsets[e])
        return slice(start, start + self.cells[e])

    def check_cfl(self, h: float) -> None:
        vmax = max(self.velocity)
        if h * vmax > self.dx * (1.0 + 1e-12):
            raise CFLViolationError(
                f"time step {h} violates CFL: v_max * dt = {h * vmax} > dx = {self.dx}"
            )

    def floor_index(self, t: float) -> int:
        """Index of the last grid time at or before t (with snapping)."""
        return int(math.floor(t / self.dt + GRID_SNAP))

    def grid_time(self, k: int) -> float:
        return k * self.dt

    def is_grid_time(self, t: float) -> bool:
        k = self.floor_index(t)
        return abs(t - self.grid_time(k)) <= GRID_SNAP * self.dt

    def same_as(self, other: "Grid") -> bool:
        return self.cells == other.cells and self.dx == other.dx
