"""
Base class and parameter record for jump-rate models.

Every rate model maps (t, q^e, ρ^e) to transition rates λ^e_{ij} between
capacity regimes. Subclasses implement the per-edge rows; the aggregate
rate ψ and the dominating bound are derived here.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass, replace
from typing import TYPE_CHECKING, List, Sequence, Tuple

import numpy as np

if TYPE_CHECKING:
    from ..network.scenario import Scenario
    from ..solver.state import NetworkState

CONSTANT_MATRIX = "constant_matrix"
LINEAR_LOAD_DEPENDENT = "linear_load_dependent"
VARIANTS = (CONSTANT_MATRIX, LINEAR_LOAD_DEPENDENT)


@dataclass(frozen=True)
class RateModelSpec:
    """
    Rate model parameters as read from the scenario file.

    `constant_matrix` uses `matrices` (one C^e x C^e table per edge,
    diagonal ignored). `linear_load_dependent` uses per-edge reference
    rates and β.
    """

    variant: str
    matrices: Tuple[Tuple[Tuple[float, ...], ...], ...] = ()
    down_ref: Tuple[float, ...] = ()
    rep_ref: Tuple[float, ...] = ()
    beta: Tuple[float, ...] = ()
    bound_inflation: float = 1.0

    def with_beta(self, beta: float) -> "RateModelSpec":
        """Same spec with β set to one value on every edge."""
        return replace(self, beta=tuple(float(beta) for _ in self.beta))

    def down_min(self) -> np.ndarray:
        return (1.0 - np.asarray(self.beta)) * np.asarray(self.down_ref)

    def down_max(self) -> np.ndarray:
        return (1.0 + np.asarray(self.beta)) * np.asarray(self.down_ref)

    def rep_min(self) -> np.ndarray:
        return (1.0 - np.asarray(self.beta)) * np.asarray(self.rep_ref)

    def rep_max(self) -> np.ndarray:
        return (1.0 + np.asarray(self.beta)) * np.asarray(self.rep_ref)


@dataclass(frozen=True)
class RateBounds:
    """Per-edge dominating rates λ̄^e and the network bound λ̄ = Σ_e λ̄^e."""

    per_edge: Tuple[float, ...]

    @property
    def total(self) -> float:
        return float(sum(self.per_edge))


class RateModel(ABC):
    """
    Abstract base class for transition-rate models.

    Regimes are 1-based, matching the scenario file and the event output.
    """

    def __init__(self, spec: RateModelSpec, scenario: "Scenario"):
        self.spec = spec
        self.scenario = scenario
        self.states = tuple(scenario.capacities.states(e) for e in range(scenario.num_edges))

    @abstractmethod
    def transition_row(
        self,
        e: int,
        i: int,
        t: float,
        state: "NetworkState",
        regimes: Sequence[int]
    ) -> np.ndarray:
        """
        Rates λ^e_{il} for l = 1..C^e, with a zero in position i.

        Args:
            e: Edge index
            i: Current regime of edge e (1-based)
            t: Time
            state: Deterministic network state
            regimes: Full regime vector

        Returns:
            Array of length C^e
        """

    def transition_rows(
        self,
        t: float,
        state: "NetworkState",
        regimes: Sequence[int]
    ) -> List[np.ndarray]:
        """transition_row of every edge at its current regime."""
        return [self.transition_row(e, r, t, state, regimes) for e, r in enumerate(regimes)]

    @abstractmethod
    def exit_rates(
        self,
        t: float,
        state: "NetworkState",
        regimes: Sequence[int]
    ) -> np.ndarray:
        """Row sums λ^e_{r_e r_e} for every edge at once."""

    @abstractmethod
    def edge_bounds(self) -> np.ndarray:
        """Sup of the row sums over the a.s. reachable load box, per edge."""

    def rate(
        self,
        e: int,
        i: int,
        j: int,
        t: float,
        state: "NetworkState",
        regimes: Sequence[int]
    ) -> float:
        if i == j:
            raise ValueError("diagonal rates are row sums and are never queried directly")
        return float(self.transition_row(e, i, t, state, regimes)[j - 1])

    def psi(self, t: float, state: "NetworkState", regimes: Sequence[int]) -> float:
        return float(np.sum(self.exit_rates(t, state, regimes)))

    def bounds(self) -> RateBounds:
        inflated = self.edge_bounds() * self.spec.bound_inflation
        return RateBounds(tuple(float(b) for b in inflated))
