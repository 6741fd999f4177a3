"""
Exception hierarchy for the production network simulator.

Validation problems are reported, not raised; the classes here cover
malformed input, runtime model failures and domain errors of individual
operations.
"""

from typing import Optional


class NetworkSimError(Exception):
    """Base class for all simulator errors."""


class ScenarioFormatError(NetworkSimError):
    """Scenario document is unreadable or structurally malformed."""


class ModelError(NetworkSimError):
    """A model that passed parsing failed while being simulated."""


class InvalidScenarioError(ModelError):
    """Simulation was requested on a scenario with validation violations."""

    def __init__(self, report):
        self.report = report
        listed = "; ".join(report.violations[:5])
        more = len(report.violations) - 5
        if more > 0:
            listed += f" (+{more} more)"
        super().__init__(f"scenario has {len(report.violations)} violation(s): {listed}")


class CFLViolationError(ModelError):
    """Upwind step requested with v * dt > dx."""


class RateBoundViolationError(ModelError):
    """Aggregate jump rate exceeded the dominating thinning rate."""

    def __init__(
        self,
        psi: float,
        bound: float,
        time: float,
        path_index: Optional[int] = None
    ):
        self.psi = psi
        self.bound = bound
        self.time = time
        self.path_index = path_index
        where = f"path {path_index}, " if path_index is not None else ""
        super().__init__(
            f"rate bound violated ({where}t={time:.12g}): psi={psi:.12g} > bound={bound:.12g}"
        )

    def with_path(self, path_index: int) -> "RateBoundViolationError":
        return RateBoundViolationError(self.psi, self.bound, self.time, path_index)

    def __reduce__(self):
        return (type(self), (self.psi, self.bound, self.time, self.path_index))


class DomainError(NetworkSimError, ValueError):
    """Argument lies outside the domain of an operation."""
