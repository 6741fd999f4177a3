"""
Piecewise-constant time signals.

Inflow profiles G_in^v and distribution rates A^{v,e} are step functions
on [0, T]. They are right-continuous: the value of [t_k, t_{k+1}) applies
at t = t_k.
"""

from bisect import bisect_right
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from ..exceptions import DomainError

# Slack for evaluation times produced by floating-point grid arithmetic.
TIME_TOLERANCE = 1e-9


@dataclass(frozen=True)
class PiecewiseConstantSignal:
    """
    Step function with values[k] on [breakpoints[k], breakpoints[k+1]).

    The last value extends to the horizon T.
    """

    breakpoints: Tuple[float, ...]
    values: Tuple[float, ...]
    horizon: float

    @classmethod
    def constant(cls, value: float, horizon: float) -> "PiecewiseConstantSignal":
        return cls((0.0,), (float(value),), float(horizon))

    @classmethod
    def from_lists(
        cls,
        breakpoints: Sequence[float],
        values: Sequence[float],
        horizon: float
    ) -> "PiecewiseConstantSignal":
        return cls(
            tuple(float(b) for b in breakpoints),
            tuple(float(v) for v in values),
            float(horizon)
        )

    def problems(self) -> List[str]:
        """List every broken invariant of this signal (empty when valid)."""
        issues = []
        if len(self.breakpoints) == 0:
            issues.append("signal has no breakpoints")
            return issues
        if len(self.breakpoints) != len(self.values):
            issues.append(
                f"signal has {len(self.breakpoints)} breakpoints but {len(self.values)} values"
            )
        if self.breakpoints[0] != 0.0:
            issues.append(f"signal must start at t=0, first breakpoint is {self.breakpoints[0]}")
        if any(b1 <= b0 for b0, b1 in zip(self.breakpoints, self.breakpoints[1:])):
            issues.append("signal breakpoints must be strictly increasing")
        if self.breakpoints[-1] > self.horizon:
            issues.append(
                f"signal breakpoint {self.breakpoints[-1]} lies beyond horizon {self.horizon}"
            )
        if any(v < 0 or not np.isfinite(v) for v in self.values):
            issues.append("signal values must be finite and nonnegative")
        return issues

    def __call__(self, t: float) -> float:
        return eval_signal(self, t)

    def integral(self, t0: float = 0.0, t1: float = None) -> float:
        """Exact integral over [t0, t1] (defaults to the whole horizon)."""
        if t1 is None:
            t1 = self.horizon
        ends = list(self.breakpoints[1:]) + [self.horizon]
        total = 0.0
        for start, end, value in zip(self.breakpoints, ends, self.values):
            lo, hi = max(start, t0), min(end, t1)
            if hi > lo:
                total += value * (hi - lo)
        return total

    def sup(self) -> float:
        return max(self.values) if self.values else 0.0


def eval_signal(sig: PiecewiseConstantSignal, t: float) -> float:
    """
    Evaluate a piecewise-constant signal.

    Args:
        sig: Signal to evaluate
        t: Time in [0, T]

    Returns:
        Value of the interval containing t (right-continuous)

    Raises:
        DomainError: If t lies outside [0, T]
    """
    if t < -TIME_TOLERANCE or t > sig.horizon + TIME_TOLERANCE:
        raise DomainError(f"time {t} outside signal domain [0, {sig.horizon}]")
    k = bisect_right(sig.breakpoints, t) - 1
    return sig.values[max(k, 0)]


class SignalTable:
    """
    Several step signals merged onto the union of their breakpoints.

    Lookup costs one `np.searchsorted` over the merged knots and returns a
    vector with one entry per signal, which is what the solver needs once
    per time step.
    """

    def __init__(self, signals: Sequence[PiecewiseConstantSignal], horizon: float):
        self.horizon = float(horizon)
        self.breakpoints = np.array(
            sorted({b for sig in signals for b in sig.breakpoints} | {0.0}), dtype=float
        )
        if signals:
            rows = [[eval_signal(sig, k) for sig in signals] for k in self.breakpoints]
            self.table = np.asarray(rows, dtype=float)
        else:
            self.table = np.zeros((len(self.breakpoints), 0))

    def __call__(self, t: float) -> np.ndarray:
        if t < -TIME_TOLERANCE or t > self.horizon + TIME_TOLERANCE:
            raise DomainError(f"time {t} outside signal domain [0, {self.horizon}]")
        k = int(np.searchsorted(self.breakpoints, t, side="right")) - 1
        return self.table[max(k, 0)]

    def pieces(self) -> np.ndarray:
        """Signal vectors on every piece of the merged partition."""
        return self.table
