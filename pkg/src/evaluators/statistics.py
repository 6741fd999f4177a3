"""
Mergeable streaming statistics for ensembles of paths.

Means and second central moments use Welford updates and the pairwise
(Chan) merge, element-wise over whole time series. Terminal values are
kept so histograms can span the observed range of the full ensemble.
"""

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from ..exceptions import DomainError
from ..pdmp.path import PathRecord

TIME_SERIES_MEASURES = ("capacity", "queue", "ur", "rwip", "exit_flux", "q_net", "g_net_out")
TERMINAL_MEASURES = ("q_net", "g_net_out")
HISTOGRAM_BINS = 40


@dataclass
class RunningMoments:
    """Count, running mean and M2 of equally shaped arrays."""

    count: int = 0
    mean: Optional[np.ndarray] = None
    m2: Optional[np.ndarray] = None

    def add(self, x: np.ndarray) -> None:
        x = np.asarray(x, dtype=float)
        if self.count == 0:
            self.count = 1
            self.mean = x.copy()
            self.m2 = np.zeros_like(x)
            return
        self.count += 1
        delta = x - self.mean
        self.mean = self.mean + delta / self.count
        self.m2 = self.m2 + delta * (x - self.mean)

    def merge(self, other: "RunningMoments") -> "RunningMoments":
        if other.count == 0:
            return RunningMoments(self.count, _copy(self.mean), _copy(self.m2))
        if self.count == 0:
            return RunningMoments(other.count, _copy(other.mean), _copy(other.m2))
        n1, n2 = self.count, other.count
        combined = n1 + n2
        delta = other.mean - self.mean
        mean = self.mean + delta * (n2 / combined)
        m2 = self.m2 + other.m2 + delta * delta * (n1 * n2 / combined)
        return RunningMoments(combined, mean, m2)

    def variance(self) -> np.ndarray:
        """Unbiased sample variance (n − 1 denominator); NaN below two samples."""
        if self.count < 2:
            return np.full_like(self.mean, np.nan) if self.mean is not None else np.array(np.nan)
        return self.m2 / (self.count - 1)

    def std(self) -> np.ndarray:
        return np.sqrt(self.variance())


def _copy(a: Optional[np.ndarray]) -> Optional[np.ndarray]:
    return None if a is None else a.copy()


@dataclass
class EnsembleStats:
    """Per-measure moments on the output grid plus terminal samples."""

    times: np.ndarray
    edge_ids: Tuple[int, ...]
    measures: Tuple[str, ...] = TIME_SERIES_MEASURES
    moments: Dict[str, RunningMoments] = field(default_factory=dict)
    terminal: Dict[str, List[float]] = field(default_factory=dict)

    def __post_init__(self):
        unknown = set(self.measures) - set(TIME_SERIES_MEASURES)
        if unknown:
            raise ValueError(f"unknown measures: {sorted(unknown)}")
        for name in self.measures:
            self.moments.setdefault(name, RunningMoments())
        for name in TERMINAL_MEASURES:
            self.terminal.setdefault(name, [])

    @classmethod
    def for_path(cls, path: PathRecord, measures: Sequence[str] = TIME_SERIES_MEASURES) -> "EnsembleStats":
        return cls(path.times.copy(), tuple(path.edge_ids), tuple(measures))

    @property
    def count(self) -> int:
        return len(self.terminal[TERMINAL_MEASURES[0]])

    def accumulate(self, path: PathRecord) -> "EnsembleStats":
        """Add one path in place and return self."""
        if path.times.shape != self.times.shape or not np.allclose(path.times, self.times, atol=1e-9):
            raise DomainError("path output grid does not match the ensemble grid")
        for name in self.measures:
            self.moments[name].add(getattr(path, name))
        for name in TERMINAL_MEASURES:
            self.terminal[name].append(float(getattr(path, name)[-1]))
        return self

    def merge(self, other: "EnsembleStats") -> "EnsembleStats":
        """New accumulator equal to self followed by other."""
        if self.times.shape != other.times.shape or self.measures != other.measures:
            raise DomainError("cannot merge ensembles with different grids or measures")
        return EnsembleStats(
            times=self.times.copy(),
            edge_ids=self.edge_ids,
            measures=self.measures,
            moments={name: self.moments[name].merge(other.moments[name]) for name in self.measures},
            terminal={name: self.terminal[name] + other.terminal[name] for name in TERMINAL_MEASURES},
        )

    def mean(self, name: str) -> np.ndarray:
        return self.moments[name].mean

    def variance(self, name: str) -> np.ndarray:
        return self.moments[name].variance()

    def std(self, name: str) -> np.ndarray:
        return self.moments[name].std()

    def terminal_values(self, name: str) -> np.ndarray:
        return np.asarray(self.terminal[name], dtype=float)

    def histogram(self, name: str, bins: int = HISTOGRAM_BINS) -> Tuple[np.ndarray, np.ndarray]:
        """
        Histogram of a terminal measure over [min, max] of the ensemble.

        Returns:
            (bin_edges, counts); counts sum to the sample size
        """
        values = self.terminal_values(name)
        if values.size == 0:
            return np.zeros(bins + 1), np.zeros(bins, dtype=int)
        lo, hi = float(values.min()), float(values.max())
        if hi <= lo:
            lo, hi = lo - 0.5, hi + 0.5
        counts, edges = np.histogram(values, bins=bins, range=(lo, hi))
        return edges, counts


def accumulate(stats: EnsembleStats, path: PathRecord) -> EnsembleStats:
    return stats.accumulate(path)


def merge(a: EnsembleStats, b: EnsembleStats) -> EnsembleStats:
    return a.merge(b)


def merge_all(parts: Iterable[EnsembleStats]) -> Optional[EnsembleStats]:
    """Fold accumulators left to right in the given order."""
    result = None
    for part in parts:
        result = part if result is None else result.merge(part)
    return result
