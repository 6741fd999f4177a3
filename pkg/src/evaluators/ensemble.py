"""
Monte Carlo ensembles of sample paths.

Paths 0..M−1 are split into fixed-size chunks. Each chunk is simulated
sequentially into its own accumulator, and accumulators are merged in
chunk order, so the result does not depend on how many workers ran.
"""

import logging
import time
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

from tqdm import tqdm

from ..exceptions import DomainError, InvalidScenarioError
from ..network.scenario import Scenario
from ..network.validation import validate_scenario
from ..pdmp.path import PathRecord, pathwise_bound_violations, simulate_path
from ..rates.base_rates import RateModelSpec
from ..rates.bounds import build_rate_model
from ..solver.grid import Grid
from .statistics import TIME_SERIES_MEASURES, EnsembleStats, merge_all

logger = logging.getLogger(__name__)

DEFAULT_CHUNK_SIZE = 50
STEP_TOLERANCE = 1e-12


@dataclass(frozen=True)
class EnsembleConfig:
    """
    Ensemble run parameters.

    Attributes:
        samples: Number of paths M (≥ 1)
        seed: Master seed; path i uses the substream (seed, i)
        workers: Worker processes; 1 runs in-process
        output_step: Output grid step (defaults to the scenario's)
        measures: Time-series measures to accumulate
        retain_paths: Keep the first K PathRecords
        chunk_size: Paths per work unit; fixes the merge order
        progress: Show a progress bar
    """

    samples: int
    seed: int = 0
    workers: int = 1
    output_step: Optional[float] = None
    measures: Tuple[str, ...] = TIME_SERIES_MEASURES
    retain_paths: int = 0
    chunk_size: int = DEFAULT_CHUNK_SIZE
    progress: bool = False

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError(f"samples must be at least 1, got {self.samples}")
        if self.workers < 1:
            raise ValueError(f"workers must be at least 1, got {self.workers}")
        if self.chunk_size < 1:
            raise ValueError(f"chunk_size must be positive, got {self.chunk_size}")
        if self.retain_paths < 0:
            raise ValueError("retain_paths must be nonnegative")

    def chunks(self) -> List[Tuple[int, int]]:
        return [
            (start, min(start + self.chunk_size, self.samples))
            for start in range(0, self.samples, self.chunk_size)
        ]


@dataclass
class EnsembleResult:
    """Merged statistics, retained paths and run bookkeeping."""

    stats: EnsembleStats
    paths: List[PathRecord] = field(default_factory=list)
    elapsed: float = 0.0
    jumps: int = 0
    candidates: int = 0
    bound_violations: int = 0


def _check_output_step(scenario: Scenario, step: float) -> None:
    if step <= 0:
        raise DomainError(f"output step must be positive, got {step}")
    ratio = scenario.horizon / step
    if abs(ratio - round(ratio)) * step > STEP_TOLERANCE * max(1.0, scenario.horizon):
        raise DomainError(f"output step {step} does not divide the horizon {scenario.horizon}")


def run_chunk(
    scenario: Scenario,
    spec: RateModelSpec,
    seed: int,
    start: int,
    stop: int,
    output_step: float,
    measures: Sequence[str],
    retain_below: int
) -> Tuple[EnsembleStats, List[PathRecord], int, int, int]:
    """
    Simulate paths start..stop−1 into one accumulator.

    Module-level so it can be shipped to worker processes.
    """
    model = build_rate_model(spec, scenario)
    bound = model.bounds()
    grid = Grid.from_scenario(scenario)
    stats: Optional[EnsembleStats] = None
    retained: List[PathRecord] = []
    jumps = candidates = violations = 0
    for index in range(start, stop):
        path = simulate_path(
            scenario, model, seed, path_index=index,
            output_step=output_step, bound=bound, grid=grid
        )
        if stats is None:
            stats = EnsembleStats.for_path(path, measures)
        stats.accumulate(path)
        jumps += len(path.events)
        candidates += path.candidates
        violations += len(pathwise_bound_violations(path, scenario))
        if index < retain_below:
            retained.append(path)
    return stats, retained, jumps, candidates, violations


def run_ensemble(scenario: Scenario, spec: RateModelSpec, cfg: EnsembleConfig) -> EnsembleResult:
    """
    Simulate cfg.samples paths and merge their statistics.

    Args:
        scenario: Scenario to simulate
        spec: Rate model parameters, e.g. scenario.rates.with_beta(b);
            validated together with the scenario
        cfg: Ensemble configuration

    Returns:
        EnsembleResult with merged stats and the first cfg.retain_paths paths

    Raises:
        InvalidScenarioError: If validation reports violations
        RateBoundViolationError: From the first failing path, with its index
    """
    report = validate_scenario(replace(scenario, rates=spec))
    if not report.ok:
        raise InvalidScenarioError(report)
    output_step = cfg.output_step or scenario.output_step
    _check_output_step(scenario, output_step)
    # fail fast on an unusable bound before any worker starts
    build_rate_model(spec, scenario).bounds()

    chunks = cfg.chunks()
    args = (scenario, spec, cfg.seed)
    tail = (output_step, tuple(cfg.measures), cfg.retain_paths)
    logger.info(
        "ensemble: %d paths in %d chunks on %d worker(s), seed %d",
        cfg.samples, len(chunks), cfg.workers, cfg.seed
    )
    started = time.perf_counter()
    results: Dict[int, tuple] = {}

    if cfg.workers == 1 or len(chunks) == 1:
        iterator = enumerate(chunks)
        if cfg.progress:
            iterator = tqdm(iterator, total=len(chunks), desc="Simulating paths")
        for k, (start, stop) in iterator:
            results[k] = run_chunk(*args, start, stop, *tail)
    else:
        with ProcessPoolExecutor(max_workers=cfg.workers) as executor:
            futures = {
                executor.submit(run_chunk, *args, start, stop, *tail): k
                for k, (start, stop) in enumerate(chunks)
            }
            pbar = tqdm(total=len(chunks), desc="Simulating paths") if cfg.progress else None
            try:
                for future in as_completed(futures):
                    results[futures[future]] = future.result()
                    if pbar is not None:
                        pbar.update(1)
            except BaseException:
                for pending in futures:
                    pending.cancel()
                raise
            finally:
                if pbar is not None:
                    pbar.close()

    ordered = [results[k] for k in range(len(chunks))]
    stats = merge_all(part[0] for part in ordered)
    paths = [path for part in ordered for path in part[1]]
    result = EnsembleResult(
        stats=stats,
        paths=paths,
        elapsed=time.perf_counter() - started,
        jumps=sum(part[2] for part in ordered),
        candidates=sum(part[3] for part in ordered),
        bound_violations=sum(part[4] for part in ordered),
    )
    logger.info(
        "ensemble finished in %.2fs: %d jumps from %d candidates",
        result.elapsed, result.jumps, result.candidates
    )
    if result.bound_violations:
        logger.warning("%d pathwise bound violation(s) in the ensemble", result.bound_violations)
    return result
