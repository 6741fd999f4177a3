"""
Shared fixtures: bundled scenarios and a builder for small line networks.
"""

from typing import Optional, Sequence

import pytest

from src.data import load_bundled_scenario
from src.network import (
    CapacityTable,
    DistributionRates,
    InitialState,
    PiecewiseConstantSignal,
    ProcessorParams,
    Scenario,
    Topology,
)
from src.rates import CONSTANT_MATRIX, LINEAR_LOAD_DEPENDENT, RateModelSpec


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False,
                     help="run full-size statistical acceptance tests")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture(scope="session")
def diamond() -> Scenario:
    return load_bundled_scenario("diamond_constant_inflow")


@pytest.fixture(scope="session")
def diamond_piecewise() -> Scenario:
    return load_bundled_scenario("diamond_piecewise_inflow")


@pytest.fixture(scope="session")
def single_processor() -> Scenario:
    return load_bundled_scenario("single_processor")


def constant_rates(edges: int, rate: float) -> RateModelSpec:
    """Two-state constant matrices with the same rate in both directions."""
    matrix = ((0.0, rate), (rate, 0.0))
    return RateModelSpec(variant=CONSTANT_MATRIX, matrices=tuple(matrix for _ in range(edges)))


def load_dependent_rates(edges: int, beta: float = 0.0,
                         down_ref: float = 1 / 0.85, rep_ref: float = 1 / 0.15) -> RateModelSpec:
    return RateModelSpec(
        variant=LINEAR_LOAD_DEPENDENT,
        down_ref=tuple(down_ref for _ in range(edges)),
        rep_ref=tuple(rep_ref for _ in range(edges)),
        beta=tuple(beta for _ in range(edges)),
    )


def line_scenario(
    edges: int = 1,
    inflow=1.0,
    capacities: Sequence[float] = (0.0, 2.0),
    rates: Optional[RateModelSpec] = None,
    velocity: float = 1.0,
    length: float = 1.0,
    dx: float = 0.1,
    horizon: float = 10.0,
    queues: float = 0.0,
    density: float = 0.0,
    regimes: Optional[Sequence[int]] = None,
    output_step: float = 0.5,
) -> Scenario:
    """Edges 1..n in series between vertices "0" and "n"."""
    topology = Topology.from_pairs([(i + 1, str(i), str(i + 1)) for i in range(edges)])
    cells = int(round(length / dx))
    if isinstance(inflow, PiecewiseConstantSignal):
        signal = inflow
    else:
        signal = PiecewiseConstantSignal.constant(inflow, horizon)
    return Scenario(
        topology=topology,
        processors=ProcessorParams(
            a=tuple(0.0 for _ in range(edges)),
            length=tuple(length for _ in range(edges)),
            velocity=tuple(velocity for _ in range(edges)),
        ),
        capacities=CapacityTable(tuple(tuple(capacities) for _ in range(edges))),
        distribution=DistributionRates({}),
        inflows={"0": signal},
        rates=rates or constant_rates(edges, 0.0),
        initial=InitialState(
            queues=tuple(queues for _ in range(edges)),
            densities=tuple(tuple(density for _ in range(cells)) for _ in range(edges)),
            regimes=tuple(regimes) if regimes is not None else tuple(len(capacities) for _ in range(edges)),
        ),
        horizon=horizon,
        dx=dx,
        output_step=output_step,
        name=f"line-{edges}",
    )


@pytest.fixture
def make_line():
    return line_scenario
