#!/usr/bin/env python3
"""
Scenario files: JSON parsing, serialization, bundled scenarios and a
random scenario generator.

A scenario document has the top-level keys `topology`, `processors`,
`distribution`, `inflows`, `rates`, `numerics` and `initial`. Signals are
either a number (constant on [0, T]) or {"breakpoints": [...], "values": [...]}.
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Union

import numpy as np

from ..exceptions import ScenarioFormatError
from ..network.scenario import (
    CapacityTable,
    DistributionRates,
    InitialState,
    ProcessorParams,
    Scenario,
)
from ..network.signals import PiecewiseConstantSignal
from ..network.topology import Edge, Topology
from ..rates.base_rates import CONSTANT_MATRIX, LINEAR_LOAD_DEPENDENT, RateModelSpec

logger = logging.getLogger(__name__)

BUNDLED_DIR = Path(__file__).parent / "scenarios"
CFL_EQUAL = "cfl-equal"


def _signal(raw: Any, horizon: float, where: str) -> PiecewiseConstantSignal:
    if isinstance(raw, (int, float)) and not isinstance(raw, bool):
        return PiecewiseConstantSignal.constant(float(raw), horizon)
    if isinstance(raw, Mapping) and "breakpoints" in raw and "values" in raw:
        return PiecewiseConstantSignal.from_lists(raw["breakpoints"], raw["values"], horizon)
    raise ScenarioFormatError(f"{where}: signal must be a number or {{breakpoints, values}}")


def _per_edge(raw: Any, edge_ids: Sequence[int], where: str) -> List[Any]:
    """Broadcast a scalar, or order a list / {edge_id: value} map by edge."""
    if isinstance(raw, Mapping):
        try:
            return [raw[str(e)] if str(e) in raw else raw[e] for e in edge_ids]
        except KeyError as exc:
            raise ScenarioFormatError(f"{where}: missing entry for edge {exc.args[0]}") from exc
    if isinstance(raw, list):
        return list(raw)
    return [raw for _ in edge_ids]


def _require(doc: Mapping, key: str, where: str) -> Any:
    if not isinstance(doc, Mapping) or key not in doc:
        raise ScenarioFormatError(f"{where}: missing required key {key!r}")
    return doc[key]


def _parse_topology(doc: Mapping) -> Topology:
    raw_edges = _require(doc, "edges", "topology")
    if not isinstance(raw_edges, list) or not raw_edges:
        raise ScenarioFormatError("topology.edges must be a nonempty list")
    edges = []
    for k, raw in enumerate(raw_edges):
        where = f"topology.edges[{k}]"
        edges.append(Edge(
            int(_require(raw, "id", where)),
            str(_require(raw, "from", where)),
            str(_require(raw, "to", where)),
        ))
    declared = tuple(str(v) for v in doc.get("vertices", ()))
    return Topology(tuple(edges), declared)


def _parse_rates(doc: Mapping, edge_ids: Sequence[int]) -> RateModelSpec:
    variant = _require(doc, "variant", "rates")
    inflation = float(doc.get("bound_inflation", 1.0))
    if variant == CONSTANT_MATRIX:
        raw = _require(doc, "matrices", "rates")
        # a single C x C table applies to every edge
        if isinstance(raw, list) and raw and isinstance(raw[0], list) and raw[0] \
                and isinstance(raw[0][0], (int, float)):
            raw = [raw for _ in edge_ids]
        matrices = _per_edge(raw, edge_ids, "rates.matrices")
        return RateModelSpec(
            variant=variant,
            matrices=tuple(tuple(tuple(float(x) for x in row) for row in m) for m in matrices),
            bound_inflation=inflation,
        )
    if variant == LINEAR_LOAD_DEPENDENT:
        return RateModelSpec(
            variant=variant,
            down_ref=tuple(float(x) for x in _per_edge(_require(doc, "down_ref", "rates"), edge_ids, "rates.down_ref")),
            rep_ref=tuple(float(x) for x in _per_edge(_require(doc, "rep_ref", "rates"), edge_ids, "rates.rep_ref")),
            beta=tuple(float(x) for x in _per_edge(doc.get("beta", 0.0), edge_ids, "rates.beta")),
            bound_inflation=inflation,
        )
    # unknown variants are reported by validation
    return RateModelSpec(variant=str(variant), bound_inflation=inflation)


def parse_scenario(doc: Mapping, name: str = "scenario") -> Scenario:
    """
    Build a Scenario from a decoded JSON document.

    Structural problems (missing keys, wrong types) raise; semantic
    problems are left for validate_scenario to report.

    Raises:
        ScenarioFormatError: If the document is malformed
    """
    try:
        return _parse(doc, name)
    except ScenarioFormatError:
        raise
    except (KeyError, TypeError, ValueError, AttributeError, IndexError) as exc:
        raise ScenarioFormatError(f"malformed scenario {name!r}: {exc}") from exc


def _parse(doc: Mapping, name: str) -> Scenario:
    if not isinstance(doc, Mapping):
        raise ScenarioFormatError("scenario document must be a JSON object")
    topology = _parse_topology(_require(doc, "topology", "scenario"))
    edge_ids = topology.edge_ids

    numerics = _require(doc, "numerics", "scenario")
    horizon = float(_require(numerics, "horizon", "numerics"))
    dx = float(_require(numerics, "dx", "numerics"))
    policy = numerics.get("dt_policy", CFL_EQUAL)
    if policy == CFL_EQUAL:
        dt = None
    elif isinstance(policy, (int, float)) and not isinstance(policy, bool):
        dt = float(policy)
    else:
        raise ScenarioFormatError(f"numerics.dt_policy must be {CFL_EQUAL!r} or a number")

    procs = _per_edge(_require(doc, "processors", "scenario"), edge_ids, "processors")
    processors = ProcessorParams(
        a=tuple(float(p.get("a", 0.0)) for p in procs),
        length=tuple(float(p.get("length", 1.0)) for p in procs),
        velocity=tuple(float(_require(p, "velocity", f"processors.{e}")) for p, e in zip(procs, edge_ids)),
    )
    capacities = CapacityTable(tuple(
        tuple(float(mu) for mu in _require(p, "capacities", f"processors.{e}"))
        for p, e in zip(procs, edge_ids)
    ))

    distribution: Dict[str, Dict[int, PiecewiseConstantSignal]] = {}
    for vertex, shares in doc.get("distribution", {}).items():
        if not isinstance(shares, Mapping):
            raise ScenarioFormatError(f"distribution.{vertex} must map edge ids to signals")
        row = {}
        for edge_id, raw in shares.items():
            if int(edge_id) not in topology.edge_index:
                raise ScenarioFormatError(f"distribution.{vertex}: unknown edge {edge_id}")
            row[topology.edge_index[int(edge_id)]] = _signal(raw, horizon, f"distribution.{vertex}.{edge_id}")
        distribution[str(vertex)] = row

    inflows = {
        str(vertex): _signal(raw, horizon, f"inflows.{vertex}")
        for vertex, raw in doc.get("inflows", {}).items()
    }

    cells = [int(round(l / dx)) if dx > 0 else 0 for l in processors.length]
    init = doc.get("initial", {})
    queues = _per_edge(init.get("queues", 0.0), edge_ids, "initial.queues")
    if "densities" in init:
        densities = _per_edge(init["densities"], edge_ids, "initial.densities")
        densities = [[float(d)] * m if isinstance(d, (int, float)) else d for d, m in zip(densities, cells)]
    else:
        densities = [[0.0] * m for m in cells]
    regimes = [int(p.get("initial_regime", len(row))) for p, row in zip(procs, capacities.values)]

    return Scenario(
        topology=topology,
        processors=processors,
        capacities=capacities,
        distribution=DistributionRates(distribution),
        inflows=inflows,
        rates=_parse_rates(_require(doc, "rates", "scenario"), edge_ids),
        initial=InitialState(
            queues=tuple(float(q) for q in queues),
            densities=tuple(tuple(float(x) for x in row) for row in densities),
            regimes=tuple(regimes),
        ),
        horizon=horizon,
        dx=dx,
        output_step=float(numerics.get("output_step", dt if dt is not None else dx / max(processors.velocity))),
        dt=dt,
        name=str(doc.get("name", name)),
    )


def load_scenario(path: Union[str, Path]) -> Scenario:
    """
    Read and parse a scenario JSON file.

    Raises:
        ScenarioFormatError: If the file cannot be read, decoded or parsed
    """
    path = Path(path)
    try:
        with open(path, 'r', encoding='utf-8') as f:
            doc = json.load(f)
    except OSError as exc:
        raise ScenarioFormatError(f"cannot read scenario file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ScenarioFormatError(f"scenario file {path} is not valid JSON: {exc}") from exc
    logger.debug("loaded scenario document %s", path)
    return parse_scenario(doc, name=path.stem)


def get_bundled_scenarios() -> List[str]:
    """Names of the scenario files shipped with the package."""
    return sorted(p.stem for p in BUNDLED_DIR.glob("*.json"))


def bundled_scenario_path(name: str) -> Path:
    path = BUNDLED_DIR / f"{name}.json"
    if not path.exists():
        raise ScenarioFormatError(
            f"no bundled scenario {name!r}; available: {', '.join(get_bundled_scenarios())}"
        )
    return path


def load_bundled_scenario(name: str) -> Scenario:
    return load_scenario(bundled_scenario_path(name))


def _signal_to_json(sig: PiecewiseConstantSignal) -> Any:
    if len(sig.values) == 1:
        return sig.values[0]
    return {"breakpoints": list(sig.breakpoints), "values": list(sig.values)}


def scenario_to_dict(scenario: Scenario) -> Dict[str, Any]:
    """Inverse of parse_scenario (explicit dt is written as a number)."""
    topo = scenario.topology
    ids = topo.edge_ids
    spec = scenario.rates
    if spec.variant == CONSTANT_MATRIX:
        rates: Dict[str, Any] = {"variant": spec.variant, "matrices": [list(map(list, m)) for m in spec.matrices]}
    else:
        rates = {
            "variant": spec.variant,
            "down_ref": list(spec.down_ref),
            "rep_ref": list(spec.rep_ref),
            "beta": list(spec.beta),
        }
    rates["bound_inflation"] = spec.bound_inflation
    return {
        "name": scenario.name,
        "topology": {
            "edges": [{"id": e.id, "from": e.start, "to": e.end} for e in topo.edges],
            "vertices": list(topo.declared_vertices),
        },
        "processors": {
            str(edge_id): {
                "a": scenario.processors.a[i],
                "length": scenario.processors.length[i],
                "velocity": scenario.processors.velocity[i],
                "capacities": list(scenario.capacities.values[i]),
                "initial_regime": scenario.initial.regimes[i],
            }
            for i, edge_id in enumerate(ids)
        },
        "distribution": {
            str(v): {str(ids[e]): _signal_to_json(sig) for e, sig in row.items()}
            for v, row in scenario.distribution.rates.items()
        },
        "inflows": {str(v): _signal_to_json(sig) for v, sig in scenario.inflows.items()},
        "rates": rates,
        "numerics": {
            "dx": scenario.dx,
            "dt_policy": CFL_EQUAL if scenario.dt is None else scenario.dt,
            "horizon": scenario.horizon,
            "output_step": scenario.output_step,
        },
        "initial": {
            "queues": {str(e): q for e, q in zip(ids, scenario.initial.queues)},
            "densities": {str(e): list(row) for e, row in zip(ids, scenario.initial.densities)},
        },
    }


def dump_scenario(scenario: Scenario, path: Union[str, Path]) -> None:
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(scenario_to_dict(scenario), f, indent=2)


def generate_random_scenario(
    rng: np.random.Generator,
    max_edges: int = 5,
    horizon: float = 10.0,
    dx: float = 0.1,
    pieces: int = 4,
    beta: Optional[float] = None,
    name: Optional[str] = None
) -> Scenario:
    """
    Random acyclic network with one inflow vertex and piecewise inflow.

    Every edge after the first starts at a vertex that already has an
    ingoing edge, so vertex "0" is the only inflow vertex. Inflow
    breakpoints fall anywhere in (0, T), on or off the time grid.

    Args:
        rng: Source of randomness
        max_edges: Upper bound on the edge count
        horizon: Time horizon T
        dx: Cell width; processor lengths are multiples of it
        pieces: Maximum number of inflow pieces
        beta: Load dependency on every edge (random when None)
        name: Scenario name

    Returns:
        A scenario that passes validation
    """
    n = int(rng.integers(1, max_edges + 1))
    pairs = [(0, 1)]
    vertex_count = 2
    for _ in range(1, n):
        start = int(rng.integers(1, vertex_count))
        later = list(range(start + 1, vertex_count))
        if later and rng.random() < 0.4:
            end = int(rng.choice(later))
        else:
            end = vertex_count
            vertex_count += 1
        pairs.append((start, end))
    topology = Topology(tuple(Edge(i + 1, str(s), str(e)) for i, (s, e) in enumerate(pairs)))

    velocity = tuple(float(rng.choice([0.5, 1.0])) for _ in range(n))
    length = tuple(float(rng.choice([0.5, 1.0])) for _ in range(n))
    mu_up = tuple(float(rng.uniform(1.5, 3.0)) for _ in range(n))
    capacities = CapacityTable(tuple((float(rng.uniform(0.0, 0.5)) * up, up) for up in mu_up))

    distribution: Dict[str, Dict[int, PiecewiseConstantSignal]] = {}
    for v in topology.vertices:
        out = topology.outgoing(v)
        if len(out) > 1:
            shares = rng.dirichlet(np.ones(len(out)))
            shares[-1] = 1.0 - shares[:-1].sum()
            distribution[v] = {
                e: PiecewiseConstantSignal.constant(float(share), horizon) for e, share in zip(out, shares)
            }

    count = int(rng.integers(1, pieces + 1))
    cuts = [float(c) for c in np.unique(rng.uniform(0.0, horizon, size=count - 1)) if c > 0.0]
    inflow = PiecewiseConstantSignal.from_lists(
        [0.0] + cuts,
        rng.uniform(0.0, 2.0, size=len(cuts) + 1),
        horizon,
    )

    cells = [int(round(l / dx)) for l in length]
    densities = tuple(
        tuple(float(x) for x in rng.uniform(0.0, up / v, size=m))
        for up, v, m in zip(mu_up, velocity, cells)
    )
    betas = tuple(float(rng.uniform(0.0, 1.0)) if beta is None else float(beta) for _ in range(n))
    spec = RateModelSpec(
        variant=LINEAR_LOAD_DEPENDENT,
        down_ref=tuple(float(x) for x in rng.uniform(0.5, 2.0, size=n)),
        rep_ref=tuple(float(x) for x in rng.uniform(1.0, 3.0, size=n)),
        beta=betas,
    )
    return Scenario(
        topology=topology,
        processors=ProcessorParams(a=tuple(0.0 for _ in range(n)), length=length, velocity=velocity),
        capacities=capacities,
        distribution=DistributionRates(distribution),
        inflows={"0": inflow},
        rates=spec,
        initial=InitialState(
            queues=tuple(float(q) for q in rng.uniform(0.0, 1.0, size=n)),
            densities=densities,
            regimes=tuple(int(r) for r in rng.integers(1, 3, size=n)),
        ),
        horizon=horizon,
        dx=dx,
        output_step=horizon / 20,
        name=name or f"random-{n}-edges",
    )
