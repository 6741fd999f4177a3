"""
Directed production network graph.

Edges are processors; vertices join queues to the processors feeding them.
Vertex ids come from the scenario file and are mapped to dense indices.
"""

import logging
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Hashable, List, Sequence, Set, Tuple

import numpy as np

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Edge:
    id: int
    start: Hashable
    end: Hashable


@dataclass(frozen=True)
class Topology:
    """
    Finite directed graph G = (V, C).

    Edge order is the order given in the scenario and is the index order
    used by every array in the solver.
    """

    edges: Tuple[Edge, ...]
    declared_vertices: Tuple[Hashable, ...] = field(default=())

    @classmethod
    def from_pairs(cls, pairs: Sequence[Tuple[int, Hashable, Hashable]]) -> "Topology":
        return cls(tuple(Edge(int(i), s, e) for i, s, e in pairs))

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @cached_property
    def vertices(self) -> Tuple[Hashable, ...]:
        seen: Dict[Hashable, None] = {}
        for edge in self.edges:
            seen.setdefault(edge.start)
            seen.setdefault(edge.end)
        for v in self.declared_vertices:
            seen.setdefault(v)
        return tuple(seen)

    @cached_property
    def vertex_index(self) -> Dict[Hashable, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def edge_ids(self) -> Tuple[int, ...]:
        return tuple(edge.id for edge in self.edges)

    @cached_property
    def edge_index(self) -> Dict[int, int]:
        return {edge.id: i for i, edge in enumerate(self.edges)}

    def ingoing(self, v: Hashable) -> List[int]:
        """Edge indices of δ_v⁻."""
        return [i for i, edge in enumerate(self.edges) if edge.end == v]

    def outgoing(self, v: Hashable) -> List[int]:
        """Edge indices of δ_v⁺."""
        return [i for i, edge in enumerate(self.edges) if edge.start == v]

    @cached_property
    def inflow_vertices(self) -> Tuple[Hashable, ...]:
        return tuple(v for v in self.vertices if not self.ingoing(v))

    @cached_property
    def outflow_vertices(self) -> Tuple[Hashable, ...]:
        return tuple(v for v in self.vertices if not self.outgoing(v))

    @cached_property
    def start_index(self) -> np.ndarray:
        return np.array([self.vertex_index[e.start] for e in self.edges], dtype=int)

    @cached_property
    def end_index(self) -> np.ndarray:
        return np.array([self.vertex_index[e.end] for e in self.edges], dtype=int)

    @cached_property
    def outflow_edge_mask(self) -> np.ndarray:
        """Edges ending at an outflow vertex."""
        sinks = set(self.outflow_vertices)
        return np.array([e.end in sinks for e in self.edges], dtype=bool)

    @cached_property
    def inflow_edge_mask(self) -> np.ndarray:
        sources = set(self.inflow_vertices)
        return np.array([e.start in sources for e in self.edges], dtype=bool)

    def unreachable_vertices(self) -> List[Hashable]:
        """Vertices not reachable from any inflow vertex."""
        reached: Set[Hashable] = set(self.inflow_vertices)
        frontier = deque(self.inflow_vertices)
        while frontier:
            v = frontier.popleft()
            for i in self.outgoing(v):
                w = self.edges[i].end
                if w not in reached:
                    reached.add(w)
                    frontier.append(w)
        return [v for v in self.vertices if v not in reached]

    def has_cycle(self) -> bool:
        indegree = {v: len(self.ingoing(v)) for v in self.vertices}
        ready = deque(v for v, d in indegree.items() if d == 0)
        visited = 0
        while ready:
            v = ready.popleft()
            visited += 1
            for i in self.outgoing(v):
                w = self.edges[i].end
                indegree[w] -= 1
                if indegree[w] == 0:
                    ready.append(w)
        return visited < len(self.vertices)

    def problems(self) -> Tuple[List[str], List[str]]:
        """Return (violations, warnings) for the graph structure."""
        violations, warnings = [], []
        if self.num_edges == 0:
            violations.append("network has no edges")
        ids = [e.id for e in self.edges]
        duplicates = sorted({i for i in ids if ids.count(i) > 1})
        if duplicates:
            violations.append(f"duplicate edge ids: {duplicates}")
        if self.declared_vertices:
            declared = set(self.declared_vertices)
            for edge in self.edges:
                for v in (edge.start, edge.end):
                    if v not in declared:
                        violations.append(f"edge {edge.id} references undeclared vertex {v}")
        for edge in self.edges:
            if edge.start == edge.end:
                violations.append(f"edge {edge.id} is a self-loop at vertex {edge.start}")
        if self.num_edges and not self.inflow_vertices:
            violations.append("network has no inflow vertex (every vertex has ingoing edges)")
        if self.num_edges and not self.outflow_vertices:
            violations.append("network has no outflow vertex (every vertex has outgoing edges)")
        unreachable = self.unreachable_vertices()
        if unreachable:
            warnings.append(f"vertices not reachable from an inflow vertex: {unreachable}")
        if self.has_cycle():
            warnings.append("network contains a directed cycle")
        return violations, warnings
