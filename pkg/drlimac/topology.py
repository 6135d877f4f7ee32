"""
Undirected mesh topologies, their 1-hop neighbourhoods and two-hop degrees.

Topologies are immutable once built and may be shared by any number of runs.
Node IDs are ``0..node_count-1`` and every ordering is ascending by ID so that
runs are reproducible under a fixed seed.
"""
import operator
from collections import namedtuple
from dataclasses import dataclass, field
from typing import FrozenSet, Iterable, Mapping, Optional, Tuple

import networkx as nx

from .errors import TopologyError


@dataclass(frozen=True)
class Topology:
    node_count: int
    edges: FrozenSet[Tuple[int, int]]

    _graph: nx.Graph = field(init=False, repr=False, compare=False)
    _neighbors: Tuple[Tuple[int, ...], ...] = field(
        init=False, repr=False, compare=False
    )

    def __post_init__(self):
        if not isinstance(self.node_count, int) or self.node_count < 1:
            raise TopologyError(f"node count must be a positive integer: {self.node_count}")

        canonical = set()
        for u, v in self.edges:
            if u == v:
                raise TopologyError(f"self-loop on node {u}")
            for n in (u, v):
                if not 0 <= n < self.node_count:
                    raise TopologyError(
                        f"edge ({u}, {v}) references node {n} outside 0..{self.node_count - 1}"
                    )
            canonical.add((min(u, v), max(u, v)))

        graph = nx.Graph()
        graph.add_nodes_from(range(self.node_count))
        graph.add_edges_from(sorted(canonical))

        isolated = sorted(nx.isolates(graph))
        if isolated:
            # A node without neighbours has nobody to send its packets to
            raise TopologyError(f"isolated nodes have no destination: {isolated}")

        # The dataclass is frozen, the derived views are computed once here
        object.__setattr__(self, "edges", frozenset(canonical))
        object.__setattr__(self, "_graph", graph)
        object.__setattr__(
            self,
            "_neighbors",
            tuple(tuple(sorted(graph.neighbors(n))) for n in range(self.node_count)),
        )

    @classmethod
    def from_edges(cls, edges: Iterable[Tuple[int, int]], node_count: Optional[int] = None):
        edges = [(int(u), int(v)) for u, v in edges]
        if node_count is None:
            if not edges:
                raise TopologyError("cannot infer the node count of an empty edge list")
            node_count = max(max(u, v) for u, v in edges) + 1
        return cls(node_count=node_count, edges=frozenset(edges))

    @property
    def graph(self) -> nx.Graph:
        # Callers must not mutate it
        return self._graph

    @property
    def nodes(self) -> range:
        return range(self.node_count)

    def neighbors(self, node) -> Tuple[int, ...]:
        return neighbors(self, node)

    def degree(self, node) -> int:
        return len(neighbors(self, node))


def neighbors(topo: Topology, node) -> Tuple[int, ...]:
    try:
        node = operator.index(node)
    except TypeError:
        raise TopologyError(f"node IDs are integers, got {node!r}") from None
    if not 0 <= node < topo.node_count:
        raise TopologyError(f"unknown node {node} (topology has {topo.node_count} nodes)")
    return topo._neighbors[node]


def two_hop_degree(topo: Topology, node) -> int:
    # Distinct nodes within two hops, excluding the node itself
    neighbors(topo, node)
    reach = nx.single_source_shortest_path_length(topo.graph, int(node), cutoff=2)
    return len(reach) - 1


def max_two_hop_degree(topo: Topology) -> int:
    return max(two_hop_degree(topo, n) for n in topo.nodes)


def _ring(n, *chords):
    return [(i, (i + 1) % n) for i in range(n)] + list(chords)


# `reconstructed` marks topologies for which only the node count and the
# maximum two-hop degree are known; the edge lists are plausible instances.
Preset = namedtuple("Preset", "name node_count edges reconstructed description")


def _preset(name, edges, *, reconstructed, description):
    node_count = max(max(u, v) for u, v in edges) + 1
    return Preset(name, node_count, tuple(edges), reconstructed, description)


PRESETS: Mapping[str, Preset] = {
    p.name: p
    for p in (
        _preset("line3", [(0, 1), (1, 2)], reconstructed=False,
                description="3-node line"),
        _preset("full4", [(u, v) for u in range(4) for v in range(u + 1, 4)],
                reconstructed=False, description="4-node complete graph"),
        _preset("line4", [(0, 1), (1, 2), (2, 3)], reconstructed=False,
                description="4-node line"),
        _preset("star5", [(0, 1), (0, 2), (0, 3), (0, 4)], reconstructed=True,
                description="5-node star, max two-hop degree 4"),
        _preset("ring5", _ring(5), reconstructed=True,
                description="5-node ring, max two-hop degree 4"),
        # Any connected 5-node graph has a node within two hops of all others,
        # so a maximum two-hop degree of 3 cannot be built; the line is the
        # sparsest stand-in.
        _preset("line5", [(0, 1), (1, 2), (2, 3), (3, 4)], reconstructed=True,
                description="5-node line, max two-hop degree 4"),
        _preset("mesh8",
                [(0, 1), (0, 2), (0, 3), (1, 4), (2, 5), (3, 6), (3, 7), (4, 5)],
                reconstructed=True, description="8-node mesh, max two-hop degree 7"),
        _preset("mesh12_d7", _ring(12, (0, 6)), reconstructed=True,
                description="12-node mesh, max two-hop degree 7"),
        _preset("mesh12_d9", _ring(12, (0, 6), (0, 3)), reconstructed=True,
                description="12-node mesh, max two-hop degree 9"),
        _preset("mesh12_d10", _ring(12, (0, 4), (0, 8)), reconstructed=True,
                description="12-node mesh, max two-hop degree 10"),
        _preset("mesh12_d11", _ring(12, (0, 3), (0, 6), (0, 9)), reconstructed=True,
                description="12-node dense mesh, max two-hop degree 11"),
        _preset("ring10_d5", _ring(10, (0, 2)), reconstructed=True,
                description="10-node mesh, max two-hop degree 5"),
        _preset("mesh10_d9", _ring(10, (0, 3), (0, 5), (0, 7)), reconstructed=True,
                description="10-node mesh, max two-hop degree 9"),
    )
}


def preset(name) -> Topology:
    try:
        p = PRESETS[name]
    except KeyError:
        raise TopologyError(
            f"unknown topology preset {name!r}, known: {', '.join(PRESETS)}"
        ) from None
    return Topology.from_edges(p.edges, p.node_count)
