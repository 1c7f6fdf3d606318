"""Attributed molecular graphs built from parsed topologies.

A UnifiedGraph combines the per-molecule graphs of one reaction side under
globally unique node ids.  Nodes carry mass, type id, charge and the index
of the source molecule; edges come from the Bonds section of the inputs.

Graphs are immutable after construction, so every operation here is
read-only and safe to call concurrently.  Expensive per-node quantities
(BFS shells, eccentricities, centralities) are cached on first use.
"""

from __future__ import annotations

import math
from collections import Counter, deque
from dataclasses import dataclass, field

import numpy as np

from templater.errors import EmptyTopology, NoEdges
from templater.lammps_io import SystemTopology

CENTRALITY_TOLERANCE = 1e-10
CENTRALITY_MAX_ITERATIONS = 10_000


@dataclass(frozen=True)
class AtomNode:
    """One atom of a unified graph."""

    global_id: int
    source_id: int
    mass: float
    type_id: int
    charge: float
    component: int


class UnifiedGraph:
    """Immutable union of the molecular graphs of one reaction side."""

    def __init__(self, side: str, nodes: list[AtomNode], edges: set[tuple[int, int]]):
        self.side = side
        self.nodes: dict[int, AtomNode] = {n.global_id: n for n in nodes}
        self.edges: frozenset[tuple[int, int]] = frozenset(
            (min(a, b), max(a, b)) for a, b in edges
        )
        adjacency: dict[int, set[int]] = {gid: set() for gid in self.nodes}
        for a, b in self.edges:
            adjacency[a].add(b)
            adjacency[b].add(a)
        self._adjacency = {gid: tuple(sorted(nbrs)) for gid, nbrs in adjacency.items()}
        components: dict[int, list[int]] = {}
        for gid in sorted(self.nodes):
            components.setdefault(self.nodes[gid].component, []).append(gid)
        self.components: dict[int, tuple[int, ...]] = {
            c: tuple(gids) for c, gids in components.items()
        }
        self.molecule_count = len(self.components)
        self._gid_by_source: dict[tuple[int, int], int] = {
            (n.component, n.source_id): n.global_id for n in nodes
        }
        self._shells: dict[int, tuple[tuple[int, ...], ...]] = {}
        self._centrality: dict[int, dict[int, float]] = {}

    def neighbors(self, gid: int) -> tuple[int, ...]:
        return self._adjacency[gid]

    def degree(self, gid: int) -> int:
        return len(self._adjacency[gid])

    def has_edge(self, a: int, b: int) -> bool:
        return (min(a, b), max(a, b)) in self.edges

    def gid_for(self, component: int, source_id: int) -> int:
        return self._gid_by_source[(component, source_id)]

    def sorted_gids(self) -> list[int]:
        return sorted(self.nodes)

    def shells(self, gid: int) -> tuple[tuple[int, ...], ...]:
        """Nodes of the same molecule grouped by exact hop distance from gid.

        Index 0 holds the root itself; index k the depth-k shell.
        """
        cached = self._shells.get(gid)
        if cached is not None:
            return cached
        component = self.nodes[gid].component
        seen = {gid: 0}
        frontier = [gid]
        shells = [(gid,)]
        while frontier:
            nxt = []
            for node in frontier:
                for nbr in self._adjacency[node]:
                    if nbr not in seen and self.nodes[nbr].component == component:
                        seen[nbr] = seen[node] + 1
                        nxt.append(nbr)
            if nxt:
                shells.append(tuple(sorted(nxt)))
            frontier = nxt
        result = tuple(shells)
        self._shells[gid] = result
        return result


def build_unified_graph(topologies: list[SystemTopology], side: str) -> UnifiedGraph:
    """Combine per-molecule topologies into one graph with global node ids.

    Component ids follow the position of the topology in the input list
    (1-based).  Global ids are assigned by cumulative offset, so the first
    molecule keeps its ids when they are contiguous; files with id gaps are
    renumbered by ascending source id before the offset is applied.
    """
    nodes: list[AtomNode] = []
    edges: set[tuple[int, int]] = set()
    offset = 0
    for position, topology in enumerate(topologies, start=1):
        if not topology.atoms:
            raise EmptyTopology(f"topology {position} has no atoms")
        ordered = sorted(topology.atoms, key=lambda a: a.atom_id)
        gid_of = {atom.atom_id: offset + rank for rank, atom in enumerate(ordered, start=1)}
        for atom in ordered:
            nodes.append(
                AtomNode(
                    global_id=gid_of[atom.atom_id],
                    source_id=atom.atom_id,
                    mass=topology.masses[atom.type_id],
                    type_id=atom.type_id,
                    charge=atom.charge,
                    component=position,
                )
            )
        for _type_id, (a, b) in topology.bonds:
            if a == b:
                continue
            edges.add((gid_of[a], gid_of[b]))
        offset += len(ordered)
    return UnifiedGraph(side=side, nodes=nodes, edges=edges)


@dataclass
class FeatureSet:
    """Topological features of a graph, canonicalized by type signature.

    Each entry pairs the participating node tuple with the tuple of their
    type ids, stored in the orientation whose signature is lexicographically
    smallest (node ids break signature ties).
    """

    bonds: list[tuple[tuple[int, int], tuple[int, int]]] = field(default_factory=list)
    angles: list[tuple[tuple[int, int, int], tuple[int, int, int]]] = field(default_factory=list)
    dihedrals: list[tuple[tuple[int, ...], tuple[int, ...]]] = field(default_factory=list)
    impropers: list[tuple[tuple[int, ...], tuple[int, ...]]] = field(default_factory=list)


def _orient(graph: UnifiedGraph, nodes: tuple[int, ...]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    forward = tuple(graph.nodes[n].type_id for n in nodes)
    reverse = tuple(reversed(forward))
    if (reverse, tuple(reversed(nodes))) < (forward, nodes):
        return tuple(reversed(nodes)), reverse
    return nodes, forward


def enumerate_features(graph: UnifiedGraph) -> FeatureSet:
    """Enumerate bonds, angles, dihedrals and impropers exactly once."""
    features = FeatureSet()
    for a, b in sorted(graph.edges):
        features.bonds.append(_orient(graph, (a, b)))

    for center in graph.sorted_gids():
        nbrs = graph.neighbors(center)
        for i in range(len(nbrs)):
            for j in range(i + 1, len(nbrs)):
                features.angles.append(_orient(graph, (nbrs[i], center, nbrs[j])))

    seen: set[tuple[int, ...]] = set()
    for b, c in sorted(graph.edges):
        for a in graph.neighbors(b):
            if a == c:
                continue
            for d in graph.neighbors(c):
                if d == b or d == a:
                    continue
                nodes, _sig = _orient(graph, (a, b, c, d))
                if nodes not in seen:
                    seen.add(nodes)
                    features.dihedrals.append(_orient(graph, nodes))

    for center in graph.sorted_gids():
        nbrs = graph.neighbors(center)
        if len(nbrs) < 3:
            continue
        for i in range(len(nbrs)):
            for j in range(i + 1, len(nbrs)):
                for k in range(j + 1, len(nbrs)):
                    triple = sorted(
                        (nbrs[i], nbrs[j], nbrs[k]),
                        key=lambda n: (graph.nodes[n].type_id, n),
                    )
                    nodes = (center, *triple)
                    features.impropers.append(
                        (nodes, tuple(graph.nodes[n].type_id for n in nodes))
                    )

    features.dihedrals.sort()
    return features


def _connected_pieces(graph: UnifiedGraph, gids: tuple[int, ...]) -> list[list[int]]:
    remaining = set(gids)
    pieces = []
    while remaining:
        start = min(remaining)
        queue = deque([start])
        piece = {start}
        while queue:
            node = queue.popleft()
            for nbr in graph.neighbors(node):
                if nbr in remaining and nbr not in piece:
                    piece.add(nbr)
                    queue.append(nbr)
        remaining -= piece
        pieces.append(sorted(piece))
    return pieces


def eigenvector_centrality(graph: UnifiedGraph, component: int) -> dict[int, float]:
    """Principal-eigenvector centrality of one molecule, unit Euclidean norm.

    Power iteration runs on A + I so that bipartite molecules (any tree)
    converge; the shift leaves the principal eigenvector unchanged.  Should
    the component be disconnected, each connected piece is treated on its
    own and edgeless single atoms receive 0.
    """
    gids = graph.components.get(component)
    if gids is None:
        raise KeyError(f"no component {component} in graph")
    if all(graph.degree(g) == 0 for g in gids):
        raise NoEdges(f"component {component} has no edges")

    result: dict[int, float] = {}
    for piece in _connected_pieces(graph, gids):
        if len(piece) == 1:
            result[piece[0]] = 0.0
            continue
        index = {gid: i for i, gid in enumerate(piece)}
        size = len(piece)
        matrix = np.eye(size)
        for gid in piece:
            for nbr in graph.neighbors(gid):
                if nbr in index:
                    matrix[index[gid], index[nbr]] = 1.0
        vector = np.full(size, 1.0 / math.sqrt(size))
        for _ in range(CENTRALITY_MAX_ITERATIONS):
            nxt = matrix @ vector
            nxt /= np.linalg.norm(nxt)
            if np.max(np.abs(nxt - vector)) <= CENTRALITY_TOLERANCE:
                vector = nxt
                break
            vector = nxt
        for gid in piece:
            result[gid] = float(vector[index[gid]])
    return result


def centrality_by_node(graph: UnifiedGraph, component: int) -> dict[int, float]:
    """Cached per-molecule centrality; 0.0 for components without edges."""
    cached = graph._centrality.get(component)
    if cached is None:
        try:
            cached = eigenvector_centrality(graph, component)
        except NoEdges:
            cached = {gid: 0.0 for gid in graph.components[component]}
        graph._centrality[component] = cached
    return cached


def shortest_path_distances(graph: UnifiedGraph, sources: set[int]) -> dict[int, float]:
    """Multi-source BFS hop counts; unreachable nodes map to math.inf."""
    distances: dict[int, float] = {gid: math.inf for gid in graph.nodes}
    queue = deque()
    for gid in sorted(sources):
        distances[gid] = 0
        queue.append(gid)
    while queue:
        node = queue.popleft()
        for nbr in graph.neighbors(node):
            if distances[nbr] == math.inf:
                distances[nbr] = distances[node] + 1
                queue.append(nbr)
    return distances


def eccentricity_within_component(graph: UnifiedGraph, gid: int) -> int:
    """Longest shortest path from gid to any reachable node of its molecule."""
    shells = graph.shells(gid)
    return len(shells) - 1


_ROLE_STYLE = {
    "conserved": ("black", "white"),
    "similarity": ("red", "black"),
    "path-refined": ("red", "black"),
    "hydrogen-swapped": ("red", "black"),
    "created": ("green", "black"),
    "deleted": ("blue", "white"),
    "initiator": ("orange", "black"),
}


def dot_export(graph: UnifiedGraph, roles: dict[int, str] | None = None, name: str | None = None) -> str:
    """Render the graph as DOT text with mapping-role colors.

    Node labels are the source atom ids; the fill color encodes the mapping
    role (conserved black, similarity red, created green, deleted blue,
    initiators orange).
    """
    roles = roles or {}
    out = [f'graph "{name or graph.side}" {{']
    out.append("  node [shape=circle, style=filled, fillcolor=lightgray];")
    for gid in graph.sorted_gids():
        node = graph.nodes[gid]
        fill, font = _ROLE_STYLE.get(roles.get(gid, ""), ("lightgray", "black"))
        out.append(
            f'  n{gid} [label="{node.source_id}", fillcolor="{fill}", fontcolor="{font}"];'
        )
    for a, b in sorted(graph.edges):
        out.append(f"  n{a} -- n{b};")
    out.append("}")
    return "\n".join(out) + "\n"
