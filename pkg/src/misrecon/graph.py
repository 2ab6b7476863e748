"""Immutable undirected graph plus the distance, domination and component
queries that every other module consumes.

Vertex sets are plain ``frozenset[int]`` throughout; nothing here mutates a
graph after construction, so graphs and vertex sets are safe to share.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

from .errors import InputError

VertexSet = frozenset[int]


class Graph:
    """Undirected simple graph over non-negative integer node ids.

    Node ids are arbitrary non-negative integers and need not be contiguous.
    Self-loops and edges naming unknown nodes are rejected.
    """

    __slots__ = ("_adj", "_nodes")

    def __init__(
        self,
        nodes: Iterable[int] = (),
        edges: Iterable[tuple[int, int]] = (),
    ) -> None:
        adj: dict[int, set[int]] = {}
        for v in nodes:
            v = int(v)
            if v < 0:
                raise InputError(f"negative node id {v}")
            adj.setdefault(v, set())
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise InputError(f"self-loop on node {u}")
            if u not in adj or v not in adj:
                missing = u if u not in adj else v
                raise InputError(f"edge {u}-{v} names undeclared node {missing}")
            adj[u].add(v)
            adj[v].add(u)
        self._adj: dict[int, VertexSet] = {v: frozenset(ns) for v, ns in adj.items()}
        self._nodes: VertexSet = frozenset(self._adj)

    @classmethod
    def from_adjacency(cls, mapping: Mapping[int, Iterable[int]]) -> "Graph":
        edges = [(u, v) for u, ns in mapping.items() for v in ns]
        return cls(mapping.keys(), edges)

    @property
    def nodes(self) -> VertexSet:
        return self._nodes

    def neighbors(self, v: int) -> VertexSet:
        try:
            return self._adj[v]
        except KeyError:
            raise InputError(f"unknown node id {v}") from None

    def degree(self, v: int) -> int:
        return len(self.neighbors(v))

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._adj.get(u, frozenset())

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in sorted(self._adj) for v in sorted(self._adj[u]) if u < v]

    def induced(self, keep: Iterable[int]) -> "Graph":
        keep_set = frozenset(keep)
        unknown = keep_set - self._nodes
        if unknown:
            raise InputError(f"unknown node ids {sorted(unknown)}")
        return Graph(keep_set, [(u, v) for u, v in self.edges() if u in keep_set and v in keep_set])

    def __contains__(self, v: int) -> bool:
        return v in self._nodes

    def __len__(self) -> int:
        return len(self._nodes)

    def __iter__(self) -> Iterator[int]:
        return iter(sorted(self._nodes))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Graph) and self._adj == other._adj

    def __hash__(self) -> int:
        return hash((self._nodes, frozenset(self._adj.items())))

    def __repr__(self) -> str:
        return f"Graph({len(self._nodes)} nodes, {len(self.edges())} edges)"


def distances_from(g: Graph, source: int, restrict: VertexSet | None = None) -> dict[int, int]:
    """BFS hop distances from ``source``; unreachable nodes are absent.

    With ``restrict`` given, distances are measured in the subgraph induced by
    ``restrict`` (which must contain the source).
    """
    if source not in g:
        raise InputError(f"unknown source id {source}")
    if restrict is not None and source not in restrict:
        raise InputError(f"source {source} not in restriction set")
    dist = {source: 0}
    queue = deque([source])
    while queue:
        v = queue.popleft()
        for w in g.neighbors(v):
            if w in dist or (restrict is not None and w not in restrict):
                continue
            dist[w] = dist[v] + 1
            queue.append(w)
    return dist


def ball(g: Graph, source: int, radius: int, restrict: VertexSet | None = None) -> VertexSet:
    """All nodes within ``radius`` hops of ``source``."""
    return frozenset(v for v, d in distances_from(g, source, restrict).items() if d <= radius)


def connected_components(g: Graph, within: VertexSet | None = None) -> list[VertexSet]:
    """Connected components of g (or of the subgraph induced by ``within``),
    sorted by minimum node id."""
    universe = g.nodes if within is None else frozenset(within)
    seen: set[int] = set()
    comps: list[VertexSet] = []
    for v in sorted(universe):
        if v in seen:
            continue
        comp = frozenset(distances_from(g, v, universe))
        seen |= comp
        comps.append(comp)
    return comps


def diameter(g: Graph, within: VertexSet | None = None) -> float:
    """Exact diameter of the (induced) subgraph; ``inf`` when disconnected,
    0 for a single node, ``-inf`` for an empty vertex set."""
    universe = g.nodes if within is None else frozenset(within)
    if not universe:
        return -math.inf
    best = 0
    for v in universe:
        dist = distances_from(g, v, universe)
        if len(dist) != len(universe):
            return math.inf
        best = max(best, max(dist.values()))
    return best


def is_independent(g: Graph, s: VertexSet) -> bool:
    """True iff no edge of g has both endpoints in s; the empty set counts."""
    s = frozenset(s)
    return all(not (g.neighbors(v) & s) for v in s)


def is_d_dominating(g: Graph, s: VertexSet, d: int) -> bool:
    """True iff every node of g is within ``d`` hops of some member of s."""
    if d < 1:
        raise InputError(f"domination radius must be positive, got {d}")
    s = frozenset(s)
    if not s:
        return not g.nodes
    covered: set[int] = set()
    queue = deque((v, 0) for v in sorted(s))
    covered |= set(s)
    while queue:
        v, dist = queue.popleft()
        if dist == d:
            continue
        for w in g.neighbors(v):
            if w not in covered:
                covered.add(w)
                queue.append((w, dist + 1))
    return len(covered) == len(g.nodes)


def is_mis(g: Graph, s: VertexSet) -> bool:
    """True iff s is independent and every node outside s has a neighbor in s."""
    s = frozenset(s)
    if not is_independent(g, s):
        return False
    return all(v in s or (g.neighbors(v) & s) for v in g.nodes)


def complement_restricted(g: Graph, keep: VertexSet) -> Graph:
    """Graph on ``keep`` whose edges are exactly the non-edges of g within it."""
    keep_list = sorted(frozenset(keep))
    unknown = frozenset(keep) - g.nodes
    if unknown:
        raise InputError(f"unknown node ids {sorted(unknown)}")
    edges = [
        (u, v)
        for i, u in enumerate(keep_list)
        for v in keep_list[i + 1 :]
        if not g.has_edge(u, v)
    ]
    return Graph(keep_list, edges)


@dataclass(frozen=True)
class ComponentInfo:
    """One connected component of alpha ∪ beta with its classification.

    ``diameter`` is exact, measured in the subgraph induced by the component.
    ``isolated`` means every adjacent epsilon-node has all of its alpha- and
    beta-neighbors inside this component.  The covered flags record whether
    some epsilon-node links the component to an alpha- (beta-) node of a
    different component while touching this one through a beta- (alpha-) node.
    """

    vertices: VertexSet
    diameter: int
    isolated: bool
    alpha_covered: bool
    beta_covered: bool

    @property
    def min_id(self) -> int:
        return min(self.vertices)


def components_of(g: Graph, u: VertexSet, alpha: VertexSet, beta: VertexSet) -> list[ComponentInfo]:
    """Partition ``u`` into connected components of the induced subgraph and
    annotate each with diameter, isolation and covering labels."""
    u = frozenset(u)
    if not u <= g.nodes:
        raise InputError(f"component universe contains unknown ids {sorted(u - g.nodes)}")
    alpha, beta = frozenset(alpha), frozenset(beta)
    comps = connected_components(g, u)
    comp_index: dict[int, int] = {}
    for i, comp in enumerate(comps):
        for v in comp:
            comp_index[v] = i

    eps_nodes = g.nodes - alpha - beta
    isolated = [True] * len(comps)
    alpha_covered = [False] * len(comps)
    beta_covered = [False] * len(comps)
    for e in sorted(eps_nodes):
        touched = {comp_index[w] for w in g.neighbors(e) if w in comp_index}
        if not touched:
            continue
        n_alpha = g.neighbors(e) & alpha
        n_beta = g.neighbors(e) & beta
        for i in touched:
            if not (n_alpha <= comps[i] and n_beta <= comps[i]):
                isolated[i] = False
        # e covers component j through alpha iff e has a beta-neighbor in j
        # and an alpha-neighbor in a different component.
        alpha_sides = {comp_index[w] for w in n_alpha if w in comp_index}
        beta_sides = {comp_index[w] for w in n_beta if w in comp_index}
        for j in beta_sides:
            if alpha_sides - {j}:
                alpha_covered[j] = True
        for j in alpha_sides:
            if beta_sides - {j}:
                beta_covered[j] = True

    out = []
    for i, comp in enumerate(comps):
        diam = diameter(g, comp)
        assert diam != math.inf, "component must be connected by construction"
        out.append(
            ComponentInfo(
                vertices=comp,
                diameter=int(diam),
                isolated=isolated[i],
                alpha_covered=alpha_covered[i],
                beta_covered=beta_covered[i],
            )
        )
    return out


def parse_graph_file(text: str) -> Graph:
    """Parse the ``node <id>`` / ``edge <id> <id>`` text format.

    Blank lines and ``#`` comments are ignored; duplicate edges are ignored;
    an edge naming an undeclared node is an error (with its line number).
    """
    nodes: list[int] = []
    edges: list[tuple[int, int, int]] = []
    declared: set[int] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if parts[0] == "node" and len(parts) == 2:
                v = int(parts[1])
                if v not in declared:
                    declared.add(v)
                    nodes.append(v)
                continue
            if parts[0] == "edge" and len(parts) == 3:
                u, v = int(parts[1]), int(parts[2])
                edges.append((u, v, lineno))
                continue
        except ValueError:
            raise InputError(f"line {lineno}: malformed record {raw!r}") from None
        raise InputError(f"line {lineno}: malformed record {raw!r}")
    for u, v, lineno in edges:
        if u not in declared or v not in declared:
            missing = u if u not in declared else v
            raise InputError(f"line {lineno}: edge {u}-{v} names undeclared node {missing}")
    dedup = sorted({(min(u, v), max(u, v)) for u, v, _ in edges})
    return Graph(sorted(nodes), dedup)


def format_graph_file(g: Graph) -> str:
    lines = [f"node {v}" for v in sorted(g.nodes)]
    lines += [f"edge {u} {v}" for u, v in g.edges()]
    return "\n".join(lines) + "\n"
