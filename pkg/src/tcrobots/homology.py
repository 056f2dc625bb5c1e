"""Discrete two-robot configuration complexes and their homology.

The track graph is subdivided into ``n`` edges per track edge.  Cells of the
discrete configuration space are products of closed cells of the graph with
disjoint closures: ordered vertex pairs, a robot sliding along an edge while
the other sits at a vertex off that edge, and both robots sliding along
vertex-disjoint edges (squares).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations

import networkx as nx
from networkx.utils import UnionFind

from .spaces import Edge, PhysPoint, Space

MIN_SUBDIVISION = 5


@dataclass(frozen=True)
class TrackGraph:
    space: Space
    n: int
    nodes: int
    edges: tuple[tuple[int, int], ...]

    def degree(self, v: int) -> int:
        return sum(v in e for e in self.edges)

    def betti1(self) -> int:
        uf = UnionFind(range(self.nodes))
        for u, v in self.edges:
            uf.union(u, v)
        return len(self.edges) - self.nodes + len(list(uf.to_sets()))

    def point(self, v: int) -> PhysPoint:
        """Track position of graph node ``v``."""
        n = self.n
        if self.space is Space.INTERVAL:
            return PhysPoint(Edge.I, v / n)
        if self.space is Space.CIRCLE:
            return PhysPoint(Edge.C, v / n)
        if v < n:
            return PhysPoint(Edge.I, v / n)
        return PhysPoint(Edge.C, (v - n) / n)


def track_graph(space: Space, n: int) -> TrackGraph:
    space = Space(space)
    if space is Space.INTERVAL:
        edges = tuple((k, k + 1) for k in range(n))
        return TrackGraph(space, n, n + 1, edges)
    if space is Space.CIRCLE:
        edges = tuple((k, (k + 1) % n) for k in range(n))
        return TrackGraph(space, n, n, edges)
    # interval nodes 0..n with n the junction, circle nodes n..2n-1
    stick = [(k, k + 1) for k in range(n)]
    loop = [(n + j, n + j + 1) for j in range(n - 1)] + [(2 * n - 1, n)]
    return TrackGraph(space, n, 2 * n, tuple(stick + loop))


@dataclass
class DiscreteConfigComplex:
    graph: TrackGraph
    nodes: list[tuple[int, int]]
    edges: list[tuple[int, int]]  # pairs of indices into ``nodes``
    squares: list[tuple[int, int, int, int]]

    @property
    def V(self) -> int:
        return len(self.nodes)

    @property
    def E(self) -> int:
        return len(self.edges)

    @property
    def F(self) -> int:
        return len(self.squares)

    def index(self, pair: tuple[int, int]) -> int:
        return self._index[pair]

    def __post_init__(self):
        self._index = {p: i for i, p in enumerate(self.nodes)}

    @cached_property
    def one_skeleton(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(len(self.nodes)))
        g.add_edges_from(self.edges)
        return g


def discretize(space: Space, n: int = 8) -> DiscreteConfigComplex:
    if n < MIN_SUBDIVISION:
        raise ValueError(f"subdivision must be at least {MIN_SUBDIVISION}, got {n}")
    g = track_graph(space, n)
    N = g.nodes
    nodes = [(p, q) for p in range(N) for q in range(N) if p != q]
    index = {pair: i for i, pair in enumerate(nodes)}
    cells = []
    for u, v in g.edges:
        for w in range(N):
            if w == u or w == v:
                continue
            cells.append((index[(u, w)], index[(v, w)]))  # robot A moves
            cells.append((index[(w, u)], index[(w, v)]))  # robot B moves
    squares = []
    for (u1, v1), (u2, v2) in combinations(g.edges, 2):
        if {u1, v1} & {u2, v2}:
            continue
        for (a0, a1), (b0, b1) in (((u1, v1), (u2, v2)), ((u2, v2), (u1, v1))):
            squares.append((index[(a0, b0)], index[(a1, b0)], index[(a1, b1)], index[(a0, b1)]))
    return DiscreteConfigComplex(g, nodes, cells, squares)


@dataclass(frozen=True)
class HomologySummary:
    V: int
    E: int
    F: int
    b0: int
    chi: int
    b1: int

    def as_dict(self) -> dict:
        return {"V": self.V, "E": self.E, "F": self.F, "chi": self.chi, "b0": self.b0, "b1": self.b1}


def homology(complex_: DiscreteConfigComplex) -> HomologySummary:
    """Component count by union-find, Euler characteristic, and b1 assuming b2 = 0."""
    uf = UnionFind(range(complex_.V))
    for u, v in complex_.edges:
        uf.union(u, v)
    chi = complex_.V - complex_.E + complex_.F
    b0 = len(list(uf.to_sets()))
    return HomologySummary(complex_.V, complex_.E, complex_.F, b0, chi, b0 - chi)


def tc_from_betti(b1: int) -> int:
    if b1 < 0:
        raise ValueError("first Betti number is non-negative")
    if b1 == 0:
        return 1
    if b1 == 1:
        return 2
    return 3


def oracle_path(complex_: DiscreteConfigComplex, start: tuple[int, int],
                goal: tuple[int, int]) -> list[tuple[int, int]] | None:
    """Fewest-move sequence of node pairs after ``start`` ending at ``goal``.

    Returns None when the goal is unreachable.
    """
    s, t = complex_.index(tuple(start)), complex_.index(tuple(goal))
    try:
        path = nx.shortest_path(complex_.one_skeleton, s, t)
    except nx.NetworkXNoPath:
        return None
    return [complex_.nodes[k] for k in path[1:]]
