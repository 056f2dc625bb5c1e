"""Two-robot configuration states and the lollipop skeleton.

The skeleton is the set of lollipop configurations whose robots are exactly
half a unit apart.  It is a chain ``e1 -I1- v1 =S1= v2 =S2= v3 =S3= v4 -I2- e2``
where each ``S_j`` is a loop made of two parallel edges.  Every edge is
parameterized by ``s`` so that both robots move at unit rate in ``s``;
the L1 length of an edge piece is therefore ``2 * |ds|`` and every full edge
has length 1.

Counterclockwise on each loop means the circle-resident robot moves
counterclockwise on the track (on ``S2`` both robots do).
"""
from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from networkx.utils import UnionFind

from .errors import IllegalCoordinate, NotOnSkeleton, RegionMismatch
from .spaces import (HALF, JUNCTION, POLE, Edge, PhysPoint, Space, canonicalize,
                     canonical_arrays, dist, wrap)


@dataclass(frozen=True)
class ConfigState:
    a: PhysPoint
    b: PhysPoint

    def __str__(self) -> str:
        return f"{self.a},{self.b}"

    def swapped(self) -> ConfigState:
        return ConfigState(self.b, self.a)


def make_state(space: Space, a: PhysPoint, b: PhysPoint) -> ConfigState:
    a = canonicalize(space, a)
    b = canonicalize(space, b)
    if a == b:
        raise IllegalCoordinate(f"robots collide at {a}")
    return ConfigState(a, b)


def separation(space: Space, state: ConfigState) -> float:
    return dist(space, state.a, state.b)


def state_distance(space: Space, x: ConfigState, y: ConfigState) -> float:
    """L1 distance in configuration space: sum of both robots' track distances."""
    return dist(space, x.a, y.a) + dist(space, x.b, y.b)


@dataclass(frozen=True)
class FlatCoord:
    block: str
    u: float
    v: float


def to_flat(space: Space, state: ConfigState) -> FlatCoord:
    """Block of the flat picture plus the two robot coordinates.

    The lollipop junction is drawn on the circle axis (``C:0``).
    """
    return FlatCoord(state.a.edge.name + state.b.edge.name, state.a.t, state.b.t)


def from_flat(space: Space, flat: FlatCoord) -> ConfigState:
    return make_state(space, PhysPoint(Edge[flat.block[0]], flat.u), PhysPoint(Edge[flat.block[1]], flat.v))


# -- the skeleton graph --------------------------------------------------------

# edge parameters this close to an endpoint are read as the vertex itself
VERTEX_SNAP = 1e-9

VERTICES = ("e1", "v1", "v2", "v3", "v4", "e2")

VERTEX_STATES = {
    "e1": ConfigState(PhysPoint(Edge.I, 0.0), PhysPoint(Edge.I, HALF)),
    "v1": ConfigState(PhysPoint(Edge.I, HALF), JUNCTION),
    "v2": ConfigState(JUNCTION, POLE),
    "v3": ConfigState(POLE, JUNCTION),
    "v4": ConfigState(JUNCTION, PhysPoint(Edge.I, HALF)),
    "e2": ConfigState(PhysPoint(Edge.I, HALF), PhysPoint(Edge.I, 0.0)),
}


@dataclass(frozen=True)
class RobotMap:
    """Robot position along a skeleton edge: coordinate ``slope * s + offset``."""

    edge: Edge
    slope: float
    offset: float

    def at(self, s: float) -> PhysPoint:
        t = self.slope * s + self.offset
        if self.edge is Edge.I:
            if t >= 1.0:
                return JUNCTION
            return PhysPoint(Edge.I, t + 0.0)
        return PhysPoint(Edge.C, wrap(t))

    def at_array(self, s: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        t = self.slope * s + self.offset
        e = np.full(t.shape, int(self.edge), dtype=np.int8)
        return canonical_arrays(e, t, lollipop=True)

    def parameter(self, p: PhysPoint, lo: float, hi: float) -> float | None:
        """Edge parameter putting this robot at ``p``, or None if impossible."""
        if self.edge is Edge.I:
            if p.edge is Edge.I:
                t = p.t
            elif p == JUNCTION:
                t = 1.0
            else:
                return None
            return (t - self.offset) / self.slope
        if p.edge is not Edge.C:
            return None
        mid = 0.5 * (lo + hi)
        best = None
        for k in (-1.0, 0.0, 1.0):
            s = (p.t + k - self.offset) / self.slope
            if best is None or abs(s - mid) < abs(best - mid):
                best = s
        return best


@dataclass(frozen=True)
class SkeletonEdge:
    id: str
    tail: str
    head: str
    s0: float
    s1: float
    a: RobotMap
    b: RobotMap
    loop: int = 0
    ccw: int = 0  # sign of ds that is counterclockwise on the loop; 0 on whiskers

    @property
    def length(self) -> float:
        return 2.0 * (self.s1 - self.s0)

    def embed(self, s: float) -> ConfigState:
        return ConfigState(self.a.at(s), self.b.at(s))

    def embed_array(self, s: np.ndarray):
        ea, ta = self.a.at_array(s)
        eb, tb = self.b.at_array(s)
        return ea, ta, eb, tb

    def vertex_at(self, s: float) -> str | None:
        if s == self.s0:
            return self.tail
        if s == self.s1:
            return self.head
        return None

    def s_of(self, vertex: str) -> float:
        if vertex == self.tail:
            return self.s0
        if vertex == self.head:
            return self.s1
        raise KeyError(vertex)


_I, _C = Edge.I, Edge.C

EDGES = (
    SkeletonEdge("I1", "e1", "v1", 0.0, 0.5, RobotMap(_I, 1, 0), RobotMap(_I, 1, 0.5)),
    SkeletonEdge("S1a", "v1", "v2", 0.5, 1.0, RobotMap(_I, 1, 0), RobotMap(_C, 1, -0.5), 1, +1),
    SkeletonEdge("S1b", "v1", "v2", 0.5, 1.0, RobotMap(_I, 1, 0), RobotMap(_C, -1, 1.5), 1, -1),
    SkeletonEdge("S2a", "v2", "v3", 0.0, 0.5, RobotMap(_C, 1, 0), RobotMap(_C, 1, 0.5), 2, +1),
    SkeletonEdge("S2b", "v3", "v2", 0.5, 1.0, RobotMap(_C, 1, 0), RobotMap(_C, 1, 0.5), 2, +1),
    SkeletonEdge("S3a", "v4", "v3", 0.5, 1.0, RobotMap(_C, 1, -0.5), RobotMap(_I, 1, 0), 3, +1),
    SkeletonEdge("S3b", "v4", "v3", 0.5, 1.0, RobotMap(_C, -1, 1.5), RobotMap(_I, 1, 0), 3, -1),
    SkeletonEdge("I2", "e2", "v4", 0.0, 0.5, RobotMap(_I, 1, 0.5), RobotMap(_I, 1, 0)),
)

# loop j: (vertex where the ccw parameter starts, first edge, second edge)
LOOPS = {1: ("v1", "S1a", "S1b"), 2: ("v2", "S2a", "S2b"), 3: ("v4", "S3a", "S3b")}


@dataclass(frozen=True)
class SkeletonPoint:
    """A point of the skeleton; vertices are spelled ``SkeletonPoint(vid, 0.0)``."""

    edge: str
    s: float = 0.0

    @property
    def is_vertex(self) -> bool:
        return self.edge in VERTEX_STATES


@dataclass(frozen=True)
class Leg:
    edge: str
    s_from: float
    s_to: float

    @property
    def length(self) -> float:
        return 2.0 * abs(self.s_to - self.s_from)


@dataclass
class SkeletonRoute:
    legs: list[Leg] = field(default_factory=list)
    start: SkeletonPoint | None = None

    @property
    def length(self) -> float:
        return sum(leg.length for leg in self.legs)

    @property
    def edge_sequence(self) -> tuple[str, ...]:
        return tuple(leg.edge for leg in self.legs)

    def waypoints(self) -> list[SkeletonPoint]:
        if not self.legs:
            return [self.start] if self.start is not None else []
        pts = [SkeletonPoint(self.legs[0].edge, self.legs[0].s_from)]
        pts.extend(SkeletonPoint(leg.edge, leg.s_to) for leg in self.legs)
        return pts


class SkeletonGraph:
    """The lollipop skeleton as an immutable weighted multigraph."""

    def __init__(self, edges=EDGES):
        self.edges = {e.id: e for e in edges}
        self.vertices = dict(VERTEX_STATES)
        self._incident = {v: [] for v in self.vertices}
        for e in edges:
            self._incident[e.tail].append(e)
            self._incident[e.head].append(e)

    # -- structure
    def incident(self, vertex: str) -> list[SkeletonEdge]:
        return list(self._incident[vertex])

    def components(self) -> int:
        uf = UnionFind(self.vertices)
        for e in self.edges.values():
            uf.union(e.tail, e.head)
        return len(list(uf.to_sets()))

    def betti1(self) -> int:
        return len(self.edges) - len(self.vertices) + self.components()

    # -- points
    def normalize(self, p: SkeletonPoint) -> SkeletonPoint:
        if p.is_vertex:
            return SkeletonPoint(p.edge, 0.0)
        e = self.edges[p.edge]
        if not e.s0 <= p.s <= e.s1:
            raise NotOnSkeleton(f"parameter {p.s} outside {e.id}")
        v = e.vertex_at(p.s)
        return SkeletonPoint(v, 0.0) if v else p

    def embed(self, p: SkeletonPoint) -> ConfigState:
        if p.is_vertex:
            return self.vertices[p.edge]
        return self.edges[p.edge].embed(p.s)

    def locate(self, state: ConfigState, tol: float = 1e-9) -> SkeletonPoint:
        sep = dist(Space.LOLLIPOP, state.a, state.b)
        if abs(sep - HALF) > tol:
            raise NotOnSkeleton(f"separation {sep} is not half a unit")
        best, best_d = None, math.inf
        for e in self.edges.values():
            cands = [c for c in (e.a.parameter(state.a, e.s0, e.s1), e.b.parameter(state.b, e.s0, e.s1))
                     if c is not None]
            if not cands:
                continue
            s = min(max(sum(cands) / len(cands), e.s0), e.s1)
            x = e.embed(s)
            d = dist(Space.LOLLIPOP, x.a, state.a) + dist(Space.LOLLIPOP, x.b, state.b)
            if d < best_d:
                best, best_d = SkeletonPoint(e.id, s), d
        if best is None or best_d > max(tol, 1e-12) * 4:
            raise NotOnSkeleton(f"no skeleton point within {tol} of {state}")
        e = self.edges[best.edge]
        for end in (e.s0, e.s1):
            if abs(best.s - end) <= VERTEX_SNAP:
                return SkeletonPoint(e.vertex_at(end), 0.0)
        return best

    def nearest_vertex(self, p: SkeletonPoint) -> tuple[str, float]:
        """Closest endpoint of the point's edge and the L1 distance to it."""
        if p.is_vertex:
            return p.edge, 0.0
        e = self.edges[p.edge]
        d0, d1 = 2.0 * (p.s - e.s0), 2.0 * (e.s1 - p.s)
        return (e.tail, d0) if d0 <= d1 else (e.head, d1)

    # -- loops
    def loops_of(self, p: SkeletonPoint) -> tuple[int, ...]:
        if p.is_vertex:
            return tuple(j for j, (_, ea, _) in LOOPS.items()
                         if p.edge in (self.edges[ea].tail, self.edges[ea].head))
        loop = self.edges[p.edge].loop
        return (loop,) if loop else ()

    def loop_position(self, p: SkeletonPoint, loop: int) -> float:
        """Counterclockwise L1 position in ``[0, 2)`` on loop ``S_loop``."""
        start, first, second = LOOPS[loop]
        if p.is_vertex:
            if p.edge == start:
                return 0.0
            e = self.edges[first]
            if p.edge in (e.tail, e.head):
                return 1.0
            raise NotOnSkeleton(f"{p.edge} is not on S{loop}")
        e = self.edges[p.edge]
        if e.loop != loop:
            raise NotOnSkeleton(f"{p.edge} is not on S{loop}")
        s_begin = e.s0 if e.ccw > 0 else e.s1
        local = 2.0 * e.ccw * (p.s - s_begin)
        theta = local if p.edge == first else 1.0 + local
        return 0.0 if theta >= 2.0 else theta

    def loop_point(self, loop: int, theta: float) -> SkeletonPoint:
        theta = theta % 2.0
        start, first, second = LOOPS[loop]
        name, local = (first, theta) if theta < 1.0 else (second, theta - 1.0)
        e = self.edges[name]
        s_begin = e.s0 if e.ccw > 0 else e.s1
        s = s_begin + e.ccw * local / 2.0
        return self.normalize(SkeletonPoint(name, min(max(s, e.s0), e.s1)))

    def on_extended_vertices(self, p: SkeletonPoint, tol: float) -> bool:
        """Membership in the vertices plus both whiskers, up to ``tol`` (L1)."""
        if p.is_vertex or p.edge in ("I1", "I2"):
            return True
        return self.nearest_vertex(p)[1] <= tol

    # -- routing
    def shortest_route(self, start: SkeletonPoint, goal: SkeletonPoint) -> SkeletonRoute:
        """L1-shortest route; exact ties go counterclockwise on every loop."""
        start, goal = self.normalize(start), self.normalize(goal)
        if start == goal:
            return SkeletonRoute([], start)

        adj: dict[str, list[tuple[str, Leg, int]]] = {v: [] for v in self.vertices}
        adj["@src"], adj["@dst"] = [], []

        def add(u, v, edge, su, sv):
            e = self.edges[edge]
            cw_fwd = int(e.ccw != 0 and (sv - su) * e.ccw < 0)
            cw_bwd = int(e.ccw != 0 and (su - sv) * e.ccw < 0)
            adj[u].append((v, Leg(edge, su, sv), cw_fwd))
            adj[v].append((u, Leg(edge, sv, su), cw_bwd))

        src = start.edge if start.is_vertex else "@src"
        dst = goal.edge if goal.is_vertex else "@dst"
        cut = {}
        for name, p in (("@src", start), ("@dst", goal)):
            if not p.is_vertex:
                cut.setdefault(p.edge, []).append((p.s, name))
        for e in self.edges.values():
            points = [(e.s0, e.tail)] + sorted(cut.get(e.id, [])) + [(e.s1, e.head)]
            for (sa, na), (sb, nb) in zip(points, points[1:]):
                add(na, nb, e.id, sa, sb)

        counter = itertools.count()
        best = {src: (0.0, 0)}
        prev: dict[str, tuple[str, Leg]] = {}
        heap = [(0.0, 0, next(counter), src)]
        done = set()
        while heap:
            length, cw, _, u = heapq.heappop(heap)
            if u in done:
                continue
            done.add(u)
            if u == dst:
                break
            for v, leg, cw_step in adj[u]:
                cand = (length + leg.length, cw + cw_step)
                if v not in best or cand < best[v]:
                    best[v] = cand
                    prev[v] = (u, leg)
                    heapq.heappush(heap, (cand[0], cand[1], next(counter), v))
        legs = []
        node = dst
        while node != src:
            node, leg = prev[node]
            legs.append(leg)
        legs.reverse()
        return SkeletonRoute(legs, start)

    def ccw_route(self, start: SkeletonPoint, goal: SkeletonPoint, loop: int) -> SkeletonRoute:
        """Counterclockwise arc on one loop from ``start`` to ``goal``."""
        start, goal = self.normalize(start), self.normalize(goal)
        th0 = self.loop_position(start, loop)
        th1 = self.loop_position(goal, loop)
        span = (th1 - th0) % 2.0
        legs = []
        theta, remaining = th0, span
        _, first, second = LOOPS[loop]
        while remaining > 0.0:
            name = first if theta < 1.0 else second
            base = 0.0 if theta < 1.0 else 1.0
            step = min(remaining, base + 1.0 - theta)
            e = self.edges[name]
            s_begin = e.s0 if e.ccw > 0 else e.s1
            s_from = s_begin + e.ccw * (theta - base) / 2.0
            s_to = s_begin + e.ccw * (theta + step - base) / 2.0
            legs.append(Leg(name, s_from, s_to))
            remaining -= step
            theta += step
            if theta >= 2.0:
                theta -= 2.0
        return SkeletonRoute(legs, start)


_GRAPH = None


def skeleton_build() -> SkeletonGraph:
    global _GRAPH
    if _GRAPH is None:
        _GRAPH = SkeletonGraph()
    return _GRAPH


def skeleton_locate(state: ConfigState, tol: float = 1e-9) -> SkeletonPoint:
    return skeleton_build().locate(state, tol)


def skeleton_route(g: SkeletonGraph, start: SkeletonPoint, goal: SkeletonPoint, region,
                   tol: float = 1e-6) -> SkeletonRoute:
    """Main-step route on the skeleton for a lollipop continuity domain.

    ``V1``: both ends are snapped to their nearest vertex when they sit within
    ``tol`` of one (keeps the route continuous inside the domain's
    neighbourhood), then shortest path with counterclockwise ties.
    ``V2``: counterclockwise arc on the shared loop.
    ``V3``: shortest path with counterclockwise ties.
    """
    from .planners import Region  # local import: planners depends on this module

    start, goal = g.normalize(start), g.normalize(goal)
    if region is Region.V2:
        shared = set(g.loops_of(start)) & set(g.loops_of(goal))
        if not shared:
            raise RegionMismatch("V2 route needs both points on one loop")
        loop = min(shared)
        return g.ccw_route(start, goal, loop)
    if region is not Region.V1:
        return g.shortest_route(start, goal)

    head, tail = [], []
    src, dst = start, goal
    if not start.is_vertex and start.edge not in ("I1", "I2"):
        v, d = g.nearest_vertex(start)
        if d <= tol:
            e = g.edges[start.edge]
            head = [Leg(e.id, start.s, e.s_of(v))]
            src = SkeletonPoint(v)
    if not goal.is_vertex and goal.edge not in ("I1", "I2"):
        v, d = g.nearest_vertex(goal)
        if d <= tol:
            e = g.edges[goal.edge]
            tail = [Leg(e.id, e.s_of(v), goal.s)]
            dst = SkeletonPoint(v)
    mid = g.shortest_route(src, dst)
    legs = [leg for leg in head + mid.legs + tail if leg.s_from != leg.s_to]
    return SkeletonRoute(legs, start)
