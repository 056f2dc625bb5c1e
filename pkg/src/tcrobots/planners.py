"""Motion planners: one continuous instruction per continuity domain.

A plan is stored as dense sample arrays (times, per-robot edge codes and
coordinates) split into preliminary / main / final steps.  Plan time is the
cumulative maximum per-robot arc length, so every robot moves at speed at
most one.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import IllegalCoordinate, SwapImpossible, UnsupportedQuery
from .retraction import FlowParams, FlowPath, retract_circle, retract_lollipop, reverse
from .skeleton import (ConfigState, SkeletonPoint, SkeletonRoute, make_state, skeleton_build,
                       skeleton_route)
from .spaces import (HALF, Edge, PhysPoint, Space, canonicalize, ccw_offset, dist,
                     dist_arrays, wrap)


class Region(str, enum.Enum):
    CIRCLE_U = "CircleU"
    CIRCLE_V = "CircleV"
    V1 = "V1"
    V2 = "V2"
    V3 = "V3"
    WHOLE = "Whole"


class StepTag(str, enum.Enum):
    PRELIMINARY = "preliminary"
    MAIN = "main"
    FINAL = "final"


@dataclass(frozen=True)
class PlanQuery:
    space: Space
    robots: int
    start: tuple[PhysPoint, ...]
    goal: tuple[PhysPoint, ...]

    @property
    def start_state(self) -> ConfigState:
        return ConfigState(*self.start)

    @property
    def goal_state(self) -> ConfigState:
        return ConfigState(*self.goal)


def _as_points(x) -> tuple[PhysPoint, ...]:
    if isinstance(x, ConfigState):
        return (x.a, x.b)
    if isinstance(x, PhysPoint):
        return (x,)
    return tuple(x)


def make_query(space: Space | str, robots: int, start, goal) -> PlanQuery:
    space = Space(space)
    if robots not in (1, 2):
        raise UnsupportedQuery("only one or two robots are supported")
    if robots == 1 and space is Space.LOLLIPOP:
        raise UnsupportedQuery("single-robot lollipop planning is not provided")
    pts = []
    for x in (start, goal):
        ps = _as_points(x)
        if len(ps) != robots:
            raise IllegalCoordinate(f"expected {robots} point(s), got {len(ps)}")
        if robots == 2:
            s = make_state(space, *ps)
            ps = (s.a, s.b)
        else:
            ps = (canonicalize(space, ps[0]),)
        pts.append(ps)
    return PlanQuery(space, robots, pts[0], pts[1])


@dataclass(frozen=True)
class Step:
    tag: StepTag
    start: int  # first sample index
    stop: int  # last sample index (inclusive, shared with the next step)


@dataclass
class Plan:
    query: PlanQuery
    region: Region
    times: np.ndarray
    edges: np.ndarray  # (N, robots) edge codes
    coords: np.ndarray  # (N, robots)
    steps: list[Step]
    route: SkeletonRoute | None = None
    terminals: tuple | None = None
    params: FlowParams = field(default_factory=FlowParams)

    def __len__(self) -> int:
        return len(self.times)

    @property
    def robots(self) -> int:
        return self.edges.shape[1]

    def point(self, i: int, robot: int) -> PhysPoint:
        return PhysPoint(Edge(int(self.edges[i, robot])), float(self.coords[i, robot]))

    def sample(self, i: int) -> tuple[PhysPoint, ...]:
        return tuple(self.point(i, r) for r in range(self.robots))

    def step(self, tag: StepTag) -> Step | None:
        for s in self.steps:
            if s.tag is tag:
                return s
        return None

    def separations(self) -> np.ndarray:
        if self.robots < 2:
            return np.full(len(self), np.inf)
        e, x = self.edges, self.coords
        return dist_arrays(e[:, 0], x[:, 0], e[:, 1], x[:, 1])

    @property
    def duration(self) -> float:
        return float(self.times[-1])


# -- classification -----------------------------------------------------------

def _lollipop_region(ti: SkeletonPoint, tf: SkeletonPoint, tol: float) -> Region:
    g = skeleton_build()
    if g.on_extended_vertices(ti, tol) and g.on_extended_vertices(tf, tol):
        return Region.V1
    if not ti.is_vertex and not tf.is_vertex:
        shared = set(g.loops_of(ti)) & set(g.loops_of(tf))
        for loop in shared:
            gap = (g.loop_position(tf, loop) - g.loop_position(ti, loop)) % 2.0
            if abs(gap - 1.0) <= tol:
                return Region.V2
    return Region.V3


def classify(space: Space, start, goal, tol_antipodal: float | None = None,
             params: FlowParams = FlowParams()) -> Region:
    q = start if isinstance(start, PlanQuery) else make_query(space, len(_as_points(start)), start, goal)
    tol = params.tol_antipodal if tol_antipodal is None else tol_antipodal
    if q.space is Space.INTERVAL:
        return Region.WHOLE
    if q.space is Space.CIRCLE:
        i = q.robots - 1  # one robot: the robot itself; two robots: robot B
        d = dist(q.space, q.start[i], q.goal[i])
        return Region.CIRCLE_U if abs(d - HALF) <= tol else Region.CIRCLE_V
    fi = retract_lollipop(q.start_state, params)
    ff = retract_lollipop(q.goal_state, params)
    return _lollipop_region(fi.terminal, ff.terminal, tol)


# -- plan assembly -----------------------------------------------------------

class _Builder:
    def __init__(self, space: Space, robots: int):
        self.space = space
        self.robots = robots
        self.edges: list[np.ndarray] = []
        self.coords: list[np.ndarray] = []
        self.steps: list[tuple[StepTag, int, int]] = []
        self.n = 0

    def add(self, tag: StepTag, edges: np.ndarray, coords: np.ndarray) -> None:
        edges = np.asarray(edges, dtype=np.int8).reshape(-1, self.robots)
        coords = np.asarray(coords, dtype=float).reshape(-1, self.robots)
        start = 0
        if self.n:
            # steps share their boundary sample; keep the previous copy
            gap = dist_arrays(self.last[0], self.last[1], edges[0], coords[0])
            if np.any(gap > 1e-9):
                raise AssertionError(f"plan steps do not join (gap {gap.max()})")
            start = self.n - 1
            self.last = (self.last[0], self.last[1]) if len(edges) == 1 else (edges[-1], coords[-1])
            edges, coords = edges[1:], coords[1:]
        else:
            self.last = (edges[-1], coords[-1])
        self.edges.append(edges)
        self.coords.append(coords)
        self.n += len(edges)
        self.steps.append((tag, start, self.n - 1))

    def add_flow(self, tag: StepTag, flow: FlowPath) -> None:
        self.add(tag, flow.edges, flow.coords)

    def build(self, query: PlanQuery, region: Region, **extra) -> Plan:
        edges = np.concatenate(self.edges)
        coords = np.concatenate(self.coords)
        moves = [dist_arrays(edges[:-1, r], coords[:-1, r], edges[1:, r], coords[1:, r])
                 for r in range(self.robots)]
        dt = np.max(np.vstack(moves), axis=0) if len(edges) > 1 else np.zeros(0)
        times = np.concatenate([[0.0], np.cumsum(dt)])
        steps = [Step(tag, a, b) for tag, a, b in self.steps]
        return Plan(query, region, times, edges, coords, steps, **extra)


def _subdivide(length: float, max_step: float) -> np.ndarray:
    n = max(2, int(math.ceil(abs(length) / max_step)) + 1)
    return np.linspace(0.0, 1.0, n)


def _rotation(points: tuple[float, ...], delta: float, max_step: float) -> np.ndarray:
    lam = _subdivide(delta, max_step)
    cols = [np.mod(p + delta * lam, 1.0) for p in points]
    out = np.column_stack(cols)
    out[out >= 1.0] = 0.0
    return out


def _route_samples(route: SkeletonRoute, max_step: float):
    g = skeleton_build()
    if not route.legs:
        x = g.embed(route.start)
        return np.array([[x.a.edge, x.b.edge]]), np.array([[x.a.t, x.b.t]])
    es, xs = [], []
    for i, leg in enumerate(route.legs):
        lam = _subdivide(leg.s_to - leg.s_from, max_step)
        s = leg.s_from + (leg.s_to - leg.s_from) * lam
        s[-1] = leg.s_to
        ea, ta, eb, tb = g.edges[leg.edge].embed_array(s)
        sl = slice(1, None) if i else slice(None)
        es.append(np.column_stack([ea, eb])[sl])
        xs.append(np.column_stack([ta, tb])[sl])
    return np.concatenate(es), np.concatenate(xs)


def _plan_interval(q: PlanQuery, params: FlowParams) -> Plan:
    start = np.array([p.t for p in q.start])
    goal = np.array([p.t for p in q.goal])
    if q.robots == 2 and np.sign(start[1] - start[0]) != np.sign(goal[1] - goal[0]):
        raise SwapImpossible("robots cannot exchange their order on the interval")
    lam = _subdivide(np.max(np.abs(goal - start)), params.main_step)
    coords = start[None, :] + (goal - start)[None, :] * lam[:, None]
    coords[-1] = goal
    b = _Builder(q.space, q.robots)
    b.add(StepTag.MAIN, np.zeros_like(coords, dtype=np.int8), coords)
    return b.build(q, Region.WHOLE, params=params)


def _plan_circle_one(q: PlanQuery, params: FlowParams) -> Plan:
    s, g = q.start[0].t, q.goal[0].t
    region = classify(q.space, q, None, params=params)
    if region is Region.CIRCLE_U:
        delta = ccw_offset(s, g)
    else:
        delta = wrap(g - s + HALF) - HALF
    coords = _rotation((s,), delta, params.main_step)
    coords[-1, 0] = g
    b = _Builder(q.space, 1)
    b.add(StepTag.MAIN, np.ones_like(coords, dtype=np.int8), coords)
    return b.build(q, region, params=params)


def _plan_circle_two(q: PlanQuery, params: FlowParams) -> Plan:
    region = classify(q.space, q, None, params=params)
    fi = retract_circle(q.start_state, params)
    ff = retract_circle(q.goal_state, params)
    bi, bf = fi.terminal, ff.terminal
    if region is Region.CIRCLE_U:
        delta = ccw_offset(bi, bf)
    else:
        delta = wrap(bf - bi + HALF) - HALF
    main = _rotation((wrap(bi - HALF), bi), delta, params.main_step)
    main[-1] = [wrap(bf - HALF), bf]
    b = _Builder(q.space, 2)
    b.add_flow(StepTag.PRELIMINARY, fi)
    b.add(StepTag.MAIN, np.ones_like(main, dtype=np.int8), main)
    b.add_flow(StepTag.FINAL, reverse(ff))
    return b.build(q, region, terminals=(bi, bf), params=params)


def _plan_lollipop(q: PlanQuery, params: FlowParams) -> Plan:
    fi = retract_lollipop(q.start_state, params)
    ff = retract_lollipop(q.goal_state, params)
    region = _lollipop_region(fi.terminal, ff.terminal, params.tol_antipodal)
    route = skeleton_route(skeleton_build(), fi.terminal, ff.terminal, region, params.tol_antipodal)
    me, mx = _route_samples(route, params.main_step)
    b = _Builder(q.space, 2)
    b.add_flow(StepTag.PRELIMINARY, fi)
    b.add(StepTag.MAIN, me, mx)
    b.add_flow(StepTag.FINAL, reverse(ff))
    return b.build(q, region, route=route, terminals=(fi.terminal, ff.terminal), params=params)


def plan(query: PlanQuery, params: FlowParams = FlowParams()) -> Plan:
    if query.space is Space.INTERVAL:
        return _plan_interval(query, params)
    if query.space is Space.CIRCLE:
        if query.robots == 1:
            return _plan_circle_one(query, params)
        return _plan_circle_two(query, params)
    if query.robots != 2:
        raise UnsupportedQuery("single-robot lollipop planning is not provided")
    return _plan_lollipop(query, params)


_INSTRUCTIONS = {
    (Region.WHOLE, Space.INTERVAL, 1): "move in a straight line",
    (Region.WHOLE, Space.INTERVAL, 2): "move in a straight line",
    (Region.CIRCLE_U, Space.CIRCLE, 1): "move counterclockwise to the goal",
    (Region.CIRCLE_V, Space.CIRCLE, 1): "move along the shortest arc to the goal",
    (Region.CIRCLE_U, Space.CIRCLE, 2): "move both robots counterclockwise until B reaches its goal",
    (Region.CIRCLE_V, Space.CIRCLE, 2):
        "move both robots the same way along B's shortest arc until B reaches its goal",
    (Region.V1, Space.LOLLIPOP, 2):
        "robots in vertex position: follow shortest paths, going counterclockwise around the circle when they must change order",
    (Region.V2, Space.LOLLIPOP, 2):
        "move whichever robot is in the circle counterclockwise to its final destination; the other keeps half-unit distance",
    (Region.V3, Space.LOLLIPOP, 2):
        "move both robots along shortest paths, counterclockwise whenever in the circle",
}


def instruction_text(region: Region, space: Space, robots: int = 2) -> str:
    space = Space(space)
    if space is Space.INTERVAL:
        robots = robots if robots in (1, 2) else 2
    key = (Region(region), space, robots)
    if key not in _INSTRUCTIONS:
        raise KeyError(f"no instruction for {region} on {space.value} with {robots} robot(s)")
    return _INSTRUCTIONS[key]
