"""Independent checks of emitted plans and empirical continuity probes."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import IllegalCoordinate, SwapImpossible
from .planners import Plan, PlanQuery, Region, StepTag, classify, make_query, plan
from .retraction import FlowParams
from .skeleton import LOOPS, SkeletonPoint, skeleton_build
from .spaces import HALF, Edge, PhysPoint, Space, dist, dist_arrays, wrap
from .trajectory import resample_arrays

ENDPOINT_TOL = 1e-6
SEPARATION_TOL = 1e-6
SKELETON_TOL = 1e-6
SPEED_CAP = 4.0
SPEED_SLACK = 1e-12
# largest per-robot arc allowed between consecutive samples
MAX_SAMPLE_GAP = 0.05


@dataclass(frozen=True)
class Violation:
    kind: str
    t: float
    index: int
    detail: str

    def __str__(self) -> str:
        return f"{self.kind}(t={self.t:.6g}, sample={self.index}): {self.detail}"


def _violation(kind: str):
    def make(t: float, index: int, detail: str) -> Violation:
        return Violation(kind, t, index, detail)
    make.__name__ = kind
    return make


EndpointViolation = _violation("EndpointViolation")
CollisionViolation = _violation("CollisionViolation")
SkeletonViolation = _violation("SkeletonViolation")
SpeedViolation = _violation("SpeedViolation")
CoherenceViolation = _violation("CoherenceViolation")


@dataclass
class ValidationReport:
    violation: Violation | None = None

    @property
    def ok(self) -> bool:
        return self.violation is None

    def __bool__(self) -> bool:
        return self.ok

    def __str__(self) -> str:
        return "OK" if self.ok else str(self.violation)


def _legal(space: Space, e: np.ndarray, x: np.ndarray) -> np.ndarray:
    on_i = (e == Edge.I) & (x >= 0.0) & (x <= 1.0)
    if space is Space.LOLLIPOP:
        on_i &= x < 1.0  # the junction is spelled C:0
    on_c = (e == Edge.C) & (x >= 0.0) & (x < 1.0)
    if space is Space.INTERVAL:
        return on_i
    if space is Space.CIRCLE:
        return on_c
    return on_i | on_c


def validate_plan(p: Plan, query: PlanQuery | None = None,
                  params: FlowParams | None = None) -> ValidationReport:
    """Check a plan against its query; report the first violation found.

    Endpoint errors are reported first.  Samples are then scanned in time
    order and, per sample, checked for collision, main-step skeleton
    adherence, speed and coherence, in that order.
    """
    q = query or p.query
    space = q.space
    n = len(p.times)
    if n == 0:
        return ValidationReport(EndpointViolation(0.0, 0, "empty plan"))
    for i, pts, label in ((0, q.start, "start"), (n - 1, q.goal, "goal")):
        err = sum(dist(space, pp, p.point(i, r)) if p.point(i, r).edge in (Edge.I, Edge.C)
                  else math.inf for r, pp in enumerate(pts)) if p.robots == len(pts) else math.inf
        if not err <= ENDPOINT_TOL:
            return ValidationReport(EndpointViolation(float(p.times[i]), i,
                                                      f"{label} error {err:.3g}"))

    e, x, times = p.edges, p.coords, p.times
    R = p.robots
    legal = np.all(np.column_stack([_legal(space, e[:, r], x[:, r]) for r in range(R)]), axis=1)
    xs = np.where(legal[:, None], x, 0.0)
    es = np.where(legal[:, None], e, Edge.I if space is not Space.CIRCLE else Edge.C).astype(np.int8)

    bad = np.zeros((n, 4), dtype=bool)  # collision, skeleton, speed, coherence
    if R == 2:
        sep = dist_arrays(es[:, 0], xs[:, 0], es[:, 1], xs[:, 1])
        sep0 = dist(space, q.start[0], q.start[1])
        sep1 = dist(space, q.goal[0], q.goal[1])
        floor = min(sep0, sep1, HALF) - SEPARATION_TOL
        bad[:, 0] = (sep < floor) | (sep <= 0.0)
        main = p.step(StepTag.MAIN)
        if main is not None and space is not Space.INTERVAL:
            sl = slice(main.start, main.stop + 1)
            bad[sl, 1] = np.abs(sep[sl] - HALF) > SKELETON_TOL
    else:
        sep = np.full(n, np.inf)

    if n > 1:
        moves = np.column_stack([dist_arrays(es[:-1, r], xs[:-1, r], es[1:, r], xs[1:, r])
                                 for r in range(R)])
        dt = np.diff(times)
        step = moves.max(axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            speed = np.where(dt > 0, step / np.where(dt > 0, dt, 1.0), np.inf)
        # sub-ulp moves can vanish from the accumulated clock
        bad[1:, 2] = step > SPEED_CAP * np.maximum(dt, 0.0) + SPEED_SLACK
        bad[1:, 3] = (dt < 0) | (moves.max(axis=1) > MAX_SAMPLE_GAP)
    bad[:, 3] |= ~legal | ~np.isfinite(times)

    hits = np.flatnonzero(bad.any(axis=1))
    if hits.size == 0:
        return ValidationReport()
    i = int(hits[0])
    t = float(times[i])
    if bad[i, 0]:
        return ValidationReport(CollisionViolation(t, i, f"separation {sep[i]:.6g}"))
    if bad[i, 1]:
        return ValidationReport(SkeletonViolation(t, i, f"main-step separation {sep[i]:.9g}"))
    if bad[i, 2]:
        return ValidationReport(SpeedViolation(t, i, f"speed {speed[i - 1]:.6g} above {SPEED_CAP}"))
    return ValidationReport(CoherenceViolation(t, i, "illegal coordinate, time reversal or jump"))


# -- random queries -----------------------------------------------------------

def random_point(space: Space, rng: np.random.Generator) -> PhysPoint:
    space = Space(space)
    if space is Space.INTERVAL:
        return PhysPoint(Edge.I, float(rng.random()))
    if space is Space.CIRCLE:
        return PhysPoint(Edge.C, float(rng.random()))
    return PhysPoint(Edge.I if rng.random() < 0.5 else Edge.C, float(rng.random()))


def random_skeleton_point(rng: np.random.Generator, edges=None) -> SkeletonPoint:
    g = skeleton_build()
    names = list(edges or g.edges)
    e = g.edges[names[int(rng.integers(len(names)))]]
    return g.normalize(SkeletonPoint(e.id, float(e.s0 + (e.s1 - e.s0) * rng.random())))


def _state_points(space: Space, rng: np.random.Generator, robots: int) -> tuple[PhysPoint, ...]:
    while True:
        pts = tuple(random_point(space, rng) for _ in range(robots))
        if robots == 1 or dist(space, *pts) > 0.0:
            return pts


def random_query(space: Space, rng: np.random.Generator, robots: int = 2) -> PlanQuery:
    """A random valid query; the mixture reaches every continuity domain.

    Interval two-robot queries always keep the robots' order so that they are
    solvable.
    """
    space = Space(space)
    g = skeleton_build()
    while True:
        start = _state_points(space, rng, robots)
        goal = _state_points(space, rng, robots)
        u = rng.random()
        if space is Space.INTERVAL and robots == 2:
            if (start[1].t - start[0].t) * (goal[1].t - goal[0].t) < 0:
                goal = goal[::-1]
        elif space is Space.CIRCLE and u < 0.25:
            # goal of the reference robot antipodal to its start
            i = robots - 1
            g_ref = PhysPoint(Edge.C, wrap(start[i].t + HALF))
            goal = goal[:i] + (g_ref,) if robots == 2 else (g_ref,)
            if robots == 2 and goal[0] == goal[1]:
                continue
        elif space is Space.LOLLIPOP and u < 0.15:
            # swapped states inside one loop
            loop = int(rng.integers(1, 4))
            _, first, second = LOOPS[loop]
            p0 = random_skeleton_point(rng, (first, second))
            if p0.is_vertex:
                continue
            p1 = g.loop_point(loop, g.loop_position(p0, loop) + 1.0)
            x0, x1 = g.embed(p0), g.embed(p1)
            start, goal = (x0.a, x0.b), (x1.a, x1.b)
        elif space is Space.LOLLIPOP and u < 0.25:
            # both ends on the whiskers or at vertices
            pool = ("I1", "I2")
            x0 = g.embed(random_skeleton_point(rng, pool))
            x1 = g.embed(random_skeleton_point(rng, pool))
            start, goal = (x0.a, x0.b), (x1.a, x1.b)
        elif space is Space.LOLLIPOP and u < 0.35:
            goal = start[::-1]
        try:
            return make_query(space, robots, start, goal)
        except IllegalCoordinate:
            continue


def query_distance(p: PlanQuery, q: PlanQuery) -> float:
    return (sum(dist(p.space, a, b) for a, b in zip(p.start, q.start))
            + sum(dist(p.space, a, b) for a, b in zip(p.goal, q.goal)))


def plan_distance(p: Plan, q: Plan, samples: int = 256) -> float:
    """Sup over normalized time of the L1 distance between two plans."""
    _, e0, x0 = resample_arrays(p, samples)
    _, e1, x1 = resample_arrays(q, samples)
    total = np.zeros(samples)
    for r in range(p.robots):
        total += dist_arrays(e0[:, r], x0[:, r], e1[:, r], x1[:, r])
    return float(total.max())


def _nudge(space: Space, p: PhysPoint, amount: float) -> PhysPoint:
    """Move ``p`` by ``|amount|`` of arc within its edge, reflecting at the interval ends."""
    if p.edge is Edge.C:
        return PhysPoint(Edge.C, wrap(p.t + amount))
    t = p.t + amount
    if t < 0.0 or t > 1.0 or (space is Space.LOLLIPOP and t >= 1.0):
        t = p.t - amount
    return PhysPoint(Edge.I, t)


def perturb_query(q: PlanQuery, delta: float, rng: np.random.Generator) -> PlanQuery | None:
    """A nearby query at L1 distance ``delta``; None if the nudge is invalid."""
    pts = list(q.start) + list(q.goal)
    w = rng.random(len(pts))
    w = delta * w / w.sum()
    sign = np.where(rng.random(len(pts)) < 0.5, -1.0, 1.0)
    moved = [_nudge(q.space, p, float(s * a)) for p, s, a in zip(pts, sign, w)]
    k = q.robots
    try:
        out = make_query(q.space, k, moved[:k], moved[k:])
    except IllegalCoordinate:
        return None
    if abs(query_distance(q, out) - delta) > 1e-9 + 1e-6 * delta:
        return None
    return out


@dataclass(frozen=True)
class Witness:
    query_a: PlanQuery
    query_b: PlanQuery
    region_a: Region
    region_b: Region
    query_gap: float
    jump: float


@dataclass
class ProbeResult:
    max_jump: float = 0.0
    mean_jump: float = 0.0
    pairs: int = 0
    per_region: dict = field(default_factory=dict)
    witnesses: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "max_jump": self.max_jump,
            "mean_jump": self.mean_jump,
            "pairs": self.pairs,
            "per_region": {k.value: v for k, v in self.per_region.items()},
            "witnesses": [{"regions": [w.region_a.value, w.region_b.value],
                           "query_gap": w.query_gap, "jump": w.jump} for w in self.witnesses],
        }


def _route_key(p: Plan):
    return p.route.edge_sequence if p.route is not None else None


PairSampler = Callable[[np.random.Generator, float], "tuple[PlanQuery, PlanQuery] | None"]


def _perturbed_pairs(space: Space, robots: int) -> PairSampler:
    def sample(rng, delta):
        q0 = random_query(space, rng, robots)
        q1 = q0 if delta == 0 else perturb_query(q0, delta, rng)
        return None if q1 is None else (q0, q1)
    return sample


def _circle_u_pairs(robots: int) -> PairSampler:
    # the reference robot's start and goal move together, staying antipodal
    def sample(rng, delta):
        i = robots - 1
        start = _state_points(Space.CIRCLE, rng, robots)
        goal = _state_points(Space.CIRCLE, rng, robots)
        goal = goal[:i] + (PhysPoint(Edge.C, wrap(start[i].t + HALF)),)
        shift = delta / (2 * robots) * (1 if rng.random() < 0.5 else -1)
        moved = [PhysPoint(Edge.C, wrap(p.t + shift)) for p in start + goal]
        try:
            return (make_query(Space.CIRCLE, robots, start, goal),
                    make_query(Space.CIRCLE, robots, moved[:robots], moved[robots:]))
        except IllegalCoordinate:
            return None
    return sample


def _v2_pairs() -> PairSampler:
    # swapped skeleton states on one loop, both slid along the loop
    g = skeleton_build()

    def sample(rng, delta):
        loop = int(rng.integers(1, 4))
        _, first, second = LOOPS[loop]
        p0 = random_skeleton_point(rng, (first, second))
        if p0.is_vertex:
            return None
        th = g.loop_position(p0, loop) + (delta / 2) * (1 if rng.random() < 0.5 else -1)
        pts = [g.loop_point(loop, x) for x in (g.loop_position(p0, loop), th)]
        pts += [g.loop_point(loop, x + 1.0) for x in (g.loop_position(p0, loop), th)]
        if any(p.is_vertex for p in pts):
            return None
        x = [g.embed(p) for p in pts]
        return (make_query(Space.LOLLIPOP, 2, x[0], x[2]), make_query(Space.LOLLIPOP, 2, x[1], x[3]))
    return sample


def region_sampler(space: Space, region: Region, robots: int = 2) -> PairSampler:
    """Pairs of nearby queries that both belong to ``region``."""
    space, region = Space(space), Region(region)
    if region is Region.CIRCLE_U:
        return _circle_u_pairs(robots)
    if region is Region.V2:
        return _v2_pairs()
    base = _perturbed_pairs(space, robots)

    def sample(rng, delta):
        pair = base(rng, delta)
        if pair is None or classify(space, pair[0], None) is not region:
            return None
        return pair
    return sample


def continuity_probe(space: Space, sampler: PairSampler | None = None, delta: float = 1e-3,
                     trials: int = 200, seed: int = 42, robots: int = 2,
                     params: FlowParams = FlowParams(), boundary: bool = True) -> ProbeResult:
    """Plan jumps between nearby queries.

    ``sampler(rng, delta)`` returns a pair of queries ``delta`` apart (or
    None to skip).  Same-region pairs contribute to ``max_jump`` and
    ``mean_jump``; on the lollipop only pairs whose main routes use the same
    edge sequence are compared.  With ``boundary`` set, pairs straddling a
    domain boundary are searched and recorded as witnesses.
    """
    space = Space(space)
    if delta < 0:
        raise ValueError("delta must be non-negative")
    rng = np.random.default_rng(seed)
    sampler = sampler or _perturbed_pairs(space, robots)
    jumps, per_region = [], {}
    attempts = 0
    while len(jumps) < trials and attempts < 50 * trials:
        attempts += 1
        pair = sampler(rng, delta)
        if pair is None:
            continue
        q0, q1 = pair
        try:
            p0, p1 = plan(q0, params), plan(q1, params)
        except SwapImpossible:
            continue
        if p0.region is not p1.region or _route_key(p0) != _route_key(p1):
            continue
        j = plan_distance(p0, p1)
        jumps.append(j)
        per_region[p0.region] = max(per_region.get(p0.region, 0.0), j)
    res = ProbeResult(max(jumps, default=0.0), float(np.mean(jumps)) if jumps else 0.0,
                      len(jumps), per_region)
    if boundary:
        res.witnesses = boundary_witnesses(space, rng, max(delta, 1e-4), robots, params)
    return res


def boundary_witnesses(space: Space, rng: np.random.Generator, delta: float = 1e-3,
                       robots: int = 2, params: FlowParams = FlowParams(),
                       count: int = 3) -> list[Witness]:
    """Query pairs at distance ``delta`` with different regions and their plan jump."""
    space = Space(space)
    out = []
    if space is Space.INTERVAL:
        return out
    g = skeleton_build()
    for _ in range(50 * count):
        if len(out) >= count:
            break
        if space is Space.CIRCLE:
            s = _state_points(space, rng, robots)
            i = robots - 1
            anti = wrap(s[i].t + HALF)
            g0 = _state_points(space, rng, robots)
            ga = g0[:i] + (PhysPoint(Edge.C, anti),)
            gb = g0[:i] + (PhysPoint(Edge.C, wrap(anti + delta)),)
            try:
                qa, qb = make_query(space, robots, s, ga), make_query(space, robots, s, gb)
            except IllegalCoordinate:
                continue
        else:
            # swapped states on one loop against a goal nudged clockwise-nearer
            loop = int(rng.integers(1, 4))
            _, first, second = LOOPS[loop]
            p0 = random_skeleton_point(rng, (first, second))
            if p0.is_vertex:
                continue
            th = g.loop_position(p0, loop)
            x0 = g.embed(p0)
            xa = g.embed(g.loop_point(loop, th + 1.0))
            pb = g.loop_point(loop, th + 1.0 + delta)
            if pb.is_vertex:
                continue
            xb = g.embed(pb)
            qa = make_query(space, 2, x0, xa)
            qb = make_query(space, 2, x0, xb)
        pa, pb_ = plan(qa, params), plan(qb, params)
        if pa.region is pb_.region:
            continue
        out.append(Witness(qa, qb, pa.region, pb_.region, query_distance(qa, qb),
                           plan_distance(pa, pb_)))
    return out
