"""Coordinate models and metric geometry of the three tracks.

Every track is built from at most two unit-length edges:

* the interval edge ``I`` with coordinate ``t`` in ``[0, 1]``; ``t = 0`` is the
  free end and, on the lollipop, ``t = 1`` is the junction;
* the circle edge ``C`` with coordinate ``t`` in ``[0, 1)``; ``t = 0`` is the
  junction, increasing ``t`` is counterclockwise and ``t = 1/2`` is the pole.

On the lollipop the junction has two spellings (``I:1`` and ``C:0``); the
canonical one is ``C:0``.
"""
from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateQuery, IllegalCoordinate, IllegalMove

HALF = 0.5


class Space(str, enum.Enum):
    INTERVAL = "interval"
    CIRCLE = "circle"
    LOLLIPOP = "lollipop"

    @property
    def length(self) -> float:
        return 2.0 if self is Space.LOLLIPOP else 1.0


class Edge(enum.IntEnum):
    I = 0
    C = 1


class Direction(enum.Enum):
    INTERVAL_UP = "interval-up"
    INTERVAL_DOWN = "interval-down"
    CIRCLE_CW = "circle-cw"
    CIRCLE_CCW = "circle-ccw"
    PARKED = "parked"
    # only ever returned by away_direction, never accepted by move_along
    AMBIGUOUS = "ambiguous"


@dataclass(frozen=True)
class PhysPoint:
    edge: Edge
    t: float

    def __str__(self) -> str:
        return f"{self.edge.name}:{self.t!r}"


JUNCTION = PhysPoint(Edge.C, 0.0)
POLE = PhysPoint(Edge.C, HALF)

_LEGAL_EDGES = {
    Space.INTERVAL: (Edge.I,),
    Space.CIRCLE: (Edge.C,),
    Space.LOLLIPOP: (Edge.I, Edge.C),
}

_POINT_RE = re.compile(r"^\s*([IC])\s*:\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*$")


def parse_point(text: str) -> PhysPoint:
    """Parse the ``"I:<t>"`` / ``"C:<t>"`` encoding (not canonicalized)."""
    m = _POINT_RE.match(text)
    if m is None:
        raise IllegalCoordinate(f"malformed point {text!r}; expected I:<t> or C:<t>")
    return PhysPoint(Edge[m.group(1)], float(m.group(2)))


def format_point(p: PhysPoint) -> str:
    return str(p)


def wrap(t: float) -> float:
    """Reduce a circle coordinate into ``[0, 1)``."""
    r = t % 1.0
    return 0.0 if r >= 1.0 else r + 0.0


def ccw_offset(frm: float, to: float) -> float:
    """Counterclockwise arc from circle coordinate ``frm`` to ``to``, in ``[0, 1)``.

    Unlike ``wrap(to - frm)`` this never rounds a tiny negative gap up to a
    full turn and then folds it to zero.
    """
    if to >= frm:
        return to - frm
    return 1.0 - (frm - to)


def canonicalize(space: Space, p: PhysPoint) -> PhysPoint:
    if p.edge not in _LEGAL_EDGES[space]:
        raise IllegalCoordinate(f"edge {p.edge.name} is not part of the {space.value} track")
    t = float(p.t)
    if not math.isfinite(t):
        raise IllegalCoordinate(f"non-finite coordinate {t}")
    if p.edge is Edge.I:
        if not 0.0 <= t <= 1.0:
            raise IllegalCoordinate(f"interval coordinate {t} outside [0, 1]")
        if space is Space.LOLLIPOP and t == 1.0:
            return JUNCTION
    elif not 0.0 <= t < 1.0:
        raise IllegalCoordinate(f"circle coordinate {t} outside [0, 1)")
    return PhysPoint(p.edge, t + 0.0)


def is_junction(space: Space, p: PhysPoint) -> bool:
    return space is Space.LOLLIPOP and p.edge is Edge.C and p.t == 0.0


def dist(space: Space, p: PhysPoint, q: PhysPoint) -> float:
    """Length of the shortest path between two canonical points."""
    if p.edge is q.edge:
        d = abs(p.t - q.t)
        if p.edge is Edge.C:
            d = min(d, 1.0 - d)
        return d
    if space is not Space.LOLLIPOP:
        raise IllegalCoordinate("mixed edges outside the lollipop")
    ti, tc = (p.t, q.t) if p.edge is Edge.I else (q.t, p.t)
    return (1.0 - ti) + min(tc, 1.0 - tc)


def dist_to_junction(p: PhysPoint) -> float:
    if p.edge is Edge.I:
        return 1.0 - p.t
    return min(p.t, 1.0 - p.t)


def dist_to_free_end(p: PhysPoint) -> float:
    """Lollipop only: distance to ``I:0``."""
    if p.edge is Edge.I:
        return p.t
    return 1.0 + min(p.t, 1.0 - p.t)


def is_generalized_antipodal(space: Space, p: PhysPoint, q: PhysPoint, tol: float = 1e-9) -> bool:
    return abs(dist(space, p, q) - HALF) <= tol


def away_direction(space: Space, subject: PhysPoint, other: PhysPoint) -> Direction:
    """Direction at ``subject`` along which the distance to ``other`` grows.

    Returns ``AMBIGUOUS`` at the lollipop junction (two growing directions)
    and ``PARKED`` when the growing direction leaves the track at a dead end.
    """
    d = dist(space, subject, other)
    if d <= 0.0 or d > HALF:
        raise DegenerateQuery(f"away direction undefined at separation {d}")
    if is_junction(space, subject):
        return Direction.AMBIGUOUS
    if subject.edge is Edge.I:
        if other.edge is Edge.I and other.t < subject.t:
            return Direction.PARKED if subject.t == 1.0 else Direction.INTERVAL_UP
        return Direction.PARKED if subject.t == 0.0 else Direction.INTERVAL_DOWN
    if other.edge is Edge.C:
        offset = ccw_offset(subject.t, other.t)
        if offset == HALF:
            raise DegenerateQuery("antipodal circle points have two geodesics")
        return Direction.CIRCLE_CW if offset < HALF else Direction.CIRCLE_CCW
    # other robot is on the interval: head away from the junction
    return Direction.CIRCLE_CCW if subject.t < HALF else Direction.CIRCLE_CW


def move_along(space: Space, p: PhysPoint, direction: Direction, arclen: float,
               clamp: bool = False) -> PhysPoint:
    if arclen < 0:
        raise IllegalMove("negative arc length")
    if direction is Direction.PARKED:
        return p
    if direction is Direction.AMBIGUOUS:
        raise IllegalMove("cannot move along an ambiguous direction")
    junction = is_junction(space, p)
    if direction in (Direction.CIRCLE_CW, Direction.CIRCLE_CCW):
        if p.edge is not Edge.C:
            raise IllegalMove(f"{p} is not on the circle")
        sign = 1.0 if direction is Direction.CIRCLE_CCW else -1.0
        return PhysPoint(Edge.C, wrap(p.t + sign * arclen))
    if p.edge is not Edge.I and not junction:
        raise IllegalMove(f"{p} is not on the interval")
    t = 1.0 if junction else p.t
    if direction is Direction.INTERVAL_UP:
        if junction:
            raise IllegalMove("cannot move up from the junction")
        t += arclen
        if t > 1.0:
            if not clamp:
                raise IllegalMove("moved past the top of the interval")
            t = 1.0
    else:
        t -= arclen
        if t < 0.0:
            if not clamp:
                raise IllegalMove("moved past the free end")
            t = 0.0
    return canonicalize(space, PhysPoint(Edge.I, t))


# -- vectorized helpers -------------------------------------------------------
# Arrays of points are stored as (edge codes, coordinates) with edge codes
# from ``Edge``; all inputs are assumed canonical.

def dist_arrays(e0: np.ndarray, t0: np.ndarray, e1: np.ndarray, t1: np.ndarray) -> np.ndarray:
    same = e0 == e1
    d = np.abs(t0 - t1)
    circ = same & (e0 == Edge.C)
    d = np.where(circ, np.minimum(d, 1.0 - d), d)
    ti = np.where(e0 == Edge.I, t0, t1)
    tc = np.where(e0 == Edge.I, t1, t0)
    mixed = (1.0 - ti) + np.minimum(tc, 1.0 - tc)
    return np.where(same, d, mixed)


def canonical_arrays(e: np.ndarray, t: np.ndarray, lollipop: bool) -> tuple[np.ndarray, np.ndarray]:
    """Fold ``I:1`` onto the junction and wrap circle coordinates."""
    e = np.asarray(e, dtype=np.int8).copy()
    t = np.asarray(t, dtype=float).copy()
    circ = e == Edge.C
    tc = np.mod(t[circ], 1.0)
    tc[tc >= 1.0] = 0.0
    t[circ] = tc
    if lollipop:
        top = (e == Edge.I) & (t >= 1.0)
        e[top] = Edge.C
        t[top] = 0.0
    return e, t


def geodesic_arrays(space: Space, e0, t0, e1, t1, lam) -> tuple[np.ndarray, np.ndarray]:
    """Points at fraction ``lam`` along the shortest path from point 0 to point 1.

    Assumes the shortest path is unique, which holds for consecutive samples
    of any plan (they are much closer than half a unit).
    """
    e0 = np.asarray(e0, dtype=np.int8)
    e1 = np.asarray(e1, dtype=np.int8)
    t0 = np.asarray(t0, dtype=float)
    t1 = np.asarray(t1, dtype=float)
    lam = np.asarray(lam, dtype=float)
    lolli = space is Space.LOLLIPOP

    out_e = e0.copy()
    # same edge
    delta = t1 - t0
    circ = e0 == Edge.C
    delta = np.where(circ, np.mod(delta + HALF, 1.0) - HALF, delta)
    out_t = t0 + lam * delta

    mixed = e0 != e1
    if np.any(mixed):
        # walk from the interval endpoint through the junction onto the circle
        from_i = e0 == Edge.I
        ti = np.where(from_i, t0, t1)
        tc = np.where(from_i, t1, t0)
        up = 1.0 - ti
        arc = np.minimum(tc, 1.0 - tc)
        sign = np.where(tc <= HALF, 1.0, -1.0)
        total = up + arc
        s = np.where(from_i, lam, 1.0 - lam) * total
        on_i = s < up
        me = np.where(on_i, Edge.I, Edge.C).astype(np.int8)
        mt = np.where(on_i, ti + s, sign * (s - up))
        out_e = np.where(mixed, me, out_e).astype(np.int8)
        out_t = np.where(mixed, mt, out_t)
    return canonical_arrays(out_e, out_t, lolli)
