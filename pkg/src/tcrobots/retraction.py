"""Deformation flows onto the antipodal circle and onto the lollipop skeleton.

Lollipop flow, separation below half a unit: each robot heads away from the
other with speed ``min(1, kappa * d)`` where ``d`` is its distance to the
junction.  A robot at the junction therefore never moves, and a robot heading
toward the junction only approaches it asymptotically, so no robot ever
changes edge during the flow.  With the speed depending on the robot's own
position only, each robot's trajectory has a closed form: writing
``F(d) = log(kappa d) / kappa`` for ``d <= 1/kappa`` and ``d - 1/kappa``
above, a robot moving away from the junction sits at ``F^-1(F(d0) + tau)``.
The flow is sampled on a fixed grid of step ``h`` (unit speed cap, so at most
``h`` of arc per sample) and stopped where the separation first reaches one
half; that event is localized by bisection.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import FlowStall
from .skeleton import ConfigState, SkeletonPoint, skeleton_build
from .spaces import (HALF, Direction, Edge, PhysPoint, Space, away_direction, canonical_arrays,
                     ccw_offset, dist, dist_arrays, dist_to_free_end, wrap)


@dataclass(frozen=True)
class FlowParams:
    kappa: float = 4.0
    step: float = 1e-3
    bisect_tol: float = 1e-10
    snap_tol: float = 1e-6
    max_time: float = 1e4
    # open-neighbourhood width used when classifying continuity domains
    tol_antipodal: float = 1e-6
    # largest per-sample parameter step along main-step motions
    main_step: float = 1e-2


class FlowPath:
    """Samples ``(time, state)`` of a flow with time normalized to ``[0, 1]``.

    ``terminal`` is the skeleton point (lollipop) or the robot-B coordinate on
    the antipodal circle (circle) where the forward flow ends.  A reversed
    path keeps the forward samples and flips a flag, so reversing twice gives
    back the identical object.
    """

    def __init__(self, times, edges, coords, terminal, reversed_=False):
        self._times = np.asarray(times, dtype=float)
        self._edges = np.asarray(edges, dtype=np.int8)
        self._coords = np.asarray(coords, dtype=float)
        self.terminal = terminal
        self.reversed = reversed_

    @property
    def times(self) -> np.ndarray:
        return 1.0 - self._times[::-1] if self.reversed else self._times

    @property
    def edges(self) -> np.ndarray:
        return self._edges[::-1] if self.reversed else self._edges

    @property
    def coords(self) -> np.ndarray:
        return self._coords[::-1] if self.reversed else self._coords

    def __len__(self) -> int:
        return len(self._times)

    def state(self, i: int) -> ConfigState:
        e, x = self.edges[i], self.coords[i]
        return ConfigState(PhysPoint(Edge(int(e[0])), float(x[0])), PhysPoint(Edge(int(e[1])), float(x[1])))

    @property
    def states(self) -> list[ConfigState]:
        return [self.state(i) for i in range(len(self))]

    @property
    def first(self) -> ConfigState:
        return self.state(0)

    @property
    def last(self) -> ConfigState:
        return self.state(len(self) - 1)

    def separations(self, space: Space) -> np.ndarray:
        e, x = self.edges, self.coords
        return dist_arrays(e[:, 0], x[:, 0], e[:, 1], x[:, 1])

    def __eq__(self, other) -> bool:
        if not isinstance(other, FlowPath):
            return NotImplemented
        return (self.reversed == other.reversed and self.terminal == other.terminal
                and np.array_equal(self._times, other._times)
                and np.array_equal(self._edges, other._edges)
                and np.array_equal(self._coords, other._coords))

    __hash__ = None

    def __repr__(self) -> str:
        return f"FlowPath({self.first} -> {self.last}, n={len(self)}, reversed={self.reversed})"


def reverse(path: FlowPath) -> FlowPath:
    return FlowPath(path._times, path._edges, path._coords, path.terminal, not path.reversed)


def _constant(state: ConfigState, terminal) -> FlowPath:
    e = [[state.a.edge, state.b.edge]] * 2
    x = [[state.a.t, state.b.t]] * 2
    return FlowPath([0.0, 1.0], e, x, terminal)


# -- circle ------------------------------------------------------------------

def retract_circle(state: ConfigState, params: FlowParams = FlowParams()) -> FlowPath:
    """Move robot A along the arc away from B until it is antipodal to B."""
    a, b = state.a.t, state.b.t
    shift = ccw_offset(a, b) - HALF  # > 0: B is behind, A goes ccw; < 0: A goes cw
    if shift == 0.0:
        return _constant(state, b)
    n = max(2, int(math.ceil(abs(shift) / params.step)) + 1)
    lam = np.linspace(0.0, 1.0, n)
    xa = np.mod(a + shift * lam, 1.0)
    xa[xa >= 1.0] = 0.0
    xa[-1] = wrap(b - HALF)
    coords = np.column_stack([xa, np.full(n, b)])
    edges = np.full((n, 2), int(Edge.C), dtype=np.int8)
    return FlowPath(lam, edges, coords, b)


# -- lollipop ----------------------------------------------------------------

def _F(d: float, k: float) -> float:
    if d <= 0.0:
        return -math.inf
    if d <= 1.0 / k:
        return math.log(k * d) / k
    return d - 1.0 / k


def _G(y: float, k: float) -> float:
    if y <= 0.0:
        return math.exp(k * y) / k
    return 1.0 / k + y


def _F_arr(d, k):
    d = np.asarray(d, dtype=float)
    with np.errstate(divide="ignore"):
        small = np.log(np.maximum(k * d, 0.0)) / k
    return np.where(d <= 1.0 / k, small, d - 1.0 / k)


def _G_arr(y, k):
    y = np.asarray(y, dtype=float)
    return np.where(y <= 0.0, np.exp(k * np.minimum(y, 0.0)) / k, 1.0 / k + y)


class _Lane:
    """Closed-form trajectory of one robot under the damped away-flow."""

    def __init__(self, p: PhysPoint, direction: Direction, k: float):
        self.p, self.k = p, k
        self.fixed = direction in (Direction.PARKED, Direction.AMBIGUOUS)
        if self.fixed:
            return
        if p.edge is Edge.I:
            self.sign = 1.0 if direction is Direction.INTERVAL_DOWN else -1.0
            self.y0 = _F(1.0 - p.t, k)
        else:
            self.sign = 1.0 if direction is Direction.CIRCLE_CCW else -1.0
            self.half = _F(HALF, k)
            self.y0 = self._phi(p.t)

    def _phi(self, c: float) -> float:
        if c <= HALF:
            return _F(c, self.k)
        return 2.0 * self.half - _F(1.0 - c, self.k)

    def at(self, tau: float) -> tuple[int, float]:
        if self.fixed:
            return self.p.edge, self.p.t
        y = self.y0 + self.sign * tau
        if self.p.edge is Edge.I:
            t = 1.0 - min(1.0, _G(y, self.k))
            if t >= 1.0:
                return Edge.C, 0.0
            return Edge.I, t
        if y <= self.half:
            c = _G(y, self.k)
        else:
            c = 1.0 - _G(2.0 * self.half - y, self.k)
        return Edge.C, wrap(c)

    def travel(self, tau: float) -> float:
        """Arc length covered by time ``tau`` (lanes never cross the junction)."""
        if self.fixed:
            return 0.0
        y = self.y0 + self.sign * tau
        if self.p.edge is Edge.I:
            return abs(min(1.0, _G(y, self.k)) - (1.0 - self.p.t))
        if y <= self.half:
            c = _G(y, self.k)
        else:
            c = 1.0 - _G(2.0 * self.half - y, self.k)
        return abs(c - self.p.t)

    def at_array(self, tau: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        n = len(tau)
        if self.fixed:
            return np.full(n, int(self.p.edge), dtype=np.int8), np.full(n, self.p.t)
        y = self.y0 + self.sign * tau
        if self.p.edge is Edge.I:
            d = np.minimum(1.0, _G_arr(y, self.k))
            return canonical_arrays(np.zeros(n, dtype=np.int8), 1.0 - d, lollipop=True)
        c = np.where(y <= self.half, _G_arr(y, self.k),
                     1.0 - _G_arr(2.0 * self.half - np.maximum(y, self.half), self.k))
        return canonical_arrays(np.ones(n, dtype=np.int8), c, lollipop=True)


def _snap(state: ConfigState, params: FlowParams) -> tuple[SkeletonPoint, ConfigState]:
    g = skeleton_build()
    p = g.locate(state, tol=params.snap_tol)
    return p, g.embed(p)


def retract_lollipop(state: ConfigState, params: FlowParams = FlowParams()) -> FlowPath:
    """Flow a lollipop state onto the skeleton; the last sample is snapped onto it."""
    space = Space.LOLLIPOP
    sep = dist(space, state.a, state.b)
    h = params.step

    if abs(sep - HALF) <= 1e-12:
        terminal, snapped = _snap(state, params)
        path = _constant(state, terminal)
        path._edges[-1] = [snapped.a.edge, snapped.b.edge]
        path._coords[-1] = [snapped.a.t, snapped.b.t]
        return path

    if sep > HALF:
        # the robot nearer the free end (always on the interval) climbs toward the other
        mover = 0 if dist_to_free_end(state.a) < dist_to_free_end(state.b) else 1
        p = (state.a, state.b)[mover]
        climb = sep - HALF
        n = max(2, int(math.ceil(climb / h)) + 1)
        lam = np.linspace(0.0, 1.0, n)
        e = np.zeros(n, dtype=np.int8)
        t = p.t + climb * lam
        e, t = canonical_arrays(e, t, lollipop=True)
        edges = np.empty((n, 2), dtype=np.int8)
        coords = np.empty((n, 2))
        other = 1 - mover
        q = (state.a, state.b)[other]
        edges[:, mover], coords[:, mover] = e, t
        edges[:, other], coords[:, other] = int(q.edge), q.t
        coords[0, mover] = p.t
        edges[0, mover] = int(p.edge)
        last = ConfigState(*[PhysPoint(Edge(int(edges[-1, i])), float(coords[-1, i])) for i in (0, 1)])
        terminal, snapped = _snap(last, params)
        snap_row = [(snapped.a.edge, snapped.a.t), (snapped.b.edge, snapped.b.t)]
        # the stationary robot must stay bitwise fixed; only the mover is snapped
        edges[-1, mover], coords[-1, mover] = snap_row[mover]
        if snap_row[other] != (q.edge, q.t):
            edges[-1, other], coords[-1, other] = snap_row[other]
        return FlowPath(lam, edges, coords, terminal)

    k = params.kappa
    la = _Lane(state.a, away_direction(space, state.a, state.b), k)
    lb = _Lane(state.b, away_direction(space, state.b, state.a), k)

    # both robots extend the current geodesic, so its length is the initial
    # separation plus the distance travelled; unlike the separation itself
    # (which peaks at one half on the circle) this is monotone in time
    def sep_at(tau: float) -> float:
        return sep + la.travel(tau) + lb.travel(tau)

    hi = h
    while sep_at(hi) < HALF:
        hi *= 2.0
        if hi > params.max_time:
            raise FlowStall(f"separation never reached one half from {state}")
    lo = 0.0 if hi == h else hi / 2.0
    while hi - lo > params.bisect_tol:
        mid = 0.5 * (lo + hi)
        if sep_at(mid) < HALF:
            lo = mid
        else:
            hi = mid
    T = hi

    taus = np.arange(0.0, T - 0.5 * h, h) if T > 0.5 * h else np.zeros(1)
    taus = np.append(taus, T)
    ea, ta = la.at_array(taus)
    eb, tb = lb.at_array(taus)
    edges = np.column_stack([ea, eb]).astype(np.int8)
    coords = np.column_stack([ta, tb])
    edges[0] = [state.a.edge, state.b.edge]
    coords[0] = [state.a.t, state.b.t]
    ea_T, ta_T = la.at(T)
    eb_T, tb_T = lb.at(T)
    terminal, snapped = _snap(ConfigState(PhysPoint(Edge(ea_T), ta_T), PhysPoint(Edge(eb_T), tb_T)), params)
    edges[-1] = [snapped.a.edge, snapped.b.edge]
    coords[-1] = [snapped.a.t, snapped.b.t]
    return FlowPath(taus / T, edges, coords, terminal)
