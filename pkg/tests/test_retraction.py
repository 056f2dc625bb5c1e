import numpy as np
import pytest
from hypothesis import given

from conftest import states
from tcrobots.retraction import FlowParams, retract_circle, retract_lollipop, reverse
from tcrobots.skeleton import ConfigState, SkeletonPoint, make_state, skeleton_build, state_distance
from tcrobots.spaces import HALF, Edge, PhysPoint, Space, dist, dist_to_junction, parse_point

L, C = Space.LOLLIPOP, Space.CIRCLE
G = skeleton_build()
EPS = 1e-3


def s(space, a, b):
    return make_state(space, parse_point(a), parse_point(b))


def terminal_state(path):
    return G.embed(path.terminal)


def random_state(rng, space=L):
    while True:
        pts = []
        for _ in range(2):
            e = Edge.C if space is C or rng.random() < 0.5 else Edge.I
            pts.append(PhysPoint(e, float(rng.random())))
        try:
            return make_state(space, *pts)
        except Exception:
            continue


# -- circle

@pytest.mark.parametrize("a,b,end", [("C:0.0", "C:0.3", 0.8), ("C:0.6", "C:0.5", 0.0)])
def test_circle_examples(a, b, end):
    p = retract_circle(s(C, a, b))
    assert p.last.a.t == pytest.approx(end, abs=1e-12)
    assert np.all(p.coords[:, 1] == p.coords[0, 1])
    seps = p.separations(C)
    assert np.all(np.diff(seps) >= -1e-12)
    assert seps[-1] == pytest.approx(HALF, abs=1e-12)


def test_circle_antipodal_is_constant():
    p = retract_circle(s(C, "C:0.25", "C:0.75"))
    assert np.all(p.coords == p.coords[0])
    assert reverse(p).states == p.states


@given(states(C, 1e-9))
def test_circle_retraction_never_collides(ab):
    p = retract_circle(ConfigState(*ab))
    seps = p.separations(C)
    assert seps.min() >= min(seps[0], HALF) - 1e-12
    assert abs(seps[-1] - HALF) <= 1e-12


# -- lollipop examples

def test_above_half_only_lower_robot_climbs():
    p = retract_lollipop(s(L, "I:0.2", "C:0.25"))
    assert p.last == s(L, "I:0.75", "C:0.25")
    assert p.terminal.edge == "S1a" and p.terminal.s == pytest.approx(0.75)
    assert np.all(p.coords[:, 1] == p.coords[0, 1]) and np.all(p.edges[:, 1] == p.edges[0, 1])


def test_parked_partner_at_junction():
    p = retract_lollipop(s(L, "I:0.9", "C:0.0"))
    assert p.terminal == SkeletonPoint("v1")
    assert np.all(p.coords[:, 1] == 0.0)


def test_symmetric_split_on_circle():
    p = retract_lollipop(s(L, "C:0.45", "C:0.55"))
    # both robots at least 1/kappa from the junction move at unit speed
    assert p.last.a.t == pytest.approx(0.25, abs=1e-9)
    assert p.last.b.t == pytest.approx(0.75, abs=1e-9)
    assert p.terminal.edge == "S2a"


def test_on_skeleton_is_constant():
    x = s(L, "I:0.75", "C:0.25")
    p = retract_lollipop(x)
    assert p.first == x and p.last == x


def test_reverse_examples():
    p = retract_lollipop(s(L, "I:0.2", "C:0.25"))
    r = reverse(p)
    assert r.first == s(L, "I:0.75", "C:0.25")
    assert r.last == s(L, "I:0.2", "C:0.25")
    assert reverse(r) == p
    assert r.times[0] == 0.0 and r.times[-1] == 1.0


# -- finite-difference check of the speed law

@pytest.mark.parametrize("a,b", [("C:0.45", "C:0.55"), ("I:0.95", "C:0.02"), ("C:0.1", "C:0.2"),
                                 ("I:0.7", "I:0.9")])
def test_speed_law_by_finite_differences(a, b):
    params = FlowParams()
    p = retract_lollipop(s(L, a, b), params)
    T = params.step / (p.times[1] - p.times[0])  # samples are spaced by one step in flow time
    e, x = p.edges[:-1], p.coords[:-1]
    for r in (0, 1):
        for i in range(len(x) - 2):
            p0 = PhysPoint(Edge(int(e[i, r])), float(x[i, r]))
            p1 = PhysPoint(Edge(int(e[i + 1, r])), float(x[i + 1, r]))
            if p0.edge is Edge.I and p0.t == 0.0:
                continue
            moved = dist(L, p0, p1)
            dtau = (p.times[i + 1] - p.times[i]) * T
            d0, d1 = dist_to_junction(p0), dist_to_junction(p1)
            lo, hi = sorted((min(1, params.kappa * d0), min(1, params.kappa * d1)))
            assert lo * dtau - 1e-12 <= moved <= hi * dtau + 1e-12


# -- properties

def test_flow_properties_on_random_states(rng):
    for _ in range(10_000):
        x = random_state(rng)
        p = retract_lollipop(x)
        seps = p.separations(L)
        s0 = seps[0]
        assert abs(seps[-1] - HALF) <= 1e-6
        assert state_distance(L, p.last, G.embed(p.terminal)) <= 1e-6
        assert p.times[0] == 0.0 and p.times[-1] == 1.0
        if s0 < HALF:
            assert np.all(np.diff(seps) >= -1e-9)
        elif s0 > HALF:
            assert np.all(np.diff(seps) <= 1e-9)
        assert seps.min() >= min(s0, HALF) - 1e-6


def _perturb(rng, x, delta):
    pts = []
    w = rng.random(2)
    w = delta * w / w.sum()
    for p, amt in zip((x.a, x.b), w):
        amt *= rng.choice([-1.0, 1.0])
        if p.edge is Edge.C:
            pts.append(PhysPoint(Edge.C, (p.t + amt) % 1.0))
        else:
            t = p.t + amt if 0 <= p.t + amt < 1 else p.t - amt
            pts.append(PhysPoint(Edge.I, t))
    return make_state(L, *pts)


def test_terminal_map_is_continuous(rng):
    jumps = []
    while len(jumps) < 1000:
        x = random_state(rng)
        y = _perturb(rng, x, 1e-4)
        if state_distance(L, x, y) > 1e-4 + 1e-12:
            continue
        jumps.append(state_distance(L, terminal_state(retract_lollipop(x)), terminal_state(retract_lollipop(y))))
    assert max(jumps) <= 0.05
    assert np.mean(jumps) <= 1e-3


def test_family_corner_is_contradictory():
    # (I:1-eps, C:eps) is in a v1 family (a = 1 - eps) and in a v2 family (b = eps)
    x = s(L, f"I:{1 - EPS}", f"C:{EPS}")
    assert x == s(L, *_families_v1(1 - EPS)[1]) == s(L, *_families_v2(EPS)[0])
    assert state_distance(L, G.vertices["v1"], G.vertices["v2"]) > 2 * 0.02


def _families_v1(a):
    return [(f"I:{a}", f"I:{1 - EPS}"), (f"I:{a}", f"C:{EPS}"), (f"I:{a}", f"C:{1 - EPS}")]


def _families_v2(b):
    return [(f"I:{1 - EPS}", f"C:{b}"), (f"C:{EPS}", f"C:{b}"), (f"C:{1 - EPS}", f"C:{b}")]


@pytest.mark.parametrize("a", [0.501, 0.55, 0.6, 0.7, 0.8, 0.9])
def test_junction_families_converge_to_v1_and_v4(a):
    for sa, sb in _families_v1(a):
        x = s(L, sa, sb)
        for state, vid in ((x, "v1"), (x.swapped(), "v4")):
            t = terminal_state(retract_lollipop(state))
            assert state_distance(L, t, G.vertices[vid]) <= 0.02, (state, vid)


@pytest.mark.parametrize("b", [0.1, 0.2, 0.3, 0.4, 0.499, 0.5, 0.501, 0.6, 0.7, 0.8, 0.9])
def test_junction_families_converge_to_v2_and_v3(b):
    for sa, sb in _families_v2(b):
        x = s(L, sa, sb)
        for state, vid in ((x, "v2"), (x.swapped(), "v3")):
            t = terminal_state(retract_lollipop(state))
            assert state_distance(L, t, G.vertices[vid]) <= 0.02, (state, vid)


def test_deterministic():
    x = s(L, "C:0.3", "I:0.8")
    assert retract_lollipop(x) == retract_lollipop(x)


@pytest.mark.parametrize("a,b,vid", [
    (PhysPoint(Edge.C, 0.0), PhysPoint(Edge.C, 1.2e-154), "v2"),
    (PhysPoint(Edge.C, 1e-300), PhysPoint(Edge.C, 0.0), "v3"),
    (PhysPoint(Edge.I, 1 - 1e-16), PhysPoint(Edge.C, 0.0), "v1"),
])
def test_tiny_gaps_at_the_junction(a, b, vid):
    assert retract_lollipop(make_state(L, a, b)).terminal == SkeletonPoint(vid)


def test_circle_tiny_gap_moves_away_from_partner():
    p = retract_circle(make_state(C, PhysPoint(Edge.C, 1e-300), PhysPoint(Edge.C, 0.0)))
    seps = p.separations(C)
    assert np.all(np.diff(seps) >= 0) and seps[-1] == HALF
