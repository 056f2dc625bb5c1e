"""Acceptance criteria, one PASS/FAIL line each, at the stated tolerances."""
import subprocess
import sys
import time

import numpy as np
import pytest

from tcrobots.errors import IllegalCoordinate, SwapImpossible
from tcrobots.homology import discretize, homology, tc_from_betti
from tcrobots.planners import Region, StepTag, make_query, plan
from tcrobots.retraction import retract_lollipop
from tcrobots.skeleton import make_state, skeleton_build, state_distance
from tcrobots.spaces import Edge, PhysPoint, Space, parse_point
from tcrobots.validation import (boundary_witnesses, continuity_probe, random_query, region_sampler,
                                 validate_plan)

L, C, I = Space.LOLLIPOP, Space.CIRCLE, Space.INTERVAL
G = skeleton_build()
EPS = 1e-3
FAMILY_TOL = 0.02

pytestmark = pytest.mark.slow


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\nACCEPTANCE {n}: {'PASS' if ok else 'FAIL'} - {detail}")
        return ok
    return emit


def pts(text):
    return [parse_point(x) for x in text.split(",")]


def q(space, start, goal, robots=2):
    return make_query(space, robots, pts(start), pts(goal))


def signed_steps(x):
    return np.mod(np.diff(x, axis=0) + 0.5, 1.0) - 0.5


# 1 ---------------------------------------------------------------------------

def test_criterion_1_tc_table(report):
    expected = {I: (2, 0, None), C: (1, 1, 2), L: (1, 3, 3)}
    t0 = time.perf_counter()
    rows = {}
    for space in expected:
        for n in (6, 8, 12):
            h = homology(discretize(space, n))
            tc = tc_from_betti(h.b1) if h.b0 == 1 else None
            rows[space, n] = (h.b0, h.b1, tc)
    elapsed = time.perf_counter() - t0
    h8 = homology(discretize(L, 8))
    ok = (all(rows[s, n] == expected[s] for s, n in rows) and elapsed < 10.0
          and (h8.V, h8.E, h8.F, h8.chi) == (240, 448, 206, -2))
    report(1, ok, f"(b0,b1,TC) interval={expected[I]} circle={expected[C]} lollipop={expected[L]} "
                  f"on n=6,8,12; lollipop n=8 V,E,F,chi={h8.V},{h8.E},{h8.F},{h8.chi}; {elapsed:.2f}s")
    assert ok


# 2 ---------------------------------------------------------------------------

def test_criterion_2_skeleton_agreement(report):
    skel = G.betti1()
    disc = homology(discretize(L, 8)).b1
    ok = report(2, skel == disc == 3, f"skeleton b1={skel}, complex b1={disc}")
    assert ok


# 3 and 4 -----------------------------------------------------------------------

@pytest.fixture(scope="module")
def random_suites():
    out = {}
    t0 = time.perf_counter()
    for space, robots, n in ((L, 2, 10_000), (C, 2, 10_000), (C, 1, 1000), (I, 2, 1000), (I, 1, 1000)):
        rng = np.random.default_rng([42, list(Space).index(space), robots])
        regions, failures = set(), []
        for _ in range(n):
            p = plan(random_query(space, rng, robots))
            regions.add(p.region)
            r = validate_plan(p)
            if not r.ok:
                failures.append(r)
        out[space, robots] = (n, regions, failures)
        if (space, robots) == (C, 2):
            out["seconds"] = time.perf_counter() - t0
    return out


def test_criterion_3_plan_validity(report, random_suites):
    nl, _, fl = random_suites[L, 2]
    nc, _, fc = random_suites[C, 2]
    secs = random_suites["seconds"]
    ok = not fl and not fc and secs < 60.0
    detail = f"lollipop {nl - len(fl)}/{nl}, circle {nc - len(fc)}/{nc} valid in {secs:.1f}s"
    if fl or fc:
        detail += f"; first failure: {(fl or fc)[0]}"
    report(3, ok, detail)
    assert ok


def test_criterion_4_domain_counts(report, random_suites):
    got = {k: v[1] for k, v in random_suites.items() if k != "seconds"}
    try:
        plan(q(I, "I:0.1,I:0.6", "I:0.7,I:0.2"))
        refused = False
    except SwapImpossible:
        refused = True
    ok = (got[L, 2] == {Region.V1, Region.V2, Region.V3}
          and got[C, 2] == got[C, 1] == {Region.CIRCLE_U, Region.CIRCLE_V}
          and got[I, 2] == got[I, 1] == {Region.WHOLE} and refused)
    names = {f"{s.value}-{r}": sorted(x.value for x in v) for (s, r), v in got.items()}
    report(4, ok, f"regions {names}; interval swap refused={refused}")
    assert ok


# 5 ---------------------------------------------------------------------------

def _random_state(rng):
    while True:
        a, b = (PhysPoint(Edge.C if rng.random() < 0.5 else Edge.I, float(rng.random()))
                for _ in range(2))
        try:
            return make_state(L, a, b)
        except IllegalCoordinate:
            continue


def _perturb(rng, x, delta):
    w = rng.random(2)
    w = delta * w / w.sum()
    out = []
    for p, amt in zip((x.a, x.b), w):
        amt *= rng.choice([-1.0, 1.0])
        if p.edge is Edge.C:
            out.append(PhysPoint(Edge.C, (p.t + amt) % 1.0))
        else:
            out.append(PhysPoint(Edge.I, p.t + amt if 0 <= p.t + amt < 1 else p.t - amt))
    return make_state(L, *out)


def _terminal(x):
    return G.embed(retract_lollipop(x).terminal)


def _family_errors(values, families, vid, swapped_vid):
    errors = []
    for v in values:
        for sa, sb in families(v):
            try:
                x = make_state(L, parse_point(sa), parse_point(sb))
            except IllegalCoordinate:
                continue  # degenerate member at the parameter endpoint
            errors.append((state_distance(L, _terminal(x), G.vertices[vid]), v))
            errors.append((state_distance(L, _terminal(x.swapped()), G.vertices[swapped_vid]), v))
    return errors


def test_criterion_5_retraction_continuity(report):
    rng = np.random.default_rng(42)
    jumps = []
    while len(jumps) < 1000:
        x = _random_state(rng)
        y = _perturb(rng, x, 1e-4)
        if state_distance(L, x, y) > 1e-4 + 1e-12:
            continue
        jumps.append(state_distance(L, _terminal(x), _terminal(y)))
    cont_ok = max(jumps) <= 0.05 and np.mean(jumps) <= 1e-3

    # families over the whole open parameter range (1/2, 1) around v1 and (0, 1) around v2
    a_vals = [0.501, 0.55, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99, 1 - EPS]
    b_vals = [EPS, 0.01, 0.05, 0.1, 0.3, 0.5, 0.7, 0.9, 0.95, 0.99, 1 - EPS]
    errs = _family_errors(a_vals, lambda a: [(f"I:{a}", f"I:{1 - EPS}"), (f"I:{a}", f"C:{EPS}"),
                                             (f"I:{a}", f"C:{1 - EPS}")], "v1", "v4")
    errs += _family_errors(b_vals, lambda b: [(f"I:{1 - EPS}", f"C:{b}"), (f"C:{EPS}", f"C:{b}"),
                                              (f"C:{1 - EPS}", f"C:{b}")], "v2", "v3")
    bad = [e for e in errs if e[0] > FAMILY_TOL]
    fam_ok = not bad
    worst = max(errs)
    # the corner state lies in a v1 family and in a v2 family at once
    corner = make_state(L, parse_point(f"I:{1 - EPS}"), parse_point(f"C:{EPS}"))
    gap = state_distance(L, G.vertices["v1"], G.vertices["v2"])
    detail = (f"continuity max={max(jumps):.4f} mean={np.mean(jumps):.2e} over 1000 pairs; "
              f"families {len(errs) - len(bad)}/{len(errs)} within {FAMILY_TOL}, "
              f"worst {worst[0]:.3f} at parameter {worst[1]}")
    if not fam_ok:
        detail += (f"; {corner} belongs to both the v1 and the v2 family and |v1-v2|={gap:g} "
                   f"> 2*{FAMILY_TOL}, so no terminal map meets the full range")
    ok = report(5, cont_ok and fam_ok, detail)
    assert ok


# 6 ---------------------------------------------------------------------------

def test_criterion_6_plan_continuity(report):
    per, ok = {}, True
    for space, robots, regions in ((L, 2, (Region.V1, Region.V2, Region.V3)),
                                   (C, 2, (Region.CIRCLE_U, Region.CIRCLE_V)),
                                   (I, 2, (Region.WHOLE,))):
        for region in regions:
            r = continuity_probe(space, region_sampler(space, region, robots), 1e-3, 200, 42, robots,
                                 boundary=False)
            per[f"{space.value}/{region.value}"] = r.max_jump
            ok &= r.pairs > 0 and r.max_jump <= 0.1
    wc = boundary_witnesses(C, np.random.default_rng(42), 1e-3)
    wl = [w for w in boundary_witnesses(L, np.random.default_rng(42), 1e-3)
          if {w.region_a, w.region_b} == {Region.V2, Region.V3}]
    jc = max((w.jump for w in wc), default=0.0)
    jl = max((w.jump for w in wl), default=0.0)
    ok &= jc >= 0.2 and jl >= 0.2
    jumps = ", ".join(f"{k}={v:.4f}" for k, v in per.items())
    report(6, ok, f"max within-region jump: {jumps}; boundary witness circle={jc:.3f}, "
                  f"lollipop V2/V3={jl:.3f}")
    assert ok


# 7 ---------------------------------------------------------------------------

def test_criterion_7_worked_examples(report):
    checks = {}
    # one robot: shortest path when not antipodal, counterclockwise when antipodal
    d = signed_steps(plan(q(C, "C:0.9", "C:0.2", robots=1)).coords[:, 0])
    checks["1-robot shortest"] = bool(np.all(d >= -1e-12) and abs(d.sum() - 0.3) < 1e-9)
    d = signed_steps(plan(q(C, "C:0.4", "C:0.1", robots=1)).coords[:, 0])
    checks["1-robot shortest cw"] = bool(np.all(d <= 1e-12) and abs(d.sum() + 0.3) < 1e-9)
    d = signed_steps(plan(q(C, "C:0.7", "C:0.2", robots=1)).coords[:, 0])
    checks["1-robot antipodal ccw"] = bool(np.all(d >= -1e-12) and abs(d.sum() - 0.5) < 1e-9)
    # two robots, non-antipodal B: shortest rotation of both
    p = plan(q(C, "C:0.0,C:0.25", "C:0.25,C:0.0"))
    m = p.step(StepTag.MAIN)
    d = signed_steps(p.coords[m.start:m.stop + 1])
    checks["swap main cw"] = (p.region is Region.CIRCLE_V and bool(np.all(d <= 1e-12))
                              and np.allclose(d.sum(axis=0), [-0.25, -0.25]))
    checks["swap exchanged"] = (p.coords[0].tolist() == [0.0, 0.25]
                                and p.coords[-1].tolist() == [0.25, 0.0] and validate_plan(p).ok)
    # two robots, antipodal B: counterclockwise rotation of both
    p = plan(q(C, "C:0.0,C:0.3", "C:0.5,C:0.8"))
    m = p.step(StepTag.MAIN)
    d = signed_steps(p.coords[m.start:m.stop + 1])
    checks["antipodal main ccw"] = (p.region is Region.CIRCLE_U and bool(np.all(d >= -1e-12))
                                    and abs(d[:, 1].sum() - 0.5) < 1e-9 and validate_plan(p).ok)
    ok = all(checks.values())
    report(7, ok, ", ".join(f"{k}={'ok' if v else 'bad'}" for k, v in checks.items()))
    assert ok


# 8 ---------------------------------------------------------------------------

def test_criterion_8_determinism(report, tmp_path):
    outs = []
    for run in ("a", "b"):
        plan_path = tmp_path / f"plan_{run}.json"
        frames = tmp_path / f"frames_{run}"
        cli = [sys.executable, "-m", "tcrobots.cli"]
        subprocess.run(cli + ["plan", "--space", "lollipop", "--start", "I:0.2,C:0.25",
                              "--goal", "C:0.1,C:0.6", "--out", str(plan_path)],
                       check=True, capture_output=True)
        subprocess.run(cli + ["render", "--plan", str(plan_path), "--frames", "12",
                              "--out", str(frames)], check=True, capture_output=True)
        outs.append((plan_path.read_bytes(), [f.read_bytes() for f in sorted(frames.iterdir())]))
    ok = outs[0] == outs[1] and len(outs[0][1]) == 12
    report(8, ok, f"plan JSON and {len(outs[0][1])} SVG frames byte-identical across two runs")
    assert ok
