import csv
import io
import json

import numpy as np
import pytest
from hypothesis import given, settings

from conftest import states
from tcrobots.errors import IllegalCoordinate
from tcrobots.planners import make_query, plan
from tcrobots.spaces import Edge, PhysPoint, Space, dist, dist_arrays, parse_point
from tcrobots.trajectory import (TrajectoryFile, plan_from_json, plan_to_json, read_plan, resample,
                                 write_plan)

L, C = Space.LOLLIPOP, Space.CIRCLE


def q(space, start, goal, robots=2):
    return make_query(space, robots, [parse_point(x) for x in start.split(",")],
                      [parse_point(x) for x in goal.split(",")])


def min_sep(edges, coords):
    return dist_arrays(edges[:, 0], coords[:, 0], edges[:, 1], coords[:, 1]).min()


def test_constant_plan_resamples_to_identical_states():
    p = plan(q(C, "C:0.1", "C:0.1", robots=1))
    t = resample(p, 5)
    assert len(t) == 5 and len({t.sample(i) for i in range(5)}) == 1


def test_wraparound_midpoint():
    t = resample(plan(q(C, "C:0.9", "C:0.1", robots=1)), 3)
    mid = t.sample(1)[0]
    assert mid.edge is Edge.C and dist(C, mid, PhysPoint(Edge.C, 0.0)) <= 1e-12


def test_times_strictly_increase():
    t = resample(plan(q(L, "I:0.2,C:0.25", "C:0.1,C:0.6")), 64)
    assert t.times[0] == 0.0 and t.times[-1] == 1.0 and np.all(np.diff(t.times) > 0)


def test_interpolation_follows_the_track_through_the_junction():
    p = plan(q(L, "I:0.2,I:0.7", "C:0.3,C:0.8"))
    t = resample(p, 400)
    for r in (0, 1):
        gaps = dist_arrays(t.edges[:-1, r], t.coords[:-1, r], t.edges[1:, r], t.coords[1:, r])
        assert gaps.max() <= 2.0 * p.duration / 399 + 1e-9
    assert not np.any((t.edges == Edge.I) & (t.coords >= 1.0))


@settings(max_examples=60)
@given(states(L), states(L))
def test_resampling_keeps_separation(start, goal):
    p = plan(make_query(L, 2, start, goal))
    t = resample(p, 50)
    dense = resample(p, 500)
    assert min_sep(t.edges, t.coords) >= min_sep(dense.edges, dense.coords) - 1e-6
    assert min_sep(t.edges, t.coords) >= p.separations().min() - 1e-6


def test_json_round_trip_is_exact():
    t = resample(plan(q(L, "I:0.123456789012345,C:0.25", "C:0.1,C:0.6")), 37)
    back = TrajectoryFile.from_json(t.to_json())
    assert back.header == t.header
    for name in ("times", "edges", "coords"):
        assert np.array_equal(getattr(back, name), getattr(t, name))


def test_csv_export(tmp_path):
    t = resample(plan(q(C, "C:0.0,C:0.25", "C:0.25,C:0.0")), 9)
    path = tmp_path / "traj.csv"
    t.write(path)
    rows = list(csv.DictReader(io.StringIO(path.read_text())))
    assert [r["a"] for r in rows] == [str(t.sample(i)[0]) for i in range(9)]
    assert float(rows[-1]["t"]) == 1.0


def test_version_required():
    t = resample(plan(q(C, "C:0.1", "C:0.2", robots=1)), 3)
    d = json.loads(t.to_json())
    d["header"]["version"] = 2
    with pytest.raises(IllegalCoordinate):
        TrajectoryFile.from_json(json.dumps(d))


def test_plan_json_round_trip(tmp_path):
    p = plan(q(L, "I:0.2,C:0.25", "C:0.1,C:0.3"))
    path = tmp_path / "plan.json"
    write_plan(p, path)
    back = read_plan(path)
    for name in ("times", "edges", "coords"):
        assert np.array_equal(getattr(back, name), getattr(p, name))
    assert back.steps == p.steps and back.region is p.region and back.query == p.query
    d = json.loads(plan_to_json(p))
    assert set(d) >= {"query", "region", "instruction", "steps"}
    assert [s["tag"] for s in d["steps"]] == ["preliminary", "main", "final"]
    assert set(d["steps"][0]["samples"][0]) == {"t", "a", "b"}


def test_plan_json_is_deterministic():
    query = q(L, "C:0.3,I:0.8", "I:0.1,C:0.9")
    assert plan_to_json(plan(query)) == plan_to_json(plan(query))
    assert plan_to_json(plan_from_json(plan_to_json(plan(query)))) == plan_to_json(plan(query))
