"""Plan serialization and uniform-time resampling.

Points are written in the ``I:<t>`` / ``C:<t>`` encoding using ``repr`` of the
float, so every value survives a write/read round trip exactly.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .errors import IllegalCoordinate
from .planners import Plan, PlanQuery, Region, Step, StepTag, instruction_text, make_query
from .retraction import FlowParams
from .spaces import Edge, PhysPoint, Space, geodesic_arrays, parse_point

VERSION = 1
_ROBOT_KEYS = ("a", "b")


def _enc(e, t) -> str:
    return str(PhysPoint(Edge(int(e)), float(t)))


def _dec(text: str) -> tuple[int, float]:
    p = parse_point(text)
    return int(p.edge), p.t


def query_to_dict(q: PlanQuery) -> dict:
    return {
        "space": q.space.value,
        "robots": q.robots,
        "start": [str(p) for p in q.start],
        "goal": [str(p) for p in q.goal],
    }


def query_from_dict(d: dict) -> PlanQuery:
    start = [parse_point(s) for s in d["start"]]
    goal = [parse_point(s) for s in d["goal"]]
    return make_query(d["space"], int(d["robots"]), start, goal)


def params_from_dict(d: dict | None) -> FlowParams:
    return FlowParams(**d) if d else FlowParams()


# -- resampling ---------------------------------------------------------------

def resample_arrays(plan: Plan, n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``n`` samples at uniformly spaced plan times, interpolated along the track.

    Returns normalized times in ``[0, 1]`` with edge codes and coordinates.
    """
    if n < 2:
        raise ValueError("need at least two samples")
    times = plan.times
    duration = float(times[-1])
    u = np.linspace(0.0, 1.0, n)
    if duration <= 0.0:
        return u, np.repeat(plan.edges[:1], n, axis=0), np.repeat(plan.coords[:1], n, axis=0)
    target = u * duration
    i = np.searchsorted(times, target, side="right") - 1
    i = np.clip(i, 0, len(times) - 2)
    dt = times[i + 1] - times[i]
    with np.errstate(invalid="ignore", divide="ignore"):
        lam = np.where(dt > 0, (target - times[i]) / dt, 0.0)
    lam = np.clip(lam, 0.0, 1.0)
    edges = np.empty((n, plan.robots), dtype=np.int8)
    coords = np.empty((n, plan.robots))
    for r in range(plan.robots):
        e, t = geodesic_arrays(plan.query.space, plan.edges[i, r], plan.coords[i, r],
                               plan.edges[i + 1, r], plan.coords[i + 1, r], lam)
        edges[:, r], coords[:, r] = e, t
    # pin the ends to the exact plan endpoints
    edges[0], coords[0] = plan.edges[0], plan.coords[0]
    edges[-1], coords[-1] = plan.edges[-1], plan.coords[-1]
    return u, edges, coords


@dataclass
class TrajectoryFile:
    header: dict
    times: np.ndarray
    edges: np.ndarray
    coords: np.ndarray

    @property
    def space(self) -> Space:
        return Space(self.header["space"])

    @property
    def robots(self) -> int:
        return self.edges.shape[1]

    def __len__(self) -> int:
        return len(self.times)

    def sample(self, i: int) -> tuple[PhysPoint, ...]:
        return tuple(PhysPoint(Edge(int(self.edges[i, r])), float(self.coords[i, r]))
                     for r in range(self.robots))

    def rows(self) -> list[dict]:
        out = []
        for i in range(len(self)):
            row = {"t": float(self.times[i])}
            for r in range(self.robots):
                row[_ROBOT_KEYS[r]] = _enc(self.edges[i, r], self.coords[i, r])
            out.append(row)
        return out

    def to_json(self) -> str:
        return json.dumps({"header": self.header, "samples": self.rows()}, indent=1)

    @classmethod
    def from_json(cls, text: str) -> TrajectoryFile:
        d = json.loads(text)
        header = d["header"]
        if header.get("version") != VERSION:
            raise IllegalCoordinate(f"unsupported trajectory version {header.get('version')!r}")
        return cls(header, *_rows_to_arrays(d["samples"], int(header["query"]["robots"])))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        keys = ["t", *_ROBOT_KEYS[: self.robots]]
        w.writerow(keys)
        for row in self.rows():
            w.writerow([repr(row["t"]), *(row[k] for k in keys[1:])])
        return buf.getvalue()

    def write(self, path: str | Path) -> None:
        path = Path(path)
        text = self.to_csv() if path.suffix == ".csv" else self.to_json()
        path.write_text(text)

    @classmethod
    def read(cls, path: str | Path) -> TrajectoryFile:
        return cls.from_json(Path(path).read_text())


def _rows_to_arrays(rows: list[dict], robots: int):
    n = len(rows)
    times = np.empty(n)
    edges = np.empty((n, robots), dtype=np.int8)
    coords = np.empty((n, robots))
    for i, row in enumerate(rows):
        times[i] = float(row["t"])
        for r in range(robots):
            edges[i, r], coords[i, r] = _dec(row[_ROBOT_KEYS[r]])
    return times, edges, coords


def resample(plan: Plan, n: int) -> TrajectoryFile:
    times, edges, coords = resample_arrays(plan, n)
    header = {
        "version": VERSION,
        "space": plan.query.space.value,
        "query": query_to_dict(plan.query),
        "region": plan.region.value,
        "instruction": instruction_text(plan.region, plan.query.space, plan.robots),
        "params": asdict(plan.params),
    }
    return TrajectoryFile(header, times, edges, coords)


# -- plan JSON ----------------------------------------------------------------

def plan_to_dict(plan: Plan) -> dict:
    steps = []
    for s in plan.steps:
        samples = []
        for i in range(s.start, s.stop + 1):
            row = {"t": float(plan.times[i])}
            for r in range(plan.robots):
                row[_ROBOT_KEYS[r]] = _enc(plan.edges[i, r], plan.coords[i, r])
            samples.append(row)
        steps.append({"tag": s.tag.value, "samples": samples})
    return {
        "query": query_to_dict(plan.query),
        "region": plan.region.value,
        "instruction": instruction_text(plan.region, plan.query.space, plan.robots),
        "params": asdict(plan.params),
        "steps": steps,
    }


def plan_to_json(plan: Plan) -> str:
    return json.dumps(plan_to_dict(plan), indent=1)


def plan_from_dict(d: dict) -> Plan:
    q = query_from_dict(d["query"])
    chunks, steps, n = [], [], 0
    for k, s in enumerate(d["steps"]):
        arrays = _rows_to_arrays(s["samples"], q.robots)
        if k:
            # consecutive steps repeat their shared boundary sample
            arrays = tuple(a[1:] for a in arrays)
            start = n - 1
        else:
            start = 0
        chunks.append(arrays)
        n += len(arrays[0])
        steps.append(Step(StepTag(s["tag"]), start, n - 1))
    times = np.concatenate([c[0] for c in chunks])
    edges = np.concatenate([c[1] for c in chunks])
    coords = np.concatenate([c[2] for c in chunks])
    return Plan(q, Region(d["region"]), times, edges, coords, steps,
                params=params_from_dict(d.get("params")))


def plan_from_json(text: str) -> Plan:
    return plan_from_dict(json.loads(text))


def write_plan(plan: Plan, path: str | Path) -> None:
    Path(path).write_text(plan_to_json(plan))


def read_plan(path: str | Path) -> Plan:
    return plan_from_json(Path(path).read_text())
