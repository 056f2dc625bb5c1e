"""``tcrobots`` command-line entry point."""
from __future__ import annotations

import argparse
import json
import sys
import time
from collections import Counter
from dataclasses import replace
from pathlib import Path

import numpy as np

from .errors import IllegalCoordinate, SwapImpossible, TcRobotsError
from .homology import discretize, homology, oracle_path, tc_from_betti, track_graph
from .planners import Region, instruction_text, make_query, plan
from .render import RenderSpec, parse_size, render_frames
from .retraction import FlowParams
from .skeleton import skeleton_build
from .spaces import Space, parse_point
from .trajectory import plan_to_json, read_plan, resample
from .validation import (boundary_witnesses, continuity_probe, random_query, region_sampler,
                         validate_plan)

EXIT_OK = 0
EXIT_REFUSED = 2
EXIT_INPUT = 3
EXIT_VERIFY = 4

EPILOG = """\
points: "I:<t>" on the interval (t in [0, 1], 0 is the free end) and
"C:<t>" on the circle (t in [0, 1), increasing counterclockwise; on the
lollipop C:0 is the junction).  Two-robot states are "A,B", e.g. "I:0.2,C:0.7".

exit codes: 0 success, 2 planner refusal (SwapImpossible), 3 input error,
4 verification failure.
"""

EXPECTED_REGIONS = {
    (Space.INTERVAL, 1): {Region.WHOLE},
    (Space.INTERVAL, 2): {Region.WHOLE},
    (Space.CIRCLE, 1): {Region.CIRCLE_U, Region.CIRCLE_V},
    (Space.CIRCLE, 2): {Region.CIRCLE_U, Region.CIRCLE_V},
    (Space.LOLLIPOP, 2): {Region.V1, Region.V2, Region.V3},
}
# (b0, b1) of the two-robot configuration space
EXPECTED_BETTI = {Space.INTERVAL: (2, 0), Space.CIRCLE: (1, 1), Space.LOLLIPOP: (1, 3)}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: InputError: {message}", file=sys.stderr)
        raise SystemExit(EXIT_INPUT)


def _points(text: str) -> list:
    return [parse_point(s) for s in text.split(",")]


def _params(args) -> FlowParams:
    p = FlowParams()
    if getattr(args, "kappa", None) is not None:
        if not args.kappa > 0:
            raise IllegalCoordinate("--kappa must be positive")
        p = replace(p, kappa=args.kappa)
    if getattr(args, "step", None) is not None:
        if not 0 < args.step <= 0.05:
            raise IllegalCoordinate("--step must be in (0, 0.05]")
        p = replace(p, step=args.step)
    return p


def _emit(obj, as_json: bool, text: str | None = None) -> None:
    if as_json or text is None:
        print(json.dumps(obj, indent=1))
    else:
        print(text)


# -- subcommands --------------------------------------------------------------

def cmd_plan(args) -> int:
    q = make_query(args.space, args.robots, _points(args.start), _points(args.goal))
    p = plan(q, _params(args))
    report = validate_plan(p)
    body = plan_to_json(p)
    if args.out:
        Path(args.out).write_text(body)
    if args.json:
        print(body)
    else:
        print(f"region: {p.region.value}")
        print(f"instruction: {instruction_text(p.region, q.space, q.robots)}")
        for s in p.steps:
            print(f"{s.tag.value}: {s.stop - s.start + 1} samples, "
                  f"t={p.times[s.start]:.6g}..{p.times[s.stop]:.6g}")
        print(f"duration: {p.duration:.6g}")
        print(f"validation: {report}")
    return EXIT_OK if report.ok else EXIT_VERIFY


def _betti_row(space: Space, n: int) -> dict:
    h = homology(discretize(space, n))
    row = h.as_dict()
    row["tc"] = tc_from_betti(h.b1) if h.b0 == 1 else None
    return row


def cmd_betti(args) -> int:
    row = _betti_row(Space(args.space), args.subdivision)
    text = " ".join(f"{k}={v}" for k, v in row.items())
    _emit(row, args.json, text)
    return EXIT_OK


def cmd_tc(args) -> int:
    space = Space(args.space)
    if args.robots == 1:
        b0, b1 = 1, track_graph(space, args.subdivision).betti1()
    else:
        h = homology(discretize(space, args.subdivision))
        b0, b1 = h.b0, h.b1
    tc = tc_from_betti(b1) if b0 == 1 else None
    if args.json:
        print(json.dumps({"space": space.value, "robots": args.robots, "b0": b0, "b1": b1, "tc": tc}))
    elif tc is None:
        print(f"b1={b1} TC=inf (b0={b0}, disconnected)")
    else:
        print(f"b1={b1} TC={tc}")
    return EXIT_OK


def cmd_skeleton(args) -> int:
    g = skeleton_build()
    dump = {
        "vertices": {k: [str(v.a), str(v.b)] for k, v in g.vertices.items()},
        "edges": [],
        "betti1": g.betti1(),
    }
    for e in g.edges.values():
        s = np.linspace(e.s0, e.s1, 33)
        samples = [[str(x.a), str(x.b)] for x in (e.embed(float(v)) for v in s)]
        dump["edges"].append({"id": e.id, "endpoints": [e.tail, e.head], "length": e.length,
                              "samples": samples})
    if args.dump or args.json:
        print(json.dumps(dump, indent=1))
    else:
        for e in dump["edges"]:
            print(f"{e['id']}: {e['endpoints'][0]} -- {e['endpoints'][1]} length {e['length']:g}")
        print(f"b1={dump['betti1']}")
    return EXIT_OK


def _pair(text: str) -> tuple[int, int]:
    try:
        p, q = (int(x) for x in text.split(","))
    except ValueError:
        raise IllegalCoordinate(f"expected a node pair 'p,q', got {text!r}") from None
    return p, q


def cmd_oracle_path(args) -> int:
    c = discretize(Space(args.space), args.subdivision)
    start, goal = _pair(args.start), _pair(args.goal)
    for p in (start, goal):
        if p not in c._index:
            raise IllegalCoordinate(f"{p} is not a pair of distinct nodes below {c.graph.nodes}")
    path = oracle_path(c, start, goal)
    out = {"reachable": path is not None, "moves": None if path is None else len(path),
           "path": None if path is None else [list(x) for x in path]}
    text = "Unreachable" if path is None else " -> ".join(f"({a},{b})" for a, b in [start, *path])
    _emit(out, args.json, text)
    return EXIT_OK


def cmd_render(args) -> int:
    p = read_plan(args.plan)
    w, h = parse_size(args.size)
    spec = RenderSpec(frames=args.frames, width=w, height=h)
    traj = resample(p, max(2, args.frames))
    paths = render_frames(traj, spec, args.out)
    print(f"wrote {len(paths)} frames to {args.out}")
    return EXIT_OK


# -- verify -------------------------------------------------------------------

def _suite_plans(trials: int, seed: int) -> dict:
    out = {}
    ok = True
    for space, robots in EXPECTED_REGIONS:
        n = trials if (space, robots) in ((Space.LOLLIPOP, 2), (Space.CIRCLE, 2)) else max(1, trials // 10)
        rng = np.random.default_rng([seed, list(Space).index(space), robots])
        regions = Counter()
        failures = []
        t0 = time.perf_counter()
        for _ in range(n):
            q = random_query(space, rng, robots)
            p = plan(q)
            regions[p.region.value] += 1
            r = validate_plan(p)
            if not r.ok and len(failures) < 5:
                failures.append({"start": [str(x) for x in q.start], "goal": [str(x) for x in q.goal],
                                 "violation": str(r)})
        expected = {r.value for r in EXPECTED_REGIONS[(space, robots)]}
        good = not failures and set(regions) == expected
        ok &= good
        out[f"{space.value}-{robots}"] = {"trials": n, "regions": dict(sorted(regions.items())),
                                           "failures": failures, "seconds": time.perf_counter() - t0,
                                           "ok": good}
    # swaps on the interval must be refused
    try:
        plan(make_query(Space.INTERVAL, 2, _points("I:0.1,I:0.6"), _points("I:0.7,I:0.2")))
        refused = False
    except SwapImpossible:
        refused = True
    out["interval-swap-refused"] = refused
    out["ok"] = ok and refused
    return out


def _suite_continuity(trials: int, seed: int) -> dict:
    out = {}
    ok = True
    n = min(trials, 200)
    for (space, robots), regions in EXPECTED_REGIONS.items():
        for region in sorted(regions, key=lambda r: r.value):
            r = continuity_probe(space, region_sampler(space, region, robots), 1e-3, n, seed,
                                 robots, boundary=False)
            good = r.pairs > 0 and r.max_jump <= 0.1
            ok &= good
            out[f"{space.value}-{robots}-{region.value}"] = {"pairs": r.pairs, "max_jump": r.max_jump,
                                                             "mean_jump": r.mean_jump, "ok": good}
    for space in (Space.CIRCLE, Space.LOLLIPOP):
        ws = boundary_witnesses(space, np.random.default_rng(seed), 1e-3)
        best = max((w.jump for w in ws), default=0.0)
        good = best >= 0.2
        ok &= good
        out[f"{space.value}-boundary"] = {"witnesses": len(ws), "max_jump": best, "ok": good}
    out["ok"] = ok
    return out


def _suite_homology(trials: int, seed: int) -> dict:
    out = {}
    ok = True
    for space, (b0, b1) in EXPECTED_BETTI.items():
        rows = {n: _betti_row(space, n) for n in (6, 8, 12)}
        good = all(r["b0"] == b0 and r["b1"] == b1 for r in rows.values())
        ok &= good
        out[space.value] = {"subdivisions": {str(n): r for n, r in rows.items()}, "ok": good}
    skel = skeleton_build().betti1()
    agree = skel == _betti_row(Space.LOLLIPOP, 8)["b1"]
    ok &= agree
    out["skeleton-b1"] = {"skeleton": skel, "ok": agree}
    # reachability matches planner success
    rng = np.random.default_rng(seed)
    mismatches = 0
    n = min(trials, 1000)
    for space in Space:
        c = discretize(space, 8)
        for _ in range(n):
            s = c.nodes[int(rng.integers(c.V))]
            g = c.nodes[int(rng.integers(c.V))]
            reachable = oracle_path(c, s, g) is not None
            pt = c.graph.point
            try:
                plan(make_query(space, 2, [pt(s[0]), pt(s[1])], [pt(g[0]), pt(g[1])]))
                planned = True
            except SwapImpossible:
                planned = False
            mismatches += reachable != planned
    out["oracle-agreement"] = {"queries": 3 * n, "mismatches": mismatches, "ok": mismatches == 0}
    out["ok"] = ok and mismatches == 0
    return out


def cmd_verify(args) -> int:
    suites = {"plans": _suite_plans, "continuity": _suite_continuity, "homology": _suite_homology}
    names = list(suites) if args.suite == "all" else [args.suite]
    report = {"seed": args.seed, "trials": args.trials}
    for name in names:
        report[name] = suites[name](args.trials, args.seed)
    report["ok"] = all(report[n]["ok"] for n in names)
    print(json.dumps(report, indent=1, default=float))
    return EXIT_OK if report["ok"] else EXIT_VERIFY


# -- wiring -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="tcrobots", description="Collision-free motion planning on tracks.",
                 epilog=EPILOG, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)
    spaces = [s.value for s in Space]

    def common(p, space=True):
        if space:
            p.add_argument("--space", choices=spaces, required=True)
        p.add_argument("--json", action="store_true", help="machine-readable output")
        p.add_argument("--seed", type=int, default=42)

    p = sub.add_parser("plan", help="plan a motion", epilog=EPILOG,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    common(p)
    p.add_argument("--robots", type=int, choices=(1, 2), default=2)
    p.add_argument("--start", required=True)
    p.add_argument("--goal", required=True)
    p.add_argument("--kappa", type=float)
    p.add_argument("--step", type=float)
    p.add_argument("--out")
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("verify", help="run verification suites")
    common(p, space=False)
    p.add_argument("--suite", choices=("plans", "continuity", "homology", "all"), default="all")
    p.add_argument("--trials", type=int, default=10000)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("betti", help="homology of the discretized two-robot configuration space")
    common(p)
    p.add_argument("--subdivision", type=int, default=8)
    p.set_defaults(func=cmd_betti)

    p = sub.add_parser("tc", help="topological complexity from the first Betti number")
    common(p)
    p.add_argument("--robots", type=int, choices=(1, 2), default=2)
    p.add_argument("--subdivision", type=int, default=8)
    p.set_defaults(func=cmd_tc)

    p = sub.add_parser("skeleton", help="the lollipop skeleton graph")
    common(p, space=False)
    p.add_argument("--dump", action="store_true", help="full JSON with sampled embeddings")
    p.set_defaults(func=cmd_skeleton)

    p = sub.add_parser("oracle-path", help="shortest discrete path between node pairs")
    common(p)
    p.add_argument("--subdivision", type=int, default=8)
    p.add_argument("--start", required=True, help="node pair p,q")
    p.add_argument("--goal", required=True, help="node pair p,q")
    p.set_defaults(func=cmd_oracle_path)

    p = sub.add_parser("render", help="SVG frames of a saved plan")
    common(p, space=False)
    p.add_argument("--plan", required=True)
    p.add_argument("--frames", type=int, default=120)
    p.add_argument("--out", required=True)
    p.add_argument("--size", default="800x400")
    p.set_defaults(func=cmd_render)
    return ap


def run(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SwapImpossible as e:
        print(f"error: {e.code}: {e}", file=sys.stderr)
        return EXIT_REFUSED
    except TcRobotsError as e:
        print(f"error: {e.code}: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (ValueError, OSError, KeyError, json.JSONDecodeError) as e:
        print(f"error: InputError: {e}", file=sys.stderr)
        return EXIT_INPUT


def main(argv: list[str] | None = None) -> int:
    try:
        return run(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
