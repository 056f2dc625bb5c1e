"""Deterministic SVG frames: physical track on the left, flat configuration view on the right.

Numbers are printed with a fixed number of decimals and elements are emitted
in a fixed order, so identical inputs always give identical bytes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .skeleton import skeleton_build
from .spaces import HALF, Edge, Space
from .trajectory import TrajectoryFile


@dataclass(frozen=True)
class RenderSpec:
    frames: int = 120
    width: int = 800
    height: int = 400
    overlay_samples: int = 33
    a_style: str = 'fill="#1f4e9c" stroke="#1f4e9c"'
    b_style: str = 'fill="#ffffff" stroke="#c0392b" stroke-width="2"'

    def __post_init__(self):
        if self.frames < 1:
            raise ValueError("need at least one frame")
        if self.width < 100 or self.height < 100:
            raise ValueError("canvas too small")


def parse_size(text: str) -> tuple[int, int]:
    w, _, h = text.lower().partition("x")
    return int(w), int(h)


def _f(x: float) -> str:
    s = f"{x:.2f}"
    return "0.00" if s == "-0.00" else s


# -- overlay ------------------------------------------------------------------

def overlay_states(space: Space, samples: int = 33) -> list[tuple[str, np.ndarray, np.ndarray]]:
    """Configuration samples drawn as the half-unit overlay, per curve.

    Each entry is ``(name, edges, coords)`` with arrays of shape
    ``(samples, 2)``: the skeleton edges on the lollipop, the two antipodal
    lines on the circle, nothing on the interval.
    """
    space = Space(space)
    if space is Space.LOLLIPOP:
        g = skeleton_build()
        out = []
        for e in g.edges.values():
            s = np.linspace(e.s0, e.s1, samples)
            ea, ta, eb, tb = e.embed_array(s)
            out.append((e.id, np.column_stack([ea, eb]).astype(np.int8), np.column_stack([ta, tb])))
        return out
    if space is Space.CIRCLE:
        out = []
        for name, lo in (("antipodal-low", 0.0), ("antipodal-high", HALF)):
            a = np.linspace(lo, lo + HALF, samples)
            a[-1] = np.nextafter(lo + HALF, lo)  # stay inside the block
            b = np.mod(a + HALF, 1.0)
            edges = np.ones((samples, 2), dtype=np.int8)
            out.append((name, edges, np.column_stack([a, b])))
        return out
    return []


# -- layout -------------------------------------------------------------------

class _Layout:
    def __init__(self, space: Space, spec: RenderSpec):
        self.space = space
        half = spec.width / 2.0
        pad = 20.0
        # physical view: circle with the interval tangent at the junction (bottom point)
        if space is Space.LOLLIPOP:
            self.r = min((half - 2 * pad) / (2 * math.pi + 2), (spec.height - 2 * pad) / 2.4)
            self.seg = 2 * math.pi * self.r
            self.cx = pad + self.seg + self.r
        else:
            self.r = min((half - 2 * pad) / 2.0, (spec.height - 2 * pad) / 2.4)
            self.seg = half - 2 * pad
            self.cx = half / 2.0
        self.cy = spec.height / 2.0
        self.jx, self.jy = self.cx, self.cy + self.r
        if space is Space.INTERVAL:
            self.jx, self.jy = pad + self.seg, spec.height / 2.0
        # flat view: II, IC / CI, CC blocks with A horizontal and B vertical
        self.blocks = {Space.INTERVAL: [Edge.I], Space.CIRCLE: [Edge.C],
                       Space.LOLLIPOP: [Edge.I, Edge.C]}[space]
        k = len(self.blocks)
        self.side = min(half - 2 * pad, spec.height - 2 * pad) / k
        self.fx = half + pad
        self.fy = (spec.height + self.side * k) / 2.0  # bottom edge, y grows upward

    def physical(self, e: int, t: float) -> tuple[float, float]:
        if e == Edge.I:
            return self.jx - (1.0 - t) * self.seg, self.jy
        ang = -math.pi / 2 + 2 * math.pi * t
        return self.cx + self.r * math.cos(ang), self.cy - self.r * math.sin(ang)

    def flat(self, ea: int, ta: float, eb: int, tb: float) -> tuple[float, float]:
        ia, ib = self.blocks.index(Edge(ea)), self.blocks.index(Edge(eb))
        return self.fx + (ia + ta) * self.side, self.fy - (ib + tb) * self.side


def _triangle(x: float, y: float, size: float, style: str) -> str:
    pts = [(x, y - size), (x - size * 0.87, y + size * 0.5), (x + size * 0.87, y + size * 0.5)]
    return f'<polygon points="{" ".join(f"{_f(px)},{_f(py)}" for px, py in pts)}" {style}/>'


def render_svg(traj: TrajectoryFile, index: int, spec: RenderSpec = RenderSpec()) -> str:
    space = traj.space
    L = _Layout(space, spec)
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{spec.width}" height="{spec.height}" '
           f'viewBox="0 0 {spec.width} {spec.height}">',
           f'<rect width="{spec.width}" height="{spec.height}" fill="#ffffff"/>']
    track = 'fill="none" stroke="#555555" stroke-width="3"'
    if space is not Space.INTERVAL:
        out.append(f'<circle cx="{_f(L.cx)}" cy="{_f(L.cy)}" r="{_f(L.r)}" {track}/>')
    if space is not Space.CIRCLE:
        x0, y0 = L.physical(Edge.I, 0.0)
        out.append(f'<line x1="{_f(x0)}" y1="{_f(y0)}" x2="{_f(L.jx)}" y2="{_f(L.jy)}" {track}/>')

    # flat view blocks and collision diagonal
    k = len(L.blocks)
    for ib, eb in enumerate(L.blocks):
        for ia, ea in enumerate(L.blocks):
            x = L.fx + ia * L.side
            y = L.fy - (ib + 1) * L.side
            out.append(f'<rect x="{_f(x)}" y="{_f(y)}" width="{_f(L.side)}" height="{_f(L.side)}" '
                       f'fill="#f4f4f4" stroke="#999999"/>')
            out.append(f'<text x="{_f(x + 4)}" y="{_f(y + 14)}" font-size="11" fill="#777777">'
                       f'{ea.name}{eb.name}</text>')
    for ib in range(k):
        x0, y0 = L.fx + ib * L.side, L.fy - ib * L.side
        out.append(f'<line x1="{_f(x0)}" y1="{_f(y0)}" x2="{_f(x0 + L.side)}" y2="{_f(y0 - L.side)}" '
                   f'stroke="#bbbbbb" stroke-dasharray="4 3"/>')
    for name, e, x in overlay_states(space, spec.overlay_samples):
        pts = " ".join(f"{_f(px)},{_f(py)}" for px, py in
                       (L.flat(e[i, 0], x[i, 0], e[i, 1], x[i, 1]) for i in range(len(x))))
        out.append(f'<polyline data-curve="{name}" points="{pts}" fill="none" stroke="#27ae60" '
                   f'stroke-width="2"/>')

    pts = traj.sample(index)
    size = max(6.0, spec.height / 40.0)
    for r, p in enumerate(pts):
        x, y = L.physical(p.edge, p.t)
        style = spec.a_style if r == 0 else spec.b_style
        out.append(f'<g data-robot="{"AB"[r]}">{_triangle(x, y, size, style)}</g>')
    if len(pts) == 2:
        x, y = L.flat(pts[0].edge, pts[0].t, pts[1].edge, pts[1].t)
        out.append(f'<circle data-state="1" cx="{_f(x)}" cy="{_f(y)}" r="5" fill="#000000"/>')
    label = f'{traj.header.get("region", "")}  t={traj.times[index]:.3f}'
    out.append(f'<text x="10" y="{spec.height - 10}" font-size="13" fill="#333333">{label}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def frame_indices(n_samples: int, frames: int) -> list[int]:
    if frames == 1:
        return [0]
    return [round(i * (n_samples - 1) / (frames - 1)) for i in range(frames)]


def render_frames(traj: TrajectoryFile, spec: RenderSpec, outdir: str | Path) -> list[Path]:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = []
    for k, i in enumerate(frame_indices(len(traj), spec.frames)):
        path = outdir / f"frame_{k:04d}.svg"
        path.write_text(render_svg(traj, i, spec))
        paths.append(path)
    return paths
