"""JSON and SVG renderings of presentations, skeletons, map tables and orbits.

Every rational is written as a ``"p/q"`` string and every list is sorted, so
equal inputs give equal bytes.
"""
from __future__ import annotations

import json
from fractions import Fraction
from typing import Iterable
from xml.sax.saxutils import escape

from .dendrite import ArcPoint, Endpoint, Node, Skeleton
from .errors import DepthRangeError
from .exact_mod import Nested
from .system import GehmanSystem


def frac(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def dumps(record) -> str:
    return json.dumps(record, sort_keys=True, indent=1) + "\n"


def presentation_record(system: GehmanSystem) -> dict:
    seq = system.seq
    return {
        "levels": [{"cells": list(g.cells), "edges": sorted([u, v] for u, v in g.edges)}
                   for g in seq.levels],
        "homs": [dict(sorted(h.mapping.items())) for h in seq.homs],
        "depth_proxy": [frac(x) for x in seq.depth_proxy],
        "cylinder_lengths": seq.cylinder_lengths,
    }


def codes_record(system: GehmanSystem) -> dict:
    codes = system.codes
    return {
        "n": codes.n,
        "codes": [{"level": lv, "cell": cell, "code": code}
                  for (lv, cell), code in sorted(codes.phi.items())],
    }


def skeleton_record(skel: Skeleton) -> dict:
    pos = skel.layout()
    return {
        "depth_cut": skel.depth_cut,
        "nodes": [{"code": u, "depth": len(u), "kind": skel.node_kind[u],
                   "x": frac(pos[u][0]), "y": pos[u][1]} for u in skel.nodes],
        "arcs": [{"code": a, "length": frac(skel.arc_len(a))} for a in skel.arcs],
    }


def map_pieces(system: GehmanSystem, arcs: Iterable[str]) -> list[dict]:
    """Linearity pieces of F for every arc whose table fits the build."""
    out = []
    for arc in arcs:
        try:
            table = system.F.edge_table(arc)
        except DepthRangeError:
            continue
        for p in table.pieces:
            out.append({
                "arc": arc, "case": table.case_tag,
                "cuts": [frac(p.sub[0]), frac(p.sub[1])],
                "target": {"from": p.target.start, "to": p.target.end},
                "orientation": p.orientation, "lambda": frac(p.lam),
            })
    return out


def stage_pieces(system: GehmanSystem, stage: int) -> list[dict]:
    table = system.Fmod.build_stage(stage)
    return [{
        "stage": stage, "kind": p.kind, "cuts": [frac(p.sub[0]), frac(p.sub[1])],
        "code": p.code, "orientation": p.orientation,
        "lambda": None if p.lam is None else frac(p.lam),
    } for p in table.pieces]


def point_record(p) -> dict:
    if isinstance(p, Node):
        return {"type": "node", "code": p.code, "text": str(p)}
    if isinstance(p, ArcPoint):
        return {"type": "arc", "arc": p.arc, "t": frac(p.t), "text": str(p)}
    if isinstance(p, Endpoint):
        return {"type": "end", "thread": list(p.thread), "text": str(p)}
    if isinstance(p, Nested):
        return {"type": "nested", "code": p.code, "depth": p.depth, "text": str(p)}
    raise TypeError(f"not a point: {p!r}")


def export_json(system: GehmanSystem, depth_cut: int, stage: int,
                orbit: tuple[list, str] | None = None) -> dict:
    skel = system.skeleton(depth_cut)
    record = skeleton_record(skel)
    record["pieces"] = map_pieces(system, skel.arcs)
    record["stage_pieces"] = stage_pieces(system, stage)
    record["n"] = system.n
    if orbit is not None:
        points, note = orbit
        record["orbit"] = {"points": [point_record(p) for p in points], "notice": note}
    return record


# ---------------------------------------------------------------------------
# SVG

KIND_FILL = {"root": "#000000", "level-point": "#c0392b", "S-branch": "#2c3e50",
             "chain": "#95a5a6"}


def _planar(p, pos: dict, depth_cut: int) -> tuple[Fraction, Fraction] | None:
    """Layout coordinates of a point, clipped to the drawn depth."""
    if isinstance(p, Nested):
        code = p.code
    elif isinstance(p, Endpoint):
        return None
    elif isinstance(p, Node):
        code = p.code
    else:
        if len(p.arc) <= depth_cut:
            (x0, y0), (x1, y1) = pos[p.arc[:-1]], pos[p.arc]
            return x0 + p.t * (x1 - x0), y0 + p.t * (y1 - y0)
        code = p.arc
    code = code[:depth_cut]
    x, y = pos[code]
    return x, Fraction(y)


def export_svg(system: GehmanSystem, depth_cut: int, orbit: tuple[list, str] | None = None,
               width: int = 960, row: int = 24, margin: int = 20) -> str:
    skel = system.skeleton(depth_cut)
    pos = skel.layout()
    span = max(x for x, _ in pos.values()) or Fraction(1)
    scale = Fraction(width - 2 * margin) / span

    def xy(x, y) -> str:
        return f"{float(margin + x * scale):.3f},{float(margin + Fraction(y) * row):.3f}"

    height = 2 * margin + depth_cut * row
    lines = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
             f'viewBox="0 0 {width} {height}">']
    lines.append('<g stroke="#7f8c8d" stroke-width="1">')
    for a in skel.arcs:
        (x0, y0), (x1, y1) = pos[a[:-1]], pos[a]
        a0, a1 = xy(x0, y0).split(","), xy(x1, y1).split(",")
        lines.append(f'<line x1="{a0[0]}" y1="{a0[1]}" x2="{a1[0]}" y2="{a1[1]}"/>')
    lines.append("</g>")
    lines.append('<g class="nodes">')
    for u in skel.nodes:
        cx, cy = xy(*pos[u]).split(",")
        label = escape(u or "root")
        lines.append(f'<circle cx="{cx}" cy="{cy}" r="2.5" fill="{KIND_FILL[skel.node_kind[u]]}">'
                     f"<title>{label}</title></circle>")
    lines.append("</g>")
    if orbit is not None:
        pts = [q for q in (_planar(p, pos, depth_cut) for p in orbit[0]) if q is not None]
        if pts:
            path = " ".join(xy(x, y) for x, y in pts)
            lines.append(f'<polyline class="orbit" points="{path}" fill="none" '
                         f'stroke="#2980b9" stroke-width="1.5"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
