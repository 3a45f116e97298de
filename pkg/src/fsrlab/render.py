"""DOT renderings of graphs and SVG drawings of subdivided tiles."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analyzers import SeparationGraph, shortest_cycle
from .contraction import PortWalkGraph
from .engine import LevelComplex, get_tower
from .graphs import SubdivisionGraph
from .validate import CompiledRule, compile_rule

__all__ = [
    "RenderOptions",
    "separation_dot",
    "subdivision_graph_dot",
    "port_walk_dot",
    "tutte_layout",
    "complex_svg",
    "rule_svg",
]

LAYOUTS = ("tutte", "radial")
_HIGHLIGHT = 'color="red", penwidth=2.0'


@dataclass(frozen=True)
class RenderOptions:
    format: str = "svg"  # dot | svg | json
    layout: str = "tutte"
    level: int = 1
    tile: str | None = None
    size: float = 400.0
    tol: float = 1e-9
    max_sweeps: int = 10_000


def _q(s: str) -> str:
    return '"' + str(s).replace("\\", "\\\\").replace('"', '\\"') + '"'


# ---------------------------------------------------------------------------
# DOT


def separation_dot(graph: SeparationGraph, rule: CompiledRule | None = None) -> str:
    """Separation graph with its shortest cycle (if any) highlighted."""
    succ = graph.successors()
    cyc = shortest_cycle(succ, set(graph.sources) if graph.glued else None)
    on_cycle = set()
    if cyc:
        on_cycle = {(cyc[i], cyc[(i + 1) % len(cyc)]) for i in range(len(cyc))}
    lines = [f"digraph {_q('G_' + graph.kind)} {{", "  node [shape=box, fontname=Helvetica];"]
    for i, label in enumerate(graph.labels):
        attrs = f"label={_q(label)}"
        if cyc and i in cyc:
            attrs += ", " + _HIGHLIGHT
        lines.append(f"  n{i} [{attrs}];")
    seen = set()
    for a, b, (t, face) in graph.arcs:
        if (a, b) in seen:
            continue
        seen.add((a, b))
        tname = rule.tile_ids[t] if rule is not None else str(t)
        attrs = f"label={_q(f'{tname}#{face}')}"
        if (a, b) in on_cycle:
            attrs += ", " + _HIGHLIGHT
        lines.append(f"  n{a} -> n{b} [{attrs}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def subdivision_graph_dot(graph: SubdivisionGraph) -> str:
    """Γ with one rank per level; vertical edges dashed."""
    lines = [f"graph {_q('Gamma_' + graph.flavor)} {{", "  rankdir=TB;", "  node [shape=circle, fontsize=8];"]
    for m in range(-1, graph.depth + 1):
        names = " ".join(f"L{m + 1}_{u};" for u in range(graph.n_vertices(m)))
        lines.append(f"  {{ rank=same; {names} }}")
        for u in range(graph.n_vertices(m)):
            lines.append(f"  L{m + 1}_{u} [label={_q(f'{m}:{u}')}];")
    for m in range(-1, graph.depth + 1):
        for u, w in graph.horizontal_edges(m):
            lines.append(f"  L{m + 1}_{u} -- L{m + 1}_{w};")
        if m >= 0:
            for u, p in graph.vertical_edges(m):
                lines.append(f"  L{m + 1}_{u} -- L{m}_{p} [style=dashed];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def port_walk_dot(pw: PortWalkGraph) -> str:
    """Port walk graph with the shortest non-winding cycle highlighted."""
    cyc = pw.non_winding or []
    on_cycle = {(cyc[i], cyc[(i + 1) % len(cyc)]) for i in range(len(cyc))}
    lines = [f"digraph {_q(f'ports_{pw.level}')} {{", "  node [shape=ellipse, fontsize=9];"]
    for p, (f, i) in enumerate(pw.ports):
        attrs = f"label={_q(f'{f}.{i} via {pw.rule.edge_ids[pw.entry_edge[p]]}')}"
        if p in cyc:
            attrs += ", " + _HIGHLIGHT
        lines.append(f"  p{p} [{attrs}];")
    for p, succ in enumerate(pw.succ):
        for w in succ:
            attrs = f" [{_HIGHLIGHT}]" if (p, w) in on_cycle else ""
            lines.append(f"  p{p} -> p{w}{attrs};")
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# SVG


def _boundary_cycle(cx: LevelComplex) -> list[list[int]]:
    """Boundary vertices of a tile complex grouped by model slot, each list from corner to corner."""
    n = cx.rule.tile_size[cx.tile]
    out = []
    for s in range(n):
        chain = cx.boundary_chain(s)
        v = (s - 1) % n
        verts = [v]
        for e, sg in chain:
            v = cx.ehead[e] if sg > 0 else cx.etail[e]
            verts.append(v)
        out.append(verts)
    return out


def tutte_layout(
    cx: LevelComplex, layout: str = "tutte", tol: float = 1e-9, max_sweeps: int = 10_000
) -> tuple[np.ndarray, int]:
    """Barycentric embedding of a tile complex; returns positions and sweeps used.

    Boundary vertices are pinned on the unit circle: ``tutte`` puts the
    corners on a regular polygon and spaces subdivision points evenly on the
    arc between consecutive corners (a strictly convex boundary, so faces
    whose corners all lie on one model edge stay non-degenerate); ``radial``
    spaces all boundary vertices evenly.  Interior
    vertices are moved to the average of their neighbours by Jacobi sweeps
    until the largest move drops below ``tol``.
    """
    if cx.tile is None:
        raise ValueError("planar layouts exist only for tile complexes; pass a tile type")
    if layout not in LAYOUTS:
        raise ValueError(f"layout must be one of {LAYOUTS}")
    n = cx.rule.tile_size[cx.tile]
    sides = _boundary_cycle(cx)
    pos = np.zeros((cx.n_vertices, 2))
    pinned = np.zeros(cx.n_vertices, dtype=bool)
    ring = [v for side in sides for v in side[:-1]]

    if layout == "tutte":
        for s, verts in enumerate(sides):
            k = len(verts) - 1
            for j, v in enumerate(verts):
                ang = math.pi / 2 + 2 * math.pi * (s - 1 + j / k) / n
                pos[v] = (math.cos(ang), math.sin(ang))
    else:
        for j, v in enumerate(ring):
            ang = math.pi / 2 + 2 * math.pi * j / len(ring)
            pos[v] = (math.cos(ang), math.sin(ang))
    pinned[ring] = True
    src = np.concatenate([np.asarray(cx.etail), np.asarray(cx.ehead)])
    dst = np.concatenate([np.asarray(cx.ehead), np.asarray(cx.etail)])
    deg = np.bincount(src, minlength=cx.n_vertices).astype(float)
    free = ~pinned
    sweeps = 0
    if free.any():
        pos[free] = pos[pinned].mean(axis=0)
        for sweeps in range(1, max_sweeps + 1):
            sx = np.bincount(src, weights=pos[dst, 0], minlength=cx.n_vertices)
            sy = np.bincount(src, weights=pos[dst, 1], minlength=cx.n_vertices)
            new = np.stack([sx, sy], axis=1)[free] / deg[free, None]
            delta = float(np.abs(new - pos[free]).max())
            pos[free] = new
            if delta < tol:
                break
    return pos, sweeps


_PALETTE = ["#8dd3c7", "#ffffb3", "#bebada", "#fb8072", "#80b1d3", "#fdb462", "#b3de69", "#fccde5"]


def _complex_group(cx: LevelComplex, pos: np.ndarray, ox: float, oy: float, scale: float) -> list[str]:
    rule = cx.rule

    def xy(v):
        return f"{ox + scale * pos[v, 0]:.4f},{oy - scale * pos[v, 1]:.4f}"

    out = [f'<g class="tile" data-tile="{rule.tile_ids[cx.tile]}" data-level="{cx.level}">']
    for f in range(cx.n_faces):
        pts = " ".join(xy(v) for v in cx.fcorners[f])
        color = _PALETTE[cx.ftype[f] % len(_PALETTE)]
        out.append(
            f'<polygon points="{pts}" fill="{color}" stroke="none" data-face="{f}" '
            f'data-type="{rule.tile_ids[cx.ftype[f]]}"/>'
        )
    for e in range(cx.n_edges):
        a, b = cx.etail[e], cx.ehead[e]
        width = 2.0 if cx.eroot[e] >= 0 else 0.8
        out.append(
            f'<line x1="{ox + scale * pos[a, 0]:.4f}" y1="{oy - scale * pos[a, 1]:.4f}" '
            f'x2="{ox + scale * pos[b, 0]:.4f}" y2="{oy - scale * pos[b, 1]:.4f}" '
            f'stroke="black" stroke-width="{width}" data-edge="{e}"/>'
        )
    for v in range(cx.n_vertices):
        r = 3.0 if cx.is_base_vertex(v) else 1.5
        out.append(
            f'<circle cx="{ox + scale * pos[v, 0]:.4f}" cy="{oy - scale * pos[v, 1]:.4f}" r="{r}" '
            f'fill="black" data-vertex="{v}"><title>{rule.vertex_ids[cx.vlabel[v]]}</title></circle>'
        )
    out.append(
        f'<text x="{ox:.4f}" y="{oy + scale + 18:.4f}" text-anchor="middle" font-family="sans-serif" '
        f'font-size="14">{rule.tile_ids[cx.tile]} (level {cx.level})</text>'
    )
    out.append("</g>")
    return out


def _svg(width: float, height: float, body: list[str]) -> str:
    head = (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}" height="{height:.0f}" '
        f'viewBox="0 0 {width:.0f} {height:.0f}">'
    )
    return "\n".join([head, *body, "</svg>"]) + "\n"


def complex_svg(cx: LevelComplex, options: RenderOptions = RenderOptions()) -> str:
    """SVG drawing of one subdivided tile; deterministic for fixed options."""
    pos, _ = tutte_layout(cx, options.layout, options.tol, options.max_sweeps)
    half = options.size / 2
    body = _complex_group(cx, pos, half, half, half - 20)
    return _svg(options.size, options.size + 30, body)


def rule_svg(spec, options: RenderOptions = RenderOptions()) -> str:
    """All tile types (or ``options.tile``) subdivided to ``options.level``, side by side."""
    rule = compile_rule(spec)
    tower = get_tower(rule)
    tiles = [rule.tile_index(options.tile)] if options.tile is not None else list(range(rule.n_tiles))
    half = options.size / 2
    body = []
    for k, t in enumerate(tiles):
        cx = tower.tile(t, options.level)
        pos, _ = tutte_layout(cx, options.layout, options.tol, options.max_sweeps)
        body += _complex_group(cx, pos, half + k * options.size, half, half - 20)
    return _svg(options.size * max(1, len(tiles)), options.size + 30, body)
