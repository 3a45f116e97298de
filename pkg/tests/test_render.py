import itertools
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from fsrlab import build_separation_graph, build_subdivision_graph, get_tower, load_fixture, port_walk_graph
from fsrlab.analyzers import SeparationGraph
from fsrlab.render import RenderOptions, complex_svg, port_walk_dot, rule_svg, separation_dot, subdivision_graph_dot, tutte_layout

SVG = "{http://www.w3.org/2000/svg}"


def _orient(a, b, c):
    return np.sign((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))


def crossings(cx, pos):
    bad = 0
    edges = list(zip(cx.etail, cx.ehead))
    for (a, b), (c, d) in itertools.combinations(edges, 2):
        if len({a, b, c, d}) < 4:
            continue
        if _orient(pos[a], pos[b], pos[c]) * _orient(pos[a], pos[b], pos[d]) < 0 and _orient(
            pos[c], pos[d], pos[a]
        ) * _orient(pos[c], pos[d], pos[b]) < 0:
            bad += 1
    return bad


def signed_areas(cx, pos):
    out = []
    for f in range(cx.n_faces):
        p = pos[list(cx.fcorners[f])]
        out.append(0.5 * np.sum(p[:, 0] * np.roll(p[:, 1], -1) - np.roll(p[:, 0], -1) * p[:, 1]))
    return out


def test_pillow2_quarters_svg():
    cx = get_tower(load_fixture("pillow2")).tile("P", 1)
    svg = complex_svg(cx)
    root = ET.fromstring(svg.split("\n", 1)[1])
    assert len(root.findall(f".//{SVG}polygon")) == 4
    pos, _ = tutte_layout(cx)
    assert crossings(cx, pos) == 0


@pytest.mark.parametrize("layout", ["tutte", "radial"])
def test_layouts_are_embeddings(spec, layout):
    tower = get_tower(spec)
    for t in range(len(spec.tile_types)):
        cx = tower.tile(t, 2)
        pos, sweeps = tutte_layout(cx, layout)
        assert sweeps < 10_000
        assert crossings(cx, pos) == 0
        assert min(signed_areas(cx, pos)) > 0  # every face counterclockwise and non-degenerate


def test_svg_deterministic(spec):
    opts = RenderOptions(level=2)
    assert rule_svg(spec, opts) == rule_svg(spec, opts)


def test_layout_rejects_sphere():
    with pytest.raises(ValueError):
        tutte_layout(get_tower(load_fixture("pillow2")).sphere(1))


def test_separation_dot_highlights_self_loop():
    spec = load_fixture("columns2")
    dot = separation_dot(build_separation_graph(spec, "EE"))
    loops = [ln for ln in dot.splitlines() if "->" in ln and "red" in ln]
    assert loops and all(ln.split("->")[0].strip() == ln.split("->")[1].split("[")[0].strip() for ln in loops)
    assert '"(P,c#0,a#2)"' in dot


def test_empty_graph_dot():
    dot = separation_dot(SeparationGraph("EE", [], [], [], []))
    assert dot.startswith("digraph") and dot.rstrip().endswith("}")
    assert "->" not in dot


def test_gamma_dot_vertical_dashed():
    g = build_subdivision_graph(load_fixture("pillow2"), 1)
    dot = subdivision_graph_dot(g)
    assert dot.count("style=dashed") == 2 + 8
    assert dot.count("rank=same") == 3


def test_port_walk_dot():
    dot = port_walk_dot(port_walk_graph(load_fixture("columns2"), 1))
    assert dot.count("red") >= 4  # two nodes and two arcs
