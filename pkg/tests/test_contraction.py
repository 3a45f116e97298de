from fsrlab import boundary_pair_report, classify_properties, contraction_report, get_tower, load_fixture, port_walk_graph


def replay_arc(pw, p, q):
    """An arc p -> q leaves p's tile through a level-0 edge in a different model edge and enters q."""
    cx = get_tower(pw.rule).sphere(pw.level)
    f, i = pw.ports[p]
    g, j_in = pw.ports[q]
    e = cx.fedges[g][j_in]
    assert cx.eroot[e] >= 0
    exits = [j for j, x in enumerate(cx.fedges[f]) if x == e and j != i]
    assert exits, "crossed edge must lie on the boundary of the source tile"
    assert all(cx.froot[f][j] != cx.froot[f][i] for j in exits)
    assert (g, j_in) != (f, exits[0]) or len(cx.edge_sides[e]) == 2


def test_pillow2_only_winding_cycles():
    pw = port_walk_graph(load_fixture("pillow2"), 1)
    assert pw.non_winding is None
    assert pw.winding_examples
    for cyc in pw.winding_examples:
        assert len(cyc) == 2 and pw.is_winding(cyc)


def test_columns2_non_winding_two_cycle():
    spec = load_fixture("columns2")
    for n in range(1, 5):
        pw = port_walk_graph(spec, n)
        cyc = pw.non_winding
        assert cyc is not None and len(cyc) == 2
        assert sorted(pw.crossed_edges(cyc)) == ["a", "c"]
        assert not pw.common_vertices(cyc)
        for k in range(len(cyc)):
            replay_arc(pw, cyc[k], cyc[(k + 1) % len(cyc)])


def test_every_arc_replays(spec):
    pw = port_walk_graph(spec, 2)
    for p, succ in enumerate(pw.succ):
        for q in succ:
            replay_arc(pw, p, q)


def test_contraction_outcomes():
    assert contraction_report(load_fixture("pillow2")).status == "CERTIFIED"
    assert contraction_report(load_fixture("barycentric")).status == "CERTIFIED"
    rep = contraction_report(load_fixture("columns2"), 4)
    assert rep.status == "WITNESS"
    assert [ev["level"] for ev in rep.evidence] == [1, 2, 3, 4]
    assert all(ev["length"] == 2 and ev["common_vertices"] == [] for ev in rep.evidence)


def test_unknown_when_no_certificate_and_no_witness():
    rep = contraction_report(load_fixture("triangles3"), 3)
    assert rep.status == "UNKNOWN"


def test_combexp_implies_certified(spec):
    comb = {v.property: v.holds for v in classify_properties(spec)}["CombExp"]
    if comb:
        assert contraction_report(spec, 2).status == "CERTIFIED"


def test_boundary_pairs():
    rep = boundary_pair_report(load_fixture("columns2"), 4)
    assert {"cells": ["edge a", "edge c"], "tile": rep.pairs[0]["tile"]} in rep.pairs
    assert boundary_pair_report(load_fixture("pillow2"), 3).pairs == []
    assert boundary_pair_report(load_fixture("barycentric"), 2).ideal_vertices == ["A", "B", "C"]


def test_esep_certified_means_no_edge_pairs(spec):
    v = {x.property: x for x in classify_properties(spec)}["Esep"]
    if v.holds:
        rep = boundary_pair_report(spec, v.certified_level)
        assert not [p for p in rep.pairs if all(c.startswith("edge") for c in p["cells"])]


def test_port_graph_dict():
    d = port_walk_graph(load_fixture("columns2"), 1).to_dict()
    assert d["non_winding_cycle"]["crossed"] in (["c", "a"], ["a", "c"])
    assert d["cycle_cap"] == 8
