import pytest

from fsrlab import (
    build_separation_graph,
    check_bounded_valence,
    check_esub,
    check_separation,
    classify_properties,
    crosscheck_at_bound,
    load_fixture,
)
from fsrlab.analyzers import KINDS, kl2_bound, normalize_property, shortest_cycle
from fsrlab.library import fixture_expected


def esub_oracle(spec, max_level=12):
    """Expand subdivision words symbolically; level at which each edge first has ≥ 2 pieces."""
    words = {e.id: [(d.edge, d.sign) for d in e.images] for e in spec.edge_types}
    out = {}
    for e in spec.edge_types:
        word = [(e.id, 1)]
        for n in range(1, max_level + 1):
            word = [x for edge, _ in word for x in words[edge]]
            if len(word) >= 2:
                out[e.id] = n
                break
        else:
            out[e.id] = None
    return out


def test_expected_verdicts(fixture_name, spec):
    expected = fixture_expected(fixture_name)["properties"]
    got = {v.property: v.holds for v in classify_properties(spec)}
    got["BoundedValence"] = check_bounded_valence(spec)[0].holds
    assert got == expected


def test_esub_against_word_expansion(spec):
    oracle = esub_oracle(spec)
    v = check_esub(spec)
    assert v.holds == all(x is not None for x in oracle.values())
    assert v.details["levels"] == {e: n for e, n in oracle.items() if n is not None}
    if v.holds:
        assert v.certified_level == max(oracle.values())


def test_columns2_esub_witness():
    v = check_esub(load_fixture("columns2"))
    assert not v.holds
    assert v.witness == ["d"]  # b is absorbed into the never-splitting d
    assert set(v.details["never_subdivided"]) == {"b", "d"}


def test_columns2_esep_witness():
    v = check_separation(load_fixture("columns2"), "EE")
    assert not v.holds
    assert v.witness == ["(P,c#0,a#2)"]
    assert v.details["cycle_length"] == 1


def test_triangles3_esep_vacuous():
    v = check_separation(load_fixture("triangles3"), "EE")
    assert v.holds and v.details["vacuous"] and v.details["nodes"] == 0


def test_triangles3_vsep_three_cycle():
    v = check_separation(load_fixture("triangles3"), "VV")
    assert not v.holds and len(v.witness) == 3


@pytest.mark.parametrize("kind", KINDS)
def test_kl2_bound(rule, kind):
    assert len(build_separation_graph(rule, kind).nodes) <= kl2_bound(rule)


@pytest.mark.parametrize("kind", KINDS)
def test_graph_labels_and_arcs(spec, kind):
    g = build_separation_graph(spec, kind)
    assert len(g.labels) == len(g.nodes)
    assert all(0 <= a < len(g.nodes) and 0 <= b < len(g.nodes) for a, b, _ in g.arcs)


@pytest.mark.parametrize("prop", ["Esub", "Esep", "Vsep", "VEsep", "BoundedValence", "CombExp", "M0comb"])
def test_crosscheck_agrees(spec, prop):
    rep = crosscheck_at_bound(spec, prop, 3)
    assert rep.agree, rep.mismatches
    assert rep.levels_checked


def test_glued_reading_only_restricts():
    for name in ("pillow2", "columns2", "barycentric", "triangles3"):
        spec = load_fixture(name)
        for kind in KINDS:
            model = build_separation_graph(spec, kind)
            glued = build_separation_graph(spec, kind, glued=True)
            assert glued.nodes == model.nodes
            assert set(glued.sources) <= set(model.sources)
            if check_separation(spec, kind).holds:
                assert check_separation(spec, kind, glued=True).holds


def test_relations(spec):
    v = {x.property: x for x in classify_properties(spec)}
    assert not v["Vsep"].holds or v["Esub"].holds
    assert not v["CombExp"].holds or v["M0comb"].holds
    assert v["M0comb"].holds == (v["Esub"].holds and v["Esep"].holds)
    assert v["CombExp"].holds == (v["Esep"].holds and v["VEsep"].holds and v["Vsep"].holds)


def test_bounded_valence_ideal_vertices():
    assert check_bounded_valence(load_fixture("barycentric"))[1] == ["A", "B", "C"]
    verdict, ideal = check_bounded_valence(load_fixture("pillow2"))
    assert verdict.holds and ideal == []


def test_shortest_cycle_tie_break():
    succ = [[1], [0], [3], [2]]
    assert shortest_cycle(succ) == [0, 1]
    assert shortest_cycle([[1], [2], []]) is None
    assert shortest_cycle([[0, 1], [1]]) == [0]


def test_normalize_property():
    assert normalize_property("esep") == "Esep"
    assert normalize_property("combexp") == "CombExp"
    with pytest.raises(ValueError):
        normalize_property("nope")


def test_verdict_dict():
    d = check_separation(load_fixture("columns2"), "EE").to_dict()
    assert d["schema"] == "verdict.v1" and d["holds"] is False and d["witness"]
