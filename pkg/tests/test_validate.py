from types import SimpleNamespace

import pytest

from fsrlab import InvalidRuleError, compile_rule, parse_fsr, validate_fsr
from fsrlab.library import fixture_text, load_fixture
from fsrlab.validate import ValidationReport, _local_degrees

TWO_GON = """fsr two
vertex A B
edge a : A -> B
edge b : B -> A
edge a subdivides [ +a ]
edge b subdivides [ +b ]
tile P : [ +a B +b A ]
tile Q : [ -b B -a A ]
subdivision P {
  edge x : corner 1 -> corner 0 image +a
  edge y : corner 0 -> corner 1 image +b
  face f : [ +x +y ] image P rot 0
}
subdivision Q {
  edge x : corner 1 -> corner 0 image -b
  edge y : corner 0 -> corner 1 image -a
  face f : [ +x +y ] image Q rot 0
}
sphere {
  side a = (P, slot 0), (Q, slot 1)
  side b = (P, slot 1), (Q, slot 0)
}
"""


def codes(text):
    return {f.code for f in validate_fsr(parse_fsr(text)).errors}


def test_fixtures_valid(spec):
    report = validate_fsr(spec)
    assert report.ok, report.findings
    assert not report.errors


def test_pillow2_euler():
    report = validate_fsr(load_fixture("pillow2"))
    assert report.euler == (4, 4, 2)


def test_sides_count_twice_edges(rule):
    assert sum(rule.tile_size) == 2 * rule.n_edges


def test_two_gon_rejected():
    report = validate_fsr(parse_fsr(TWO_GON))
    assert not report.ok
    assert any(f.message == "tile must have ≥ 3 vertices" for f in report.errors)


def test_reflection_rejected():
    text = fixture_text("pillow2").replace(
        "face LL : [ +p0a +v1 -h1 +p3b ] image P rot 0", "face LL : [ +p0a +v1 -h1 +p3b ] image Q rot 0"
    )
    report = validate_fsr(parse_fsr(text))
    assert [f.code for f in report.errors] == ["orientation-reversed"]
    assert "orientation reversed" in report.errors[0].message


def test_wrong_rotation_rejected():
    text = fixture_text("pillow2").replace(
        "face UR : [ +h2 +p1b +p2a -v2 ] image P rot 2", "face UR : [ +h2 +p1b +p2a -v2 ] image P rot 1"
    )
    report = validate_fsr(parse_fsr(text))
    assert [f.code for f in report.errors] == ["face-rotation"]
    assert "wrong rotation offset" in report.errors[0].message


def test_boundary_word_mismatch():
    text = fixture_text("pillow2").replace("edge p0a : corner 3 -> bp 0.1 image +c", "edge p0a : corner 3 -> bp 0.1 image -c", 1)
    assert "edge-image" in codes(text)


def test_gluing_orientation():
    text = fixture_text("pillow2").replace("tile Q : [ -c D -d A +a B +b C ]", "tile Q : [ +c D -d A +a B +b C ]")
    assert codes(text)


def test_missing_gluing_side():
    text = fixture_text("columns2").replace("  side d = (P, slot 3), (Q, slot 1)\n", "")
    assert "gluing-missing" in codes(text) or "gluing-slot" in codes(text)


def test_open_face_rejected():
    text = fixture_text("columns2").replace("face L : [ +p0a +m +p2b +p3 ]", "face L : [ +p0a +m +p3 ]", 1)
    assert not validate_fsr(parse_fsr(text)).ok


def test_interior_edge_reused_rejected():
    text = fixture_text("columns2").replace("face R : [ +p0b +p1 +p2a -m ]", "face R : [ +p0b +p1 +p2a +m ]", 1)
    assert not validate_fsr(parse_fsr(text)).ok


def test_non_integral_local_degree():
    # a corner with three level-1 edge ends over a vertex of valence two
    spec = SimpleNamespace(vertex_ids=["A", "B"], edge_ids=["a", "b"])
    parts = {"edge_tail": [0, 1], "edge_head": [1, 0], "corner": [[0, 1]], "vmap": [0, 1]}
    scheme = SimpleNamespace(int_edges=[(("c", 0), ("b", 1, 1), 0)])
    report = ValidationReport()
    degrees = _local_degrees(spec, parts, [scheme], report)
    assert [f.code for f in report.errors] == ["local-degree"]
    assert degrees[1] == 1


def test_weight_hint_mismatch_is_a_warning():
    text = fixture_text("barycentric").replace("vertex A B C", "vertex A:finite B C", 1)
    report = validate_fsr(parse_fsr(text))
    assert report.ok
    assert [f.code for f in report.findings] == ["weight-hint"]


def test_compile_rejects_invalid():
    with pytest.raises(InvalidRuleError) as info:
        compile_rule(parse_fsr(TWO_GON))
    assert info.value.report.errors


def test_report_dict():
    d = validate_fsr(load_fixture("columns2")).to_dict()
    assert d["ok"] is True and d["findings"] == []
