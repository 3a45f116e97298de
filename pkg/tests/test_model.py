import pytest

from fsrlab import parse_fsr, serialize_fsr
from fsrlab.library import fixture_text, load_fixture
from fsrlab.model import DirectedEdge, FsrReferenceError, FsrSyntaxError

MINI = """fsr mini
vertex A
edge a : A -> A
edge a subdivides [+a A +a]
"""


def test_minimal_chain_word():
    spec = parse_fsr(MINI)
    (a,) = spec.edge_types
    assert a.pieces == 2
    assert a.points == ("A",)
    assert a.images == (DirectedEdge("a", 1), DirectedEdge("a", 1))


def test_pillow2_declaration_counts():
    spec = load_fixture("pillow2")
    assert (len(spec.vertex_types), len(spec.edge_types), len(spec.tile_types)) == (4, 4, 2)


def test_directed_edge_text():
    d = DirectedEdge.parse("-b")
    assert (d.edge, d.sign, str(d), str(d.reversed())) == ("b", -1, "-b", "+b")


@pytest.mark.parametrize("name", ["pillow2", "columns2", "barycentric", "triangles3"])
def test_round_trip(name):
    spec = load_fixture(name)
    text = serialize_fsr(spec)
    again = parse_fsr(text)
    assert again == spec
    assert serialize_fsr(again) == text


def test_serialize_is_canonical_after_one_pass():
    raw = fixture_text("columns2")
    once = serialize_fsr(parse_fsr(raw))
    assert serialize_fsr(parse_fsr(once)) == once


def test_weight_hint_round_trip():
    spec = parse_fsr(MINI.replace("vertex A", "vertex A:finite"))
    assert spec.vertex_types[0].weight_hint == "finite"
    assert parse_fsr(serialize_fsr(spec)) == spec


@pytest.mark.parametrize(
    "text, exc, fragment",
    [
        (MINI.replace("edge a : A -> A", "edge a : A -> Z"), FsrReferenceError, "unknown vertex"),
        (MINI + "edge a : A -> A\n", FsrReferenceError, "duplicate"),
        (MINI.replace("[+a A +a]", "[+a A +q]"), FsrReferenceError, "unknown edge"),
        (MINI + "bogus x\n", FsrSyntaxError, "keyword"),
        (MINI.replace("->", "=>"), FsrSyntaxError, ""),
        (MINI.replace("fsr mini\n", ""), FsrSyntaxError, "header"),
        (MINI.replace("vertex A", "vertex A:heavy"), FsrSyntaxError, "weight hint"),
        (MINI + "tile T : [ +a A +a A +b A ]\n", FsrReferenceError, "unknown edge"),
    ],
)
def test_parse_errors(text, exc, fragment):
    with pytest.raises(exc) as info:
        parse_fsr(text)
    assert fragment in str(info.value)


def test_parse_error_reports_position():
    with pytest.raises(FsrSyntaxError) as info:
        parse_fsr(MINI + "edge b : A -> A\nedge b subdivides [ +b ! ]\n")
    assert info.value.line == 6
    assert info.value.col > 1


def test_unknown_keyword_inside_scheme_rejected():
    text = fixture_text("pillow2").replace("interior z : B", "interior z : B\n  colour z : red", 1)
    with pytest.raises(FsrSyntaxError):
        parse_fsr(text)


def test_bad_slot_reference_is_an_error_not_a_crash():
    text = fixture_text("pillow2").replace("side a = (P, slot 2)", "side a = (P, slot 9)")
    with pytest.raises(FsrReferenceError):
        parse_fsr(text)
