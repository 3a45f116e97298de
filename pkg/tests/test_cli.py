import json

import jsonschema
import pytest

from fsrlab.cli import main
from fsrlab.library import fixture_text
from fsrlab.reports import load_schema


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def validate_doc(doc):
    jsonschema.validate(doc, load_schema(doc["schema"]))


@pytest.fixture
def bad_file(tmp_path):
    text = fixture_text("pillow2").replace("image P rot 2", "image P rot 1", 1)
    path = tmp_path / "bad.fsr"
    path.write_text(text)
    return str(path)


def test_analyze_pillow2(capsys):
    code, out, _ = run(capsys, "analyze", "pillow2.fsr", "--json")
    assert code == 0
    doc = json.loads(out)
    validate_doc(doc)
    assert {v["property"]: v["holds"] for v in doc["verdicts"]}["CombExp"] is True


def test_analyze_columns2_esep(capsys):
    code, out, _ = run(capsys, "analyze", "columns2.fsr", "--property", "esep")
    assert code == 1
    assert "(P,c#0,a#2)" in out


def test_validate_bad(capsys, bad_file):
    code, out, _ = run(capsys, "validate", bad_file)
    assert code == 2
    assert "face-rotation" in out


def test_analyze_bad_file_is_input_error(capsys, bad_file):
    code, _, err = run(capsys, "analyze", bad_file)
    assert code == 2 and "face-rotation" in err


def test_syntax_error(capsys, tmp_path):
    p = tmp_path / "x.fsr"
    p.write_text("fsr x\nvertex A\nedge a : A => A\n")
    code, _, err = run(capsys, "validate", str(p))
    assert code == 2 and "3:" in err


def test_missing_file(capsys):
    code, _, err = run(capsys, "analyze", "does/not/exist.fsr")
    assert code == 2 and "no such file" in err


def test_usage_error_prints_help(capsys):
    with pytest.raises(SystemExit) as info:
        main(["probe", "pillow2", "rushton", "--M", "3"])
    assert info.value.code == 2
    assert "usage" in capsys.readouterr().err


def test_exit_codes_stable_across_reruns(capsys):
    cases = [
        ["analyze", "columns2"],
        ["analyze", "barycentric", "--property", "boundedvalence"],
        ["probe", "columns2", "contraction", "--max-n", "3"],
        ["probe", "pillow2", "rushton", "--M", "3", "--n", "1", "--depth", "3"],
    ]
    for argv in cases:
        first = run(capsys, *argv)
        assert run(capsys, *argv) == first
    assert [run(capsys, *argv)[0] for argv in cases] == [1, 1, 1, 0]


@pytest.mark.parametrize(
    "argv, code",
    [
        (["probe", "pillow2", "contraction", "--max-n", "2", "--json"], 0),
        (["probe", "columns2", "contraction", "--max-n", "2", "--json"], 1),
        (["probe", "triangles3", "contraction", "--max-n", "2", "--json"], 0),
        (["probe", "pillow2", "rushton", "--M", "3", "--n", "1", "--depth", "3", "--json"], 0),
        (["probe", "triangles3", "rushton", "--M", "3", "--n", "1", "--depth", "5", "--json"], 1),
    ],
)
def test_probe_reports_schema_valid(capsys, argv, code):
    got, out, _ = run(capsys, *argv)
    doc = json.loads(out)
    validate_doc(doc)
    assert got == code
    assert (doc["status"] in ("VIOLATION", "WITNESS")) == (code == 1)


@pytest.mark.parametrize("name", ["pillow2", "columns2", "barycentric", "triangles3"])
def test_analysis_reports_schema_valid(capsys, name):
    code, out, _ = run(capsys, "analyze", name, "--json", "--crosscheck", "2")
    doc = json.loads(out)
    validate_doc(doc)
    assert code == (0 if all(v["holds"] for v in doc["verdicts"]) else 1)


@pytest.mark.parametrize("tile", [None, "P"])
def test_subdivide_json_schema_valid(capsys, tile):
    argv = ["subdivide", "pillow2", "--level", "2", "--emit", "json"] + (["--tile", tile] if tile else [])
    code, out, _ = run(capsys, *argv)
    doc = json.loads(out)
    validate_doc(doc)
    assert code == 0
    assert doc["census"]["euler"] == (2 if tile is None else 1)


def test_subdivide_svg_to_file(capsys, tmp_path):
    out = tmp_path / "p.svg"
    code, _, _ = run(capsys, "subdivide", "pillow2", "--level", "1", "--tile", "P", "--emit", "svg", "-o", str(out))
    assert code == 0 and out.read_text().count("<polygon") == 4


def test_subdivide_unknown_tile(capsys):
    code, _, err = run(capsys, "subdivide", "pillow2", "--level", "1", "--tile", "Z")
    assert code == 2 and "unknown tile" in err


def test_graph_dot(capsys):
    code, out, _ = run(capsys, "graph", "pillow2", "--levels", "1", "--emit", "dot")
    assert code == 0 and out.startswith("graph")


def test_analyze_dot(capsys):
    code, out, _ = run(capsys, "analyze", "columns2", "--property", "esep", "--dot", "EE")
    assert code == 1 and out.startswith("digraph") and "red" in out


def test_probe_boundary(capsys):
    code, out, _ = run(capsys, "probe", "columns2", "boundary", "--depth", "3")
    assert code == 0 and "edge a / edge c" in out


def test_fixtures_commands(capsys, tmp_path):
    code, out, _ = run(capsys, "fixtures", "list")
    assert code == 0 and out.split() == ["barycentric", "columns2", "pillow2", "triangles3"]
    code, out, _ = run(capsys, "fixtures", "emit", "columns2")
    assert code == 0 and out == fixture_text("columns2")
    code, _, err = run(capsys, "fixtures", "emit", "nope")
    assert code == 2 and "pillow2" in err


def test_budget_error(capsys, monkeypatch):
    monkeypatch.setenv("FSRLAB_CELL_BUDGET", "100")
    code, _, err = run(capsys, "subdivide", "barycentric", "--level", "3")
    assert code == 2 and "FSRLAB_CELL_BUDGET" in err
