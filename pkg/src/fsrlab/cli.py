"""Command-line front end.

Exit codes: 0 when every reported property holds / the probe passes or is
certified / the outcome is unknown, 1 when a property fails or a violation
or witness is found, 2 on input and usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .analyzers import (
    KINDS,
    PROPERTIES,
    build_separation_graph,
    check_bounded_valence,
    check_esub,
    check_separation,
    classify_properties,
    crosscheck_at_bound,
    normalize_property,
)
from .contraction import boundary_pair_report, contraction_report, port_walk_graph
from .engine import BudgetExceeded, find_returning_tile, get_tower
from .graphs import FLAVORS, build_subdivision_graph, rushton_probe
from .library import fixture_names, fixture_text
from .model import FsrParseError, parse_fsr
from .render import LAYOUTS, RenderOptions, port_walk_dot, rule_svg, separation_dot, subdivision_graph_dot
from .reports import complex_text, complex_to_dict
from .validate import InvalidRuleError, compile_rule, validate_fsr

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
_SEP_PROPERTY = {"Esep": "EE", "Vsep": "VV", "VEsep": "VE"}


class InputError(Exception):
    """Bad input file or option combination (exit code 2)."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors print full help, exit 2
        self.print_help(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _read_rule_text(source: str) -> str:
    """A path, or the name of a bundled rule (``pillow2`` or ``pillow2.fsr``)."""
    path = Path(source)
    if path.is_file():
        return path.read_text(encoding="utf-8")
    stem = path.name[:-4] if path.name.endswith(".fsr") else path.name
    if stem in fixture_names() and path.parent == Path("."):
        return fixture_text(stem)
    raise InputError(f"no such file: {source} (bundled rules: {', '.join(fixture_names())})")


def _load(source: str):
    spec = parse_fsr(_read_rule_text(source))
    report = validate_fsr(spec)
    if not report.ok:
        raise InvalidRuleError(report)
    return spec


def _emit(args, text: str) -> None:
    out = getattr(args, "output", None)
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


# ---------------------------------------------------------------------------
# commands


def cmd_validate(args) -> int:
    spec = parse_fsr(_read_rule_text(args.file))
    report = validate_fsr(spec)
    if args.json:
        _emit(args, _dump({"rule": spec.name, **report.to_dict()}))
    else:
        lines = [f"{spec.name}: {'ok' if report.ok else 'INVALID'}"]
        if report.euler is not None:
            V, E, F = report.euler
            lines.append(f"  (V,E,F) = ({V},{E},{F}), euler characteristic {V - E + F}")
        for f in report.findings:
            lines.append(f"  {f.severity}: [{f.code}] {f.location}: {f.message}")
        _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK if report.ok else EXIT_INPUT


def cmd_subdivide(args) -> int:
    spec = _load(args.file)
    rule = compile_rule(spec)
    if args.level < 0:
        raise InputError("--level must be ≥ 0")
    if args.tile is not None:
        try:
            rule.tile_index(args.tile)
        except (KeyError, ValueError):
            raise InputError(f"unknown tile type {args.tile!r}; have {', '.join(rule.tile_ids)}") from None
    if args.emit == "svg":
        _emit(args, rule_svg(rule, RenderOptions("svg", args.layout, args.level, args.tile)))
        return EXIT_OK
    tower = get_tower(rule)
    cx = tower.sphere(args.level) if args.tile is None else tower.tile(args.tile, args.level)
    _emit(args, _dump(complex_to_dict(cx)) if args.emit == "json" else complex_text(cx))
    return EXIT_OK


def _verdict_line(v) -> str:
    if v.holds:
        lvl = f" (certified at level {v.certified_level})" if v.certified_level is not None else ""
        extra = " [vacuous]" if v.details.get("vacuous") else ""
        return f"  {v.property:<15} holds{lvl}{extra}"
    return f"  {v.property:<15} FAILS  witness: {' -> '.join(v.witness or [])}"


def cmd_analyze(args) -> int:
    if args.dot and args.json:
        raise InputError("--dot and --json are mutually exclusive")
    spec = _load(args.file)
    rule = compile_rule(spec)
    if args.dot:
        _emit(args, separation_dot(build_separation_graph(rule, args.dot, args.glued), rule))
    props = [normalize_property(args.property)] if args.property else None
    bv, ideal = check_bounded_valence(rule)
    if props is None:
        verdicts = classify_properties(rule, args.glued)
    elif props[0] == "BoundedValence":
        verdicts = [bv]
    elif props[0] in _SEP_PROPERTY:
        verdicts = [check_separation(rule, _SEP_PROPERTY[props[0]], args.glued)]
    elif props[0] == "Esub":
        verdicts = [check_esub(rule)]
    else:
        verdicts = [v for v in classify_properties(rule, args.glued) if v.property == props[0]]
    crosschecks = []
    if args.crosscheck is not None:
        for v in verdicts:
            crosschecks.append(crosscheck_at_bound(rule, v.property, args.crosscheck))
    failed = any(not v.holds for v in verdicts) or any(not c.agree for c in crosschecks)
    if args.dot:
        return EXIT_FAIL if failed else EXIT_OK
    if args.json:
        doc = {
            "schema": "verdict.v1",
            "rule": spec.name,
            "glued": bool(args.glued),
            "verdicts": [v.to_dict() for v in verdicts],
            "ideal_vertices": ideal,
            "returning_tile": find_returning_tile(rule).to_dict(),
        }
        if crosschecks:
            doc["crosscheck"] = [c.to_dict() for c in crosschecks]
        _emit(args, _dump(doc))
    else:
        reading = "glued" if args.glued else "model"
        lines = [f"{spec.name}: properties ({reading} reading)"]
        lines += [_verdict_line(v) for v in verdicts]
        lines.append(f"  ideal vertices: {', '.join(ideal) if ideal else 'none'}")
        for c in crosschecks:
            state = "agree" if c.agree else "DISAGREE"
            part = " (partial: budget exceeded)" if c.partial else ""
            lines.append(f"  crosscheck {c.property}: levels {c.levels_checked} {state}{part}")
            for m in c.mismatches[:5]:
                lines.append(f"    mismatch: {m}")
        _emit(args, "\n".join(lines) + "\n")
    return EXIT_FAIL if failed else EXIT_OK


def cmd_graph(args) -> int:
    spec = _load(args.file)
    if args.levels < -1:
        raise InputError("--levels must be ≥ -1")
    g = build_subdivision_graph(spec, args.levels, args.flavor)
    if args.emit == "dot":
        _emit(args, subdivision_graph_dot(g))
    else:
        lines = [f"{spec.name}: {args.flavor} path subdivision graph, levels -1..{args.levels}"]
        for m in range(-1, args.levels + 1):
            lines.append(f"  level {m}: {g.n_vertices(m)} vertices, {len(g.horizontal_edges(m))} horizontal edges")
        _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK


def _probe_out(args, spec, report, text_lines) -> int:
    doc = {**report.to_dict(), "rule": spec.name}
    if args.json:
        _emit(args, _dump(doc))
    else:
        _emit(args, "\n".join(text_lines) + "\n")
    return EXIT_FAIL if report.status in ("VIOLATION", "WITNESS") else EXIT_OK


def cmd_probe_rushton(args) -> int:
    spec = _load(args.file)
    try:
        rep = rushton_probe(spec, args.M, args.n, args.depth, limit=args.limit)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    lines = [f"{spec.name}: rushton M={args.M} n={args.n} depth={args.depth}: {rep.status}"]
    for lv in rep.details["levels"]:
        lines.append(f"  m={lv['m']}: {lv['far_pairs']} far ordered pairs, {lv['violations']} violating lifts")
    for ev in rep.evidence[:10]:
        lines.append(
            "  violation: m={m} u={u} v={v} lifts ({u_lift},{v_lift}) δ_m={delta_m} δ_m+n={delta_m_plus_n}".format(**ev)
        )
    return _probe_out(args, spec, rep, lines)


def cmd_probe_contraction(args) -> int:
    spec = _load(args.file)
    if args.max_n < 1:
        raise InputError("--max-n must be ≥ 1")
    rep = contraction_report(spec, args.max_n)
    if args.dot is not None:
        _emit(args, port_walk_dot(port_walk_graph(spec, args.dot)))
        return EXIT_FAIL if rep.status == "WITNESS" else EXIT_OK
    lines = [f"{spec.name}: contraction (levels ≤ {args.max_n}): {rep.status}", f"  {rep.details['reason']}"]
    for ev in rep.evidence:
        if "crossed" in ev:
            lines.append(f"  level {ev['level']}: non-winding cycle of length {ev['length']} crossing {', '.join(ev['crossed'])}")
        elif "property" in ev:
            lines.append(f"  {ev['property']}: holds, certified at level {ev['certified_level']}")
        else:
            lines.append(f"  level {ev['level']}: no non-winding cycle")
    return _probe_out(args, spec, rep, lines)


def cmd_probe_boundary(args) -> int:
    spec = _load(args.file)
    rep = boundary_pair_report(spec, args.depth)
    if args.json:
        _emit(args, _dump({"rule": spec.name, **rep.to_dict()}))
    else:
        lines = [f"{spec.name}: disjoint level-0 cells met by one level-{args.depth} tile"]
        lines += [f"  {p['cells'][0]} / {p['cells'][1]} (tile {p['tile']})" for p in rep.pairs] or ["  none"]
        lines.append(f"  ideal vertices: {', '.join(rep.ideal_vertices) if rep.ideal_vertices else 'none'}")
        _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_fixtures(args) -> int:
    if args.action == "list":
        _emit(args, "".join(f"{n}\n" for n in fixture_names()))
        return EXIT_OK
    if not args.name:
        raise InputError("fixtures emit needs a fixture name")
    try:
        _emit(args, fixture_text(args.name))
    except KeyError as exc:
        raise InputError(exc.args[0]) from None
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="fsrlab", description="Finite subdivision rule engine.")
    p.add_argument("--version", action="version", version=f"fsrlab {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_):
        sp = sub.add_parser(name, help=help_, description=help_)
        sp.set_defaults(func=func)
        return sp

    def common(sp, json_flag=True):
        sp.add_argument("file", help="rule file (.fsr) or the name of a bundled rule")
        if json_flag:
            sp.add_argument("--json", action="store_true", help="machine-readable output")
        sp.add_argument("-o", "--output", help="write to this file instead of stdout")

    sp = add("validate", cmd_validate, "check a rule file; exit 2 when invalid")
    common(sp)

    sp = add("subdivide", cmd_subdivide, "subdivide the sphere or one tile type")
    common(sp, json_flag=False)
    sp.add_argument("--level", type=int, required=True)
    sp.add_argument("--tile", help="tile type (default: the whole sphere)")
    sp.add_argument("--emit", choices=("json", "svg", "text"), default="text")
    sp.add_argument("--layout", choices=LAYOUTS, default="tutte", help="svg layout")

    sp = add("analyze", cmd_analyze, "decide expansion properties")
    common(sp)
    sp.add_argument("--property", help=f"one of {', '.join(PROPERTIES)} (case-insensitive)")
    sp.add_argument("--crosscheck", type=int, metavar="N", help="brute-force comparison up to level N")
    sp.add_argument("--dot", choices=KINDS, help="emit the separation graph of this kind as DOT")
    sp.add_argument("--glued", action="store_true", help="read disjointness after gluing identifications")

    sp = add("graph", cmd_graph, "build a path subdivision graph")
    common(sp, json_flag=False)
    sp.add_argument("--levels", type=int, required=True)
    sp.add_argument("--flavor", choices=FLAVORS, default="fat")
    sp.add_argument("--emit", choices=("dot", "text"), default="text")

    sp = add("probe", None, "bounded-depth probes")
    # the rule file comes before the probe name: ``probe FILE rushton ...``
    sp.add_argument("file", help="rule file (.fsr) or the name of a bundled rule")
    psub = sp.add_subparsers(dest="probe", required=True, parser_class=_Parser)
    r = psub.add_parser("rushton", help="Rushton hyperbolicity criterion")
    r.set_defaults(func=cmd_probe_rushton)
    r.add_argument("--M", type=int, required=True)
    r.add_argument("--n", type=int, required=True)
    r.add_argument("--depth", type=int, required=True)
    r.add_argument("--limit", type=int, default=20, help="violations to report")
    c = psub.add_parser("contraction", help="contraction certificate or witness")
    c.set_defaults(func=cmd_probe_contraction)
    c.add_argument("--max-n", type=int, default=4)
    c.add_argument("--dot", type=int, metavar="N", help="emit the level-N port walk graph as DOT")
    b = psub.add_parser("boundary", help="persistent pairs of disjoint level-0 cells")
    b.set_defaults(func=cmd_probe_boundary)
    b.add_argument("--depth", type=int, required=True)
    for q in (r, c, b):
        q.add_argument("--json", action="store_true", help="machine-readable output")
        q.add_argument("-o", "--output", help="write to this file instead of stdout")

    sp = add("fixtures", cmd_fixtures, "list or print bundled rules")
    sp.add_argument("action", choices=("list", "emit"))
    sp.add_argument("name", nargs="?")
    sp.add_argument("-o", "--output", help="write to this file instead of stdout")
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FsrParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
    except InvalidRuleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        for f in exc.report.findings:
            print(f"  {f.severity}: [{f.code}] {f.location}: {f.message}", file=sys.stderr)
    except BudgetExceeded as exc:
        print(f"error: {exc} (raise FSRLAB_CELL_BUDGET to allow more)", file=sys.stderr)
    except (InputError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
    return EXIT_INPUT


def run_cli(argv: list[str]) -> int:
    return main(argv)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
