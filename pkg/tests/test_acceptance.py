"""Acceptance suite: one test per criterion, each within its time limit."""

import io
import json
import random
import time
from contextlib import redirect_stderr, redirect_stdout

import numpy as np

from fsrlab import (
    build_separation_graph,
    build_subdivision_graph,
    census,
    check_separation,
    classify_properties,
    compile_rule,
    contraction_report,
    crosscheck_at_bound,
    find_returning_tile,
    get_tower,
    load_fixture,
    parse_fsr,
    port_walk_graph,
    rushton_probe,
    serialize_fsr,
    validate_fsr,
)
from fsrlab.analyzers import KINDS, boundary_slots, kl2_bound, violating_triples
from fsrlab.cli import main
from fsrlab.engine import iterate_image, iterate_parent
from fsrlab.random_rules import random_rules

FIXTURES = ("pillow2", "columns2", "barycentric", "triangles3")
PROPERTY_OF = {"EE": "Esep", "VV": "Vsep", "VE": "VEsep"}


def test_criterion_1_kl2_bound(record_criterion):
    worst = 0.0
    ok = True
    for name in FIXTURES:
        t0 = time.perf_counter()
        rule = compile_rule(load_fixture(name))
        bound = kl2_bound(rule)
        for kind in KINDS:
            ok &= len(build_separation_graph(rule, kind).nodes) <= bound
            ok &= len(build_separation_graph(rule, kind, glued=True).nodes) <= bound
        worst = max(worst, time.perf_counter() - t0)
    passed = ok and worst < 1.0
    record_criterion(1, passed, f"|nodes| <= kl^2 for all fixtures and kinds, slowest fixture {worst:.3f}s (< 1s)")
    assert passed


def test_criterion_2_witness_replay(record_criterion):
    t0 = time.perf_counter()
    replayed = 0
    ok = True
    for name in FIXTURES:
        spec = load_fixture(name)
        for kind in KINDS:
            v = check_separation(spec, kind)
            if v.holds:
                continue
            rep = crosscheck_at_bound(spec, PROPERTY_OF[kind], len(v.witness))
            tile = rep.claim.get("violating_tile")
            ok &= tile is not None and tile["level"] == len(v.witness)
            replayed += 1
    # the edge-separation witness of columns2 meets subedges of a and c in R^1(P)
    spec = load_fixture("columns2")
    rule = compile_rule(spec)
    rep = crosscheck_at_bound(spec, "Esep", 1)
    tile = rep.claim["violating_tile"]
    cx = get_tower(rule).tile("P", 1)
    slots = boundary_slots(cx)
    p = rule.tile_index("P")
    met = {rule.edge_ids[rule.slot_edge[p][slots[e]]] for e in cx.fedges[tile["face"]] if e in slots}
    ok &= tile["tile"] == "P" and tile["level"] == 1 and {"a", "c"} <= met
    elapsed = time.perf_counter() - t0
    passed = ok and replayed > 0 and elapsed < 5.0
    record_criterion(2, passed, f"{replayed} false separation verdicts replayed at cycle length, {elapsed:.2f}s (< 5s)")
    assert passed


def test_criterion_3_true_verdict_brute_force(record_criterion):
    t0 = time.perf_counter()
    checked = 0
    ok = True
    for name in FIXTURES:
        rule = compile_rule(load_fixture(name))
        tower = get_tower(rule)
        for kind in KINDS:
            v = check_separation(rule, kind)
            if not v.holds:
                continue
            n_star = v.certified_level
            ok &= n_star <= 4
            for t in range(rule.n_tiles):
                ok &= not violating_triples(rule, kind, t, tower.tile(t, n_star))
            checked += 1
    elapsed = time.perf_counter() - t0
    passed = ok and checked > 0 and elapsed < 30.0
    record_criterion(3, passed, f"{checked} true verdicts show no violation at n*, {elapsed:.2f}s (< 30s)")
    assert passed


def test_criterion_4_theorem_consistency(record_criterion):
    t0 = time.perf_counter()
    specs = [load_fixture(n) for n in FIXTURES] + random_rules(50, seed=2024)
    violations = []
    for spec in specs:
        if not validate_fsr(spec).ok:
            violations.append((spec.name, "invalid spec"))
            continue
        v = {x.property: x.holds for x in classify_properties(spec)}
        if v["Vsep"] and not v["Esub"]:
            violations.append((spec.name, "Vsep => Esub"))
        if v["CombExp"] and not v["M0comb"]:
            violations.append((spec.name, "CombExp => M0comb"))
        if v["CombExp"] and contraction_report(spec, 2).status != "CERTIFIED":
            violations.append((spec.name, "CombExp => CERTIFIED"))
    elapsed = time.perf_counter() - t0
    passed = not violations
    record_criterion(4, passed, f"{len(specs)} specs, {len(violations)} relation violations, {elapsed:.2f}s")
    assert passed, violations


def test_criterion_5_engine_invariants(record_criterion):
    t0 = time.perf_counter()
    ok = True
    for name in FIXTURES:
        rule = compile_rule(load_fixture(name))
        tower = get_tower(rule)
        children = [[cs.face_type.count(u) for u in range(rule.n_tiles)] for cs in rule.schemes]
        vals = []
        for n in range(5):
            cx = tower.sphere(n)
            ok &= cx.euler_characteristic() == 2
            for t in range(rule.n_tiles):
                ok &= tower.tile(t, n).euler_characteristic() == 1
            vals.append(cx.valences())
            if n:
                before = census(tower.sphere(n - 1)).faces_by_type
                now = census(cx).faces_by_type
                for u, uid in enumerate(rule.tile_ids):
                    ok &= now[uid] == sum(before[rule.tile_ids[t]] * children[t][u] for t in range(rule.n_tiles))
                for v in range(rule.n_vertices):
                    ok &= vals[n][v] == rule.local_degree[v] * vals[n - 1][rule.vmap[v]]
    elapsed = time.perf_counter() - t0
    passed = ok and elapsed < 60.0
    record_criterion(5, passed, f"Euler, census multiplicativity and valence recurrence at levels <= 4, {elapsed:.2f}s (< 60s)")
    assert passed


def test_criterion_6_metric_invariants(record_criterion):
    t0 = time.perf_counter()
    rng = random.Random(6)
    ok = True
    sampled = 0
    for name in FIXTURES:
        spec = load_fixture(name)
        fat = build_subdivision_graph(spec, 4, "fat")
        skinny = build_subdivision_graph(spec, 4, "skinny")
        for m in range(5):
            df, ds = fat.distances(m), skinny.distances(m)
            ok &= bool(np.all((df < 0) | ((ds >= 0) & (df >= ds))))
        for _ in range(1000):
            m = rng.randrange(0, 4)
            n = rng.randrange(m + 1, 5)
            u, v = rng.randrange(fat.n_vertices(n)), rng.randrange(fat.n_vertices(n))
            pu, pv = fat.projection(m, n)[[u, v]]
            high = fat.distances(n)[u, v]
            low = fat.distances(m)[pu, pv]
            ok &= high < 0 or 0 <= low <= high
            sampled += 1
    elapsed = time.perf_counter() - t0
    passed = ok and elapsed < 60.0
    record_criterion(6, passed, f"{sampled} sampled pairs non-expansive, fat >= skinny pointwise, {elapsed:.2f}s (< 60s)")
    assert passed


def test_criterion_7_probe_outcomes(record_criterion):
    t0 = time.perf_counter()
    pillow, columns, bary = load_fixture("pillow2"), load_fixture("columns2"), load_fixture("barycentric")
    ok = contraction_report(pillow).status == "CERTIFIED"
    ok &= contraction_report(bary).status == "CERTIFIED"
    rep = contraction_report(columns, 4)
    ok &= rep.status == "WITNESS"
    for n in range(1, 5):
        pw = port_walk_graph(columns, n)
        ok &= pw.non_winding is not None and len(pw.non_winding) == 2 and not pw.is_winding(pw.non_winding)
    ok &= rushton_probe(columns, 4, 2, 5).status == "PASS_AT_DEPTH"
    ok &= rushton_probe(pillow, 3, 1, 4).status == "PASS_AT_DEPTH"
    elapsed = time.perf_counter() - t0
    passed = ok and elapsed < 120.0
    record_criterion(7, passed, f"contraction and Rushton probe outcomes as expected, {elapsed:.2f}s (< 120s)")
    assert passed


def test_criterion_8_returning_tile(record_criterion):
    t0 = time.perf_counter()
    ok = True
    for name in FIXTURES:
        rule = compile_rule(load_fixture(name))
        ret = find_returning_tile(rule)
        ok &= ret.n <= rule.n_tiles
        get_tower(rule).sphere(ret.n)
        container = iterate_parent(rule, ret.n, ret.witness, ret.n)
        ok &= iterate_image(rule, ret.n, ret.witness, ret.n) == container
        ok &= rule.tile_ids[container] == ret.tile
    elapsed = time.perf_counter() - t0
    passed = ok and elapsed < 5.0
    record_criterion(8, passed, f"returning tiles replayed on level-n complexes, {elapsed:.2f}s (< 5s)")
    assert passed


def _cli(argv):
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = main(argv)
    return code, out.getvalue()


def test_criterion_9_round_trip_and_exit_codes(record_criterion):
    ok = True
    for name in FIXTURES:
        spec = load_fixture(name)
        once = serialize_fsr(spec)
        ok &= parse_fsr(once) == spec and serialize_fsr(parse_fsr(once)) == once
    for name in FIXTURES:
        runs = [_cli(["analyze", name, "--json"]) for _ in range(2)]
        ok &= runs[0] == runs[1]
        code, out = runs[0]
        ok &= code == (0 if all(v["holds"] for v in json.loads(out)["verdicts"]) else 1)
        runs = [_cli(["probe", name, "contraction", "--max-n", "3", "--json"]) for _ in range(2)]
        ok &= runs[0] == runs[1]
        code, out = runs[0]
        ok &= code == (1 if json.loads(out)["status"] in ("VIOLATION", "WITNESS") else 0)
    record_criterion(9, ok, "parse/serialize identity for all fixtures; CLI exit codes match reports across reruns")
    assert ok
