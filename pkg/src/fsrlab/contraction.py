"""Contraction evidence: separation certificate, port-walk witnesses and boundary pairs.

Contraction asks for a bound on the number of level-0 segments of taut
geodesics whose level-0 and level-n decompositions agree.  Such a curve only
crosses edges lying in the level-0 skeleton, and tautness forbids it to
enter and leave a level-n tile through edges lying in the same edge of the
containing level-0 tile.  The port walk graph encodes exactly these moves;
a closed walk in it whose crossed level-0 edges do not all surround one
vertex is a candidate obstruction.  Walks winding around a single vertex
are discounted: around a vertex of finite weight a geodesic cannot wind, and
around a vertex of infinite weight the valence growth rules out equal
decompositions.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .analyzers import check_bounded_valence, check_separation
from .engine import get_tower
from .graphs import ProbeReport
from .model import FsrSpec
from .validate import CompiledRule, compile_rule

__all__ = [
    "PortWalkGraph",
    "port_walk_graph",
    "contraction_report",
    "boundary_pair_report",
    "BoundaryPairReport",
]


@dataclass
class PortWalkGraph:
    """Ports are ``(tile, slot)`` entries through an edge of the level-0 skeleton."""

    rule: CompiledRule = field(repr=False)
    level: int
    ports: list[tuple[int, int]]
    entry_edge: list[int]  # level-0 edge crossed when entering the port
    succ: list[list[int]]
    cap: int
    non_winding: list[int] | None = None
    winding_examples: list[list[int]] = field(default_factory=list)

    @property
    def n_arcs(self) -> int:
        return sum(len(s) for s in self.succ)

    def crossed_edges(self, cycle: list[int]) -> list[str]:
        return [self.rule.edge_ids[self.entry_edge[p]] for p in cycle]

    def describe(self, cycle: list[int]) -> dict:
        return {
            "level": self.level,
            "length": len(cycle),
            "ports": [{"tile": self.ports[p][0], "slot": self.ports[p][1]} for p in cycle],
            "crossed": self.crossed_edges(cycle),
            "common_vertices": sorted(self.rule.vertex_ids[v] for v in self.common_vertices(cycle)),
        }

    def common_vertices(self, cycle: list[int]) -> set[int]:
        rule = self.rule
        common = None
        for p in cycle:
            e = self.entry_edge[p]
            ends = {rule.edge_tail[e], rule.edge_head[e]}
            common = ends if common is None else common & ends
        return common or set()

    def is_winding(self, cycle: list[int]) -> bool:
        return bool(self.common_vertices(cycle))

    def to_dict(self) -> dict:
        return {
            "level": self.level,
            "ports": len(self.ports),
            "arcs": self.n_arcs,
            "cycle_cap": self.cap,
            "non_winding_cycle": None if self.non_winding is None else self.describe(self.non_winding),
            "winding_examples": [self.describe(c) for c in self.winding_examples],
        }


def _build_ports(rule: CompiledRule, cx) -> tuple[list, list, list]:
    ports = []
    index = {}
    for f in range(cx.n_faces):
        for i, e in enumerate(cx.fedges[f]):
            if cx.eroot[e] >= 0:
                index[(f, i)] = len(ports)
                ports.append((f, i))
    entry = [cx.eroot[cx.fedges[f][i]] for f, i in ports]
    succ: list[list[int]] = [[] for _ in ports]
    for p, (f, i) in enumerate(ports):
        root_in = cx.froot[f][i]
        for j, e in enumerate(cx.fedges[f]):
            if j == i or cx.eroot[e] < 0:
                continue
            # tautness: leave through a different edge of the containing level-0 tile
            if cx.froot[f][j] == root_in:
                continue
            for side in cx.edge_sides[e]:
                if side != (f, j):
                    succ[p].append(index[side])
        succ[p] = sorted(set(succ[p]))
    return ports, entry, succ


def _shortest_cycle_from(pw: PortWalkGraph, start: int, need_non_winding: bool) -> list[int] | None:
    rule = pw.rule

    def ends(p):
        e = pw.entry_edge[p]
        return frozenset((rule.edge_tail[e], rule.edge_head[e]))

    s0 = (start, ends(start) if need_non_winding else frozenset())
    prev = {s0: None}
    queue = deque([(s0, 0)])
    while queue:
        state, depth = queue.popleft()
        if depth >= pw.cap:
            continue
        port, common = state
        for w in pw.succ[port]:
            nc = common & ends(w) if need_non_winding else common
            if w == start and (not need_non_winding or not nc):
                path = [port]
                st = state
                while prev[st] is not None:
                    st = prev[st]
                    path.append(st[0])
                return path[::-1]
            nxt = (w, nc)
            if nxt not in prev:
                prev[nxt] = state
                queue.append((nxt, depth + 1))
    return None


def port_walk_graph(spec: FsrSpec | CompiledRule, n: int, cap: int | None = None, examples: int = 5) -> PortWalkGraph:
    """Port walk graph of R^n(S²) with its shortest non-winding cycle (if any).

    Cycles are searched up to length ``cap`` (default twice the number of
    level-n tiles).  Ties between shortest non-winding cycles go to the
    smallest starting port.
    """
    rule = compile_rule(spec)
    cx = get_tower(rule).sphere(n)
    ports, entry, succ = _build_ports(rule, cx)
    pw = PortWalkGraph(rule, n, ports, entry, succ, cap if cap is not None else 2 * cx.n_faces)
    best = None
    for s in range(len(ports)):
        cyc = _shortest_cycle_from(pw, s, need_non_winding=True)
        if cyc is not None and (best is None or len(cyc) < len(best)):
            best = cyc
            if len(best) == 2:  # a non-winding cycle crosses at least two edges
                break
    pw.non_winding = best
    for s in range(len(ports)):
        if len(pw.winding_examples) >= examples:
            break
        cyc = _shortest_cycle_from(pw, s, need_non_winding=False)
        if cyc is not None and pw.is_winding(cyc):
            pw.winding_examples.append(cyc)
    return pw


def contraction_report(spec: FsrSpec | CompiledRule, n_max: int = 4) -> ProbeReport:
    """CERTIFIED by edge and vertex separation, WITNESS by persistent non-winding walks, else UNKNOWN.

    A WITNESS is a candidate obstruction only: whether the walk is a
    geodesic of the orbifold universal cover is not verified.
    """
    rule = compile_rule(spec)
    ee = check_separation(rule, "EE")
    vv = check_separation(rule, "VV")
    params = {"n_max": n_max}
    certs = [
        {"property": v.property, "holds": v.holds, "certified_level": v.certified_level, "witness": v.witness}
        for v in (ee, vv)
    ]
    if ee.holds and vv.holds:
        return ProbeReport("contraction", params, "CERTIFIED", certs, {"reason": "edge and vertex separating"})
    evidence = []
    status = "WITNESS"
    for n in range(1, n_max + 1):
        pw = port_walk_graph(rule, n)
        if pw.non_winding is None:
            status = "UNKNOWN"
            evidence.append({"level": n, "non_winding_cycle": None, "ports": len(pw.ports), "arcs": pw.n_arcs})
            break
        evidence.append(pw.describe(pw.non_winding))
    if n_max < 1:
        status = "UNKNOWN"
    reason = (
        "non-winding taut port walks at every level up to n_max (candidate obstruction)"
        if status == "WITNESS"
        else "no separation certificate and no persistent non-winding port walk"
    )
    return ProbeReport("contraction", params, status, evidence, {"reason": reason, "separation": certs})


@dataclass
class BoundaryPairReport:
    level: int
    pairs: list[dict]
    ideal_vertices: list[str]

    def to_dict(self) -> dict:
        return {"level": self.level, "pairs": self.pairs, "ideal_vertices": self.ideal_vertices}


def boundary_pair_report(spec: FsrSpec | CompiledRule, L: int) -> BoundaryPairReport:
    """Disjoint level-0 cells still met by one level-L tile.

    A tile meets a vertex when the vertex is one of its corners and meets an
    edge when it has a subedge of it.  Pairs of cells sharing a point are
    never reported.
    """
    rule = compile_rule(spec)
    cx = get_tower(rule).sphere(L)
    nv = rule.n_vertices
    ends = [{rule.edge_tail[e], rule.edge_head[e]} for e in range(rule.n_edges)]
    found: dict[tuple, int] = {}
    for f in range(cx.n_faces):
        verts = sorted({v for v in cx.fcorners[f] if v < nv})
        edges = sorted({cx.eroot[e] for e in cx.fedges[f] if cx.eroot[e] >= 0})
        for i, u in enumerate(verts):
            for w in verts[i + 1 :]:
                found.setdefault(("vertex", u, "vertex", w), f)
            for e in edges:
                if u not in ends[e]:
                    found.setdefault(("vertex", u, "edge", e), f)
        for i, e in enumerate(edges):
            for e2 in edges[i + 1 :]:
                if not ends[e] & ends[e2]:
                    found.setdefault(("edge", e, "edge", e2), f)
    names = {"vertex": rule.vertex_ids, "edge": rule.edge_ids}
    pairs = [
        {"cells": [f"{k1} {names[k1][a]}", f"{k2} {names[k2][b]}"], "tile": face}
        for (k1, a, k2, b), face in sorted(found.items())
    ]
    _, ideal = check_bounded_valence(rule)
    return BoundaryPairReport(L, pairs, ideal)
