"""Edge/vertex separation, edge subdivision and valence properties by finite graph checks.

The separation properties quantify over all levels, but each reduces to a
directed graph on triples ``(t, a1, a2)``: a tile of type ``t`` with two
disjoint boundary cells.  There is an arc ``(t, a1, a2) -> (t', a1', a2')``
whenever the subdivision of ``t`` has a tile of type ``t'`` whose cells
``a1'``, ``a2'`` lie in ``a1``, ``a2``.  A violation at level ``n`` starting at a
node is exactly a walk of length ``n`` from it, so the property holds iff the
graph is acyclic, and then the longest path length plus one is a level at
which it is certified.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import permutations

from .engine import BudgetExceeded, get_tower
from .model import FsrSpec
from .orbits import ideal_vertices, orbit_cycle
from .validate import CompiledRule, compile_rule

__all__ = [
    "KINDS",
    "PROPERTIES",
    "SeparationGraph",
    "PropertyVerdict",
    "CrosscheckReport",
    "build_separation_graph",
    "check_separation",
    "check_esub",
    "classify_properties",
    "check_bounded_valence",
    "crosscheck_at_bound",
    "kl2_bound",
]

KINDS = ("EE", "VV", "VE")
PROPERTIES = ("Esub", "Esep", "Vsep", "VEsep", "M0comb", "CombExp", "BoundedValence")
_KIND_OF = {"Esep": "EE", "Vsep": "VV", "VEsep": "VE"}
_PROPERTY_OF = {v: k for k, v in _KIND_OF.items()}


def normalize_property(name: str) -> str:
    for p in PROPERTIES:
        if p.lower() == name.lower():
            return p
    aliases = {"combexp": "CombExp", "bounded": "BoundedValence", "valence": "BoundedValence"}
    if name.lower() in aliases:
        return aliases[name.lower()]
    raise ValueError(f"unknown property {name!r}; choose from {', '.join(PROPERTIES)}")


def kl2_bound(rule: CompiledRule) -> int:
    return rule.n_tiles * rule.max_tile_size**2


@dataclass
class SeparationGraph:
    kind: str
    nodes: list[tuple[int, int, int]]
    arcs: list[tuple[int, int, tuple[int, int]]]  # (source, target, (tile, scheme face))
    sources: list[int]
    labels: list[str]
    glued: bool = False

    @property
    def index(self) -> dict[tuple[int, int, int], int]:
        return {n: i for i, n in enumerate(self.nodes)}

    def successors(self) -> list[list[int]]:
        succ: list[set[int]] = [set() for _ in self.nodes]
        for a, b, _ in self.arcs:
            succ[a].add(b)
        return [sorted(s) for s in succ]


@dataclass
class PropertyVerdict:
    property: str
    holds: bool
    witness: list[str] | None = None
    witness_nodes: list[int] | None = None
    certified_level: int | None = None
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "schema": "verdict.v1",
            "property": self.property,
            "holds": self.holds,
            "witness": self.witness,
            "certified_level": self.certified_level,
            "details": self.details,
        }


def _slot_corners(n: int, s: int) -> tuple[int, int]:
    return ((s - 1) % n, s)


def _node_ok(rule: CompiledRule, kind: str, t: int, a1: int, a2: int, glued: bool) -> bool:
    n = rule.tile_size[t]
    names = rule.corner[t]
    if kind == "EE":
        c1, c2 = set(_slot_corners(n, a1)), set(_slot_corners(n, a2))
        if c1 & c2:
            return False
        return not glued or not ({names[c] for c in c1} & {names[c] for c in c2})
    if kind == "VV":
        return a1 != a2 and (not glued or names[a1] != names[a2])
    c2 = set(_slot_corners(n, a2))
    if a1 in c2:
        return False
    return not glued or names[a1] not in {names[c] for c in c2}


def _nodes_for_tile(rule: CompiledRule, kind: str, t: int) -> list[tuple[int, int, int]]:
    n = rule.tile_size[t]
    if kind == "VE":
        pairs = [(u, s) for u in range(n) for s in range(n)]
    elif kind == "VV":
        pairs = list(permutations(range(n), 2))
    else:
        pairs = [(a, b) for a in range(n) for b in range(n) if a != b]
    return [(t, a, b) for a, b in pairs if _node_ok(rule, kind, t, a, b, glued=False)]


def _label(rule: CompiledRule, kind: str, node: tuple[int, int, int]) -> str:
    t, a1, a2 = node
    tn = rule.tile_ids[t]

    def edge(s):
        return f"{rule.edge_ids[rule.slot_edge[t][s]]}#{s}"

    def vert(c):
        return f"{rule.vertex_ids[rule.corner[t][c]]}#{c}"

    if kind == "EE":
        return f"({tn},{edge(a1)},{edge(a2)})"
    if kind == "VV":
        return f"({tn},{vert(a1)},{vert(a2)})"
    return f"({tn},{vert(a1)},{edge(a2)})"


def build_separation_graph(spec: FsrSpec | CompiledRule, kind: str, glued: bool = False) -> SeparationGraph:
    """Graph G_e (``EE``), G_v (``VV``) or G_ve (``VE``).

    Disjointness is read in the model disk of each tile type.  With
    ``glued=True`` the property only quantifies over triples whose cells are
    also disjoint after the sphere identifications (distinct vertex names);
    the graph itself is unchanged, only its source set shrinks.
    """
    kind = kind.upper()
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}")
    rule = compile_rule(spec)
    nodes = [nd for t in range(rule.n_tiles) for nd in _nodes_for_tile(rule, kind, t)]
    index = {nd: i for i, nd in enumerate(nodes)}
    arcs = []
    seen = set()
    for i, (t, a1, a2) in enumerate(nodes):
        cs = rule.schemes[t]
        for j, tt in enumerate(cs.face_type):
            sp, cp = cs.face_slot_parent[j], cs.face_corner_parent[j]
            if kind == "EE":
                first = [k for k, p in enumerate(sp) if p == a1]
                second = [k for k, p in enumerate(sp) if p == a2]
            elif kind == "VV":
                first = [k for k, p in enumerate(cp) if p == a1]
                second = [k for k, p in enumerate(cp) if p == a2]
            else:
                first = [k for k, p in enumerate(cp) if p == a1]
                second = [k for k, p in enumerate(sp) if p == a2]
            for b1 in first:
                for b2 in second:
                    target = index.get((tt, b1, b2))
                    if target is None:
                        continue
                    if (i, target) not in seen:
                        seen.add((i, target))
                        arcs.append((i, target, (t, j)))
    if glued:
        sources = [i for i, (t, a1, a2) in enumerate(nodes) if _node_ok(rule, kind, t, a1, a2, glued=True)]
    else:
        sources = list(range(len(nodes)))
    return SeparationGraph(kind, nodes, arcs, sources, [_label(rule, kind, nd) for nd in nodes], glued)


def _reachable(succ: list[list[int]], sources: list[int]) -> set[int]:
    seen = set(sources)
    queue = deque(sources)
    while queue:
        u = queue.popleft()
        for w in succ[u]:
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return seen


def shortest_cycle(succ: list[list[int]], allowed: set[int] | None = None) -> list[int] | None:
    """Shortest directed cycle; ties go to the cycle through the smallest node index.

    The returned cycle starts at its smallest node.
    """
    best = None
    for s in range(len(succ)):
        if allowed is not None and s not in allowed:
            continue
        if best is not None and len(best) == 1:
            break
        prev = {s: None}
        queue = deque([s])
        found = None
        while queue and found is None:
            u = queue.popleft()
            for w in succ[u]:
                if allowed is not None and w not in allowed:
                    continue
                if w == s:
                    path = [u]
                    while prev[path[-1]] is not None:
                        path.append(prev[path[-1]])
                    found = path[::-1]
                    break
                if w not in prev:
                    prev[w] = u
                    queue.append(w)
        if found is not None and (best is None or len(found) < len(best)):
            best = found
    return best


def _longest_path(succ: list[list[int]], nodes: set[int]) -> int | None:
    """Length in arcs of the longest path inside ``nodes``; None if there is a cycle."""
    indeg = {u: 0 for u in nodes}
    for u in nodes:
        for w in succ[u]:
            if w in nodes:
                indeg[w] += 1
    order = [u for u in sorted(nodes) if indeg[u] == 0]
    queue = deque(order)
    topo = []
    while queue:
        u = queue.popleft()
        topo.append(u)
        for w in succ[u]:
            if w in nodes:
                indeg[w] -= 1
                if indeg[w] == 0:
                    queue.append(w)
    if len(topo) != len(nodes):
        return None
    longest = {u: 0 for u in nodes}
    for u in reversed(topo):
        for w in succ[u]:
            if w in nodes:
                longest[u] = max(longest[u], longest[w] + 1)
    return max(longest.values(), default=0)


def _prefix_to(succ: list[list[int]], sources: list[int], target: int) -> list[int]:
    prev = {s: None for s in sources}
    queue = deque(sources)
    while queue:
        u = queue.popleft()
        if u == target:
            path = [u]
            while prev[path[-1]] is not None:
                path.append(prev[path[-1]])
            return path[::-1][:-1]
        for w in succ[u]:
            if w not in prev:
                prev[w] = u
                queue.append(w)
    return []


def check_separation(spec: FsrSpec | CompiledRule, kind: str, glued: bool = False) -> PropertyVerdict:
    """Decide Esep (``EE``), Vsep (``VV``) or VEsep (``VE``) by cycle detection."""
    rule = compile_rule(spec)
    g = build_separation_graph(rule, kind, glued)
    prop = _PROPERTY_OF[g.kind]
    succ = g.successors()
    reach = _reachable(succ, g.sources)
    details = {
        "kind": g.kind,
        "nodes": len(g.nodes),
        "arcs": len(g.arcs),
        "bound_kl2": kl2_bound(rule),
        "reading": "glued" if glued else "model",
    }
    longest = _longest_path(succ, reach)
    if longest is not None:
        details["longest_path"] = longest
        details["vacuous"] = not g.sources
        return PropertyVerdict(prop, True, None, None, longest + 1, details)
    cycle = shortest_cycle(succ, reach)
    prefix = [] if not glued else _prefix_to(succ, g.sources, cycle[0])
    details["cycle_length"] = len(cycle)
    if prefix:
        details["prefix"] = [g.labels[i] for i in prefix]
    return PropertyVerdict(prop, False, [g.labels[i] for i in cycle], cycle, None, details)


def check_esub(spec: FsrSpec | CompiledRule) -> PropertyVerdict:
    """Every edge is eventually subdivided iff single-subedge words never cycle."""
    rule = compile_rule(spec)
    ne = rule.n_edges
    nxt = [rule.word_img[e][0][0] if len(rule.word_img[e]) == 1 else None for e in range(ne)]
    level: dict[int, int] = {}

    def resolve(e: int) -> int | None:
        path = []
        on_path = set()
        while e not in level:
            if nxt[e] is None:
                level[e] = 1
                break
            if e in on_path:
                return None
            on_path.add(e)
            path.append(e)
            e = nxt[e]
        base = level[e]
        for k, x in enumerate(reversed(path), start=1):
            level[x] = base + k
        return level[path[0]] if path else base

    results = [resolve(e) for e in range(ne)]
    if all(r is not None for r in results):
        return PropertyVerdict("Esub", True, None, None, max(results), {"levels": dict(zip(rule.edge_ids, results))})
    # cycles of the functional graph restricted to never-splitting edges
    cycles = []
    for e in range(ne):
        if results[e] is not None:
            continue
        seen = []
        x = e
        while x not in seen:
            seen.append(x)
            x = nxt[x]
        cyc = seen[seen.index(x):]
        k = cyc.index(min(cyc))
        cycles.append(tuple(cyc[k:] + cyc[:k]))
    best = min(set(cycles), key=lambda c: (len(c), c))
    return PropertyVerdict(
        "Esub",
        False,
        [rule.edge_ids[e] for e in best],
        list(best),
        None,
        {
            "levels": {rule.edge_ids[e]: results[e] for e in range(ne) if results[e] is not None},
            "never_subdivided": [rule.edge_ids[e] for e in range(ne) if results[e] is None],
        },
    )


def _combine(name: str, parts: list[PropertyVerdict]) -> PropertyVerdict:
    failing = [p for p in parts if not p.holds]
    details = {"components": {p.property: p.holds for p in parts}}
    if failing:
        f = failing[0]
        details["failing"] = [p.property for p in failing]
        return PropertyVerdict(name, False, f.witness, f.witness_nodes, None, details)
    return PropertyVerdict(name, True, None, None, max(p.certified_level for p in parts), details)


def classify_properties(spec: FsrSpec | CompiledRule, glued: bool = False) -> list[PropertyVerdict]:
    """Esub, Esep, Vsep, VEsep, M0comb = Esub ∧ Esep and CombExp = Esep ∧ VEsep ∧ Vsep."""
    rule = compile_rule(spec)
    esub = check_esub(rule)
    esep = check_separation(rule, "EE", glued)
    vsep = check_separation(rule, "VV", glued)
    vesep = check_separation(rule, "VE", glued)
    m0 = _combine("M0comb", [esub, esep])
    comb = _combine("CombExp", [esep, vesep, vsep])
    # consistency relations proved for every rule
    if vsep.holds and not esub.holds:
        raise AssertionError("inconsistent verdicts: Vsep holds but Esub fails")
    if comb.holds and not m0.holds:
        raise AssertionError("inconsistent verdicts: CombExp holds but M0comb fails")
    return [esub, esep, vsep, vesep, m0, comb]


def check_bounded_valence(spec: FsrSpec | CompiledRule) -> tuple[PropertyVerdict, list[str]]:
    """Bounded valence holds iff no base vertex is ideal; returns the verdict and ideal vertices."""
    rule = compile_rule(spec)
    ideal = ideal_vertices(rule.vmap, rule.local_degree)
    names = [rule.vertex_ids[v] for v in ideal]
    details = {
        "ideal_vertices": names,
        "local_degrees": dict(zip(rule.vertex_ids, rule.local_degree)),
        "vertex_map": {rule.vertex_ids[v]: rule.vertex_ids[w] for v, w in enumerate(rule.vmap)},
    }
    if not ideal:
        return PropertyVerdict("BoundedValence", True, None, None, None, details), names
    _, cycle = orbit_cycle(rule.vmap, ideal[0])
    k = cycle.index(min(cycle))
    cycle = cycle[k:] + cycle[:k]
    details["cycle_degree_product"] = _prod(rule.local_degree[w] for w in cycle)
    return PropertyVerdict("BoundedValence", False, [rule.vertex_ids[w] for w in cycle], cycle, None, details), names


def _prod(xs) -> int:
    out = 1
    for x in xs:
        out *= x
    return out


# ---------------------------------------------------------------------------
# brute-force agreement on subdivided tiles


def boundary_slots(cx) -> dict[int, int]:
    """Model slot of every boundary edge of a tile complex, found by walking its boundary.

    Uses only incidences: boundary edges are the edges with one side, they are
    oriented by that side's face, and a new slot starts at every corner of
    the level-0 tile (vertices ``0 .. n-1`` in every level of a tile tower).
    """
    n = cx.rule.tile_size[cx.tile]
    nxt = {}
    for e, sides in enumerate(cx.edge_sides):
        if len(sides) != 1:
            continue
        f, i = sides[0]
        sg = cx.rule.slot_sign[cx.ftype[f]][i]
        a, b = (cx.etail[e], cx.ehead[e]) if sg > 0 else (cx.ehead[e], cx.etail[e])
        nxt[a] = (e, b)
    slot_of = {}
    v, slot = n - 1, 0
    for _ in range(len(nxt)):
        e, w = nxt[v]
        slot_of[e] = slot
        if w < n:
            slot = (slot + 1) % n
        v = w
    return slot_of


def violating_triples(rule: CompiledRule, kind: str, t: int, cx) -> dict[tuple[int, int, int], int]:
    """Triples of ``kind`` violated by some face of ``cx`` = R^n(t); value = first such face."""
    n = rule.tile_size[t]
    slot_of = boundary_slots(cx)
    out: dict[tuple[int, int, int], int] = {}
    for f in range(cx.n_faces):
        slots = sorted({slot_of[e] for e in cx.fedges[f] if e in slot_of})
        corners = sorted({v for v in cx.fcorners[f] if v < n})
        if kind == "EE":
            pairs = [(a, b) for a in slots for b in slots]
        elif kind == "VV":
            pairs = [(a, b) for a in corners for b in corners]
        else:
            pairs = [(a, b) for a in corners for b in slots]
        for a, b in pairs:
            if _node_ok(rule, kind, t, a, b, glued=False):
                out.setdefault((t, a, b), f)
    return out


def walk_triples(g: SeparationGraph, length: int) -> set[tuple[int, int, int]]:
    """Nodes that start a walk with ``length`` arcs."""
    succ = g.successors()
    alive = set(range(len(g.nodes)))
    for _ in range(length):
        alive = {u for u in range(len(g.nodes)) if any(w in alive for w in succ[u])}
    return {g.nodes[u] for u in alive}


@dataclass
class CrosscheckReport:
    property: str
    bound_kl2: int
    n_max: int
    levels_checked: list[int] = field(default_factory=list)
    agree: bool = True
    mismatches: list[dict] = field(default_factory=list)
    claim: dict = field(default_factory=dict)
    partial: bool = False
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "property": self.property,
            "bound_kl2": self.bound_kl2,
            "n_max": self.n_max,
            "levels_checked": self.levels_checked,
            "agree": self.agree,
            "mismatches": self.mismatches,
            "claim": self.claim,
            "partial": self.partial,
            "note": self.note,
        }


def crosscheck_at_bound(spec: FsrSpec | CompiledRule, prop: str, n_max: int) -> CrosscheckReport:
    """Compare a verdict with an exhaustive scan of subdivided complexes.

    For separation properties every level ``n <= min(n_max, kl²)`` of every
    tile type is scanned and the set of violated triples is compared with
    the set of graph nodes starting a walk of length ``n``.  The verdict's
    own claim is replayed as well: a false verdict with a cycle of length
    ``c`` must show a violating tile in R^c(t), a true verdict certified at
    ``n*`` must show none in R^{n*}(t).
    """
    rule = compile_rule(spec)
    prop = normalize_property(prop)
    bound = kl2_bound(rule)
    top = min(n_max, bound)
    rep = CrosscheckReport(prop, bound, n_max)
    tower = get_tower(rule)
    try:
        if prop in _KIND_OF:
            _crosscheck_separation(rule, tower, _KIND_OF[prop], top, rep)
        elif prop == "Esub":
            _crosscheck_esub(rule, tower, top, rep)
        elif prop == "BoundedValence":
            _crosscheck_valence(rule, tower, top, rep)
        else:
            parts = {"M0comb": ("Esub", "Esep"), "CombExp": ("Esep", "VEsep", "Vsep")}[prop]
            for p in parts:
                sub = crosscheck_at_bound(rule, p, n_max)
                rep.levels_checked = sorted(set(rep.levels_checked) | set(sub.levels_checked))
                rep.agree &= sub.agree
                rep.partial |= sub.partial
                rep.mismatches += [dict(m, property=p) for m in sub.mismatches]
                rep.claim[p] = sub.claim
    except BudgetExceeded as exc:
        rep.partial = True
        rep.note = str(exc)
    return rep


def _crosscheck_separation(rule, tower, kind, top, rep) -> None:
    g = build_separation_graph(rule, kind)
    verdict = check_separation(rule, kind)
    for n in range(1, top + 1):
        brute: dict = {}
        for t in range(rule.n_tiles):
            brute.update(violating_triples(rule, kind, t, tower.tile(t, n)))
        walks = walk_triples(g, n)
        rep.levels_checked.append(n)
        if set(brute) != walks:
            rep.agree = False
            rep.mismatches.append(
                {
                    "level": n,
                    "only_brute_force": sorted(_label(rule, kind, x) for x in set(brute) - walks),
                    "only_graph": sorted(_label(rule, kind, x) for x in walks - set(brute)),
                }
            )
    if verdict.holds:
        n_star = verdict.certified_level
        found = {}
        for t in range(rule.n_tiles):
            found.update(violating_triples(rule, kind, t, tower.tile(t, n_star)))
        rep.claim = {"holds": True, "certified_level": n_star, "violations_at_certified_level": len(found)}
        if found:
            rep.agree = False
    else:
        c = len(verdict.witness_nodes)
        node = g.nodes[verdict.witness_nodes[0]]
        t = node[0]
        cx = tower.tile(t, c)
        hits = violating_triples(rule, kind, t, cx)
        face = hits.get(node)
        rep.claim = {
            "holds": False,
            "cycle_length": c,
            "node": _label(rule, kind, node),
            "violating_tile": None if face is None else {"tile": rule.tile_ids[t], "level": c, "face": face},
        }
        if face is None:
            rep.agree = False


def _crosscheck_esub(rule, tower, top, rep) -> None:
    verdict = check_esub(rule)
    for n in range(1, top + 1):
        cx = tower.sphere(n)
        counts = _subedge_counts(tower, n)
        rep.levels_checked.append(n)
        for e in range(rule.n_edges):
            split = counts[e] >= 2
            expected = verdict.details.get("levels", {}).get(rule.edge_ids[e])
            predicted = expected is not None and expected <= n
            if split != predicted:
                rep.agree = False
                rep.mismatches.append({"level": n, "edge": rule.edge_ids[e], "subedges": counts[e]})
        del cx
    rep.claim = {"holds": verdict.holds, "certified_level": verdict.certified_level, "witness": verdict.witness}


def _subedge_counts(tower, n: int) -> list[int]:
    """Number of level-n edges inside each base edge, found through the parent chain."""
    rule = tower.rule
    counts = [0] * rule.n_edges
    cx = tower.sphere(n)
    for e in range(cx.n_edges):
        dim, idx, lvl = 1, e, n
        while lvl > 0 and dim == 1:
            dim, idx = tower.sphere(lvl).epar[idx]
            lvl -= 1
        if dim == 1:
            counts[idx] += 1
    return counts


def _crosscheck_valence(rule, tower, top, rep) -> None:
    verdict, ideal = check_bounded_valence(rule)
    val = [tower.sphere(n).valences() for n in range(top + 1)]
    for n in range(top):
        rep.levels_checked.append(n + 1)
        for v in range(rule.n_vertices):
            predicted = rule.local_degree[v] * val[n][rule.vmap[v]]
            if val[n + 1][v] != predicted:
                rep.agree = False
                rep.mismatches.append({"level": n + 1, "vertex": rule.vertex_ids[v], "valence": val[n + 1][v]})
    rep.claim = {
        "holds": verdict.holds,
        "ideal_vertices": ideal,
        "valences": {rule.vertex_ids[v]: [val[n][v] for n in range(top + 1)] for v in range(rule.n_vertices)},
    }
