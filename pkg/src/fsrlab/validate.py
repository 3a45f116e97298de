"""Semantic validation of an :class:`~fsrlab.model.FsrSpec` and compilation to index form.

Validation and compilation share one pass: every check that the subdivision
engine relies on is performed while the integer-indexed :class:`CompiledRule`
is assembled, so a rule the engine accepts is exactly a rule whose report is
``ok``.
"""

from __future__ import annotations

import functools
from collections import defaultdict
from dataclasses import dataclass, field

from .model import DirectedEdge, FsrSpec

__all__ = [
    "Finding",
    "ValidationReport",
    "CompiledScheme",
    "CompiledRule",
    "InvalidRuleError",
    "validate_fsr",
    "compile_rule",
]


@dataclass(frozen=True)
class Finding:
    severity: str  # "error" | "warning"
    code: str
    location: str
    message: str

    def __str__(self) -> str:
        return f"{self.severity}: [{self.code}] {self.location}: {self.message}"


@dataclass
class ValidationReport:
    findings: list[Finding] = field(default_factory=list)
    euler: tuple[int, int, int] | None = None

    @property
    def ok(self) -> bool:
        return not any(f.severity == "error" for f in self.findings)

    @property
    def errors(self) -> list[Finding]:
        return [f for f in self.findings if f.severity == "error"]

    def error(self, code: str, location: str, message: str) -> None:
        self.findings.append(Finding("error", code, location, message))

    def warn(self, code: str, location: str, message: str) -> None:
        self.findings.append(Finding("warning", code, location, message))

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "euler": list(self.euler) if self.euler else None,
            "findings": [
                {"severity": f.severity, "code": f.code, "location": f.location, "message": f.message}
                for f in self.findings
            ],
        }


class InvalidRuleError(ValueError):
    def __init__(self, report: ValidationReport):
        self.report = report
        first = report.errors[0] if report.errors else None
        super().__init__(f"invalid subdivision rule: {first}" if first else "invalid subdivision rule")


# Local endpoints in compiled form: ("c", corner) | ("b", slot, k) | ("i", interior index)


@dataclass
class CompiledScheme:
    """One subdivision scheme in index form.

    ``edge_realization[l]`` is ``("b", slot, q)`` for the boundary piece between
    counterclockwise positions ``q`` and ``q + 1`` of ``slot``, or ``("i", j)``
    for the ``j``-th interior edge.  Interior edges are stored in canonical
    direction (the direction mapped positively onto their image edge type).
    """

    tile: int
    interior_labels: list[int]
    interior_names: list[str]
    int_edges: list[tuple[tuple, tuple, int]]  # (tail ep, head ep, label) canonical
    int_edge_names: list[str]
    edge_realization: list[tuple]
    face_names: list[str]
    face_type: list[int]
    face_rot: list[int]
    # per child face, indexed by the child's own model slot i
    face_slot_edge: list[tuple[int, ...]]  # local edge index
    face_slot_parent: list[tuple[int, ...]]  # parent slot containing that side, or -1
    face_corner_parent: list[tuple[int, ...]]  # parent corner at child's corner i, or -1


@dataclass
class CompiledRule:
    spec: FsrSpec
    vertex_ids: list[str]
    edge_ids: list[str]
    tile_ids: list[str]
    vmap: list[int]
    edge_tail: list[int]
    edge_head: list[int]
    word_img: list[list[tuple[int, int]]]
    word_pts: list[list[int]]
    tile_size: list[int]
    slot_edge: list[list[int]]
    slot_sign: list[list[int]]
    corner: list[list[int]]
    schemes: list[CompiledScheme]
    sides: list[tuple[tuple[int, int], tuple[int, int]]]  # per edge: (+ side, - side)
    local_degree: list[int]

    @property
    def name(self) -> str:
        return self.spec.name

    @property
    def n_vertices(self) -> int:
        return len(self.vertex_ids)

    @property
    def n_edges(self) -> int:
        return len(self.edge_ids)

    @property
    def n_tiles(self) -> int:
        return len(self.tile_ids)

    def pieces(self, e: int) -> int:
        return len(self.word_img[e])

    def tile_index(self, tile: str | int) -> int:
        if isinstance(tile, int):
            return tile
        try:
            return self.tile_ids.index(tile)
        except ValueError:
            raise KeyError(f"unknown tile type {tile!r}") from None

    @property
    def max_tile_size(self) -> int:
        return max(self.tile_size)


class _UnionFind:
    def __init__(self):
        self.parent: dict = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def _ends(tail: int, head: int, sign: int) -> tuple[int, int]:
    return (tail, head) if sign > 0 else (head, tail)


def _check_sphere(spec, rule_parts, report):
    """Tile shapes, edge words, vertex map and gluing; returns the partial index tables."""
    vid = {v: i for i, v in enumerate(spec.vertex_ids)}
    eid = {e: i for i, e in enumerate(spec.edge_ids)}
    tid = {t: i for i, t in enumerate(spec.tile_ids)}
    et = spec.edge_types

    edge_tail = [vid[e.tail] for e in et]
    edge_head = [vid[e.head] for e in et]
    word_img = [[(eid[d.edge], d.sign) for d in e.images] for e in et]
    word_pts = [[vid[p] for p in e.points] for e in et]

    # tiles
    tile_size, slot_edge, slot_sign, corner = [], [], [], []
    for t in spec.tile_types:
        if t.size < 3:
            report.error("tile-too-small", f"tile {t.id}", "tile must have ≥ 3 vertices")
        slot_edge.append([eid[d.edge] for d in t.edges])
        slot_sign.append([d.sign for d in t.edges])
        corner.append([vid[c] for c in t.corners])
        tile_size.append(t.size)
        for i, d in enumerate(t.edges):
            tail, head = _ends(edge_tail[eid[d.edge]], edge_head[eid[d.edge]], d.sign)
            if head != vid[t.corners[i]]:
                report.error(
                    "corner-mismatch",
                    f"tile {t.id} slot {i}",
                    f"slot edge {d} ends at {spec.vertex_ids[head]} but corner is {t.corners[i]}",
                )
            if tail != vid[t.corner_before(i)]:
                report.error(
                    "corner-mismatch",
                    f"tile {t.id} slot {i}",
                    f"slot edge {d} starts at {spec.vertex_ids[tail]} but previous corner is {t.corner_before(i)}",
                )

    # edge words and the induced vertex map
    vimage: dict[int, set[int]] = defaultdict(set)
    for e, etype in enumerate(et):
        chain = []
        for img in word_img[e]:
            chain.append(_ends(edge_tail[img[0]], edge_head[img[0]], img[1]))
        for j, pt in enumerate(word_pts[e]):
            if chain[j][1] != pt or chain[j + 1][0] != pt:
                report.error(
                    "word-chain",
                    f"edge {etype.id}",
                    f"subdivision word is not a chain at interior point {j + 1} ({spec.vertex_ids[pt]})",
                )
        vimage[edge_tail[e]].add(chain[0][0])
        vimage[edge_head[e]].add(chain[-1][1])
    vmap = []
    for v, vname in enumerate(spec.vertex_ids):
        imgs = vimage.get(v, set())
        if len(imgs) > 1:
            report.error(
                "vertex-map",
                f"vertex {vname}",
                "edge words send this vertex to "
                + ", ".join(sorted(spec.vertex_ids[i] for i in imgs)),
            )
        if not imgs:
            report.error("vertex-unused", f"vertex {vname}", "vertex is not an endpoint of any edge")
            vmap.append(v)
        else:
            vmap.append(min(imgs))

    # gluing
    sides: list = [None] * len(et)
    used = {}
    declared = {}
    for ename, s1, s2 in spec.gluing.sides:
        e = eid[ename]
        recs = []
        for t, s in (s1, s2):
            key = (tid[t], s)
            if key in used:
                report.error(
                    "gluing-slot", f"tile {t} slot {s}", f"slot appears in sides of {used[key]} and {ename}"
                )
            used[key] = ename
            if slot_edge[tid[t]][s] != e:
                report.error(
                    "gluing-edge",
                    f"tile {t} slot {s}",
                    f"slot carries edge {spec.edge_ids[slot_edge[tid[t]][s]]}, not {ename}",
                )
            recs.append((tid[t], s, slot_sign[tid[t]][s]))
        if recs[0][2] == recs[1][2]:
            report.error(
                "gluing-orientation",
                f"edge {ename}",
                "both sides traverse the edge in the same direction (surface not orientable)",
            )
        pos = [r for r in recs if r[2] > 0]
        neg = [r for r in recs if r[2] < 0]
        if pos and neg:
            sides[e] = ((pos[0][0], pos[0][1]), (neg[0][0], neg[0][1]))
        declared[e] = True
    for e, ename in enumerate(spec.edge_ids):
        if e not in declared:
            report.error("gluing-missing", f"edge {ename}", "edge has no side record")
    for t, tname in enumerate(spec.tile_ids):
        for s in range(tile_size[t]):
            if (t, s) not in used:
                report.error("gluing-missing", f"tile {tname} slot {s}", "slot is not glued to any edge")

    if report.ok:
        # link cycles: join every corner with the edge ends on both sides of it
        uf = _UnionFind()
        for t in range(len(tile_size)):
            n = tile_size[t]
            for i in range(n):
                e, sg = slot_edge[t][i], slot_sign[t][i]
                e_next, sg_next = slot_edge[t][(i + 1) % n], slot_sign[t][(i + 1) % n]
                uf.union(("corner", t, i), ("end", e, "head" if sg > 0 else "tail"))
                uf.union(("corner", t, i), ("end", e_next, "tail" if sg_next > 0 else "head"))
        classes = defaultdict(set)
        for t in range(len(tile_size)):
            for i in range(tile_size[t]):
                classes[uf.find(("corner", t, i))].add(corner[t][i])
        by_name = defaultdict(int)
        for names in classes.values():
            if len(names) > 1:
                report.error(
                    "vertex-closure",
                    "sphere",
                    "glued corners carry different vertex names: "
                    + ", ".join(sorted(spec.vertex_ids[v] for v in names)),
                )
            for v in names:
                by_name[v] += 1
        for v, count in by_name.items():
            if count > 1:
                report.error(
                    "vertex-closure",
                    f"vertex {spec.vertex_ids[v]}",
                    f"vertex name is used by {count} separate corner cycles",
                )
        # connectivity of tiles through shared edges
        tuf = _UnionFind()
        for e in range(len(et)):
            if sides[e]:
                tuf.union(sides[e][0][0], sides[e][1][0])
        if len({tuf.find(t) for t in range(len(tile_size))}) != 1:
            report.error("sphere-disconnected", "sphere", "tiles do not form a connected surface")
        V, E, F = len(spec.vertex_ids), len(et), len(tile_size)
        report.euler = (V, E, F)
        if V - E + F != 2:
            report.error("sphere-euler", "sphere", f"Euler characteristic {V - E + F} (V,E,F)=({V},{E},{F}), expected 2")

    rule_parts.update(
        vid=vid, eid=eid, tid=tid, edge_tail=edge_tail, edge_head=edge_head,
        word_img=word_img, word_pts=word_pts, tile_size=tile_size, slot_edge=slot_edge,
        slot_sign=slot_sign, corner=corner, vmap=vmap, sides=sides,
    )


def _slot_chain(parts, t, s):
    """Images and interior point labels of slot ``s`` of tile ``t`` read counterclockwise."""
    e, sign = parts["slot_edge"][t][s], parts["slot_sign"][t][s]
    imgs, pts = parts["word_img"][e], parts["word_pts"][e]
    if sign > 0:
        return list(imgs), list(pts)
    return [(i, -g) for i, g in reversed(imgs)], list(reversed(pts))


def _check_scheme(spec, parts, t, report) -> CompiledScheme | None:
    scheme = spec.schemes[t]
    tname = spec.tile_ids[t]
    loc = f"subdivision {tname}"
    n = parts["tile_size"][t]
    vmap, eid, tid, vid = parts["vmap"], parts["eid"], parts["tid"], parts["vid"]
    edge_tail, edge_head = parts["edge_tail"], parts["edge_head"]
    ok_before = len(report.errors)

    # local vertices and their labels
    chains = [_slot_chain(parts, t, s) for s in range(n)]
    K = [len(c[0]) for c in chains]
    label: dict[tuple, int] = {}
    for i in range(n):
        label[("c", i)] = vmap[parts["corner"][t][i]]
    for s in range(n):
        for k in range(1, K[s]):
            label[("b", s, k)] = chains[s][1][k - 1]
    int_index = {name: j for j, (name, _) in enumerate(scheme.interior)}
    for j, (_, vt) in enumerate(scheme.interior):
        label[("i", j)] = vid[vt]

    def conv(ep):
        if ep[0] == "corner":
            return ("c", ep[1])
        if ep[0] == "bp":
            return ("b", ep[1], ep[2])
        return ("i", int_index[ep[1]])

    def pos_on_slot(ep, s):
        """Counterclockwise position of ``ep`` on slot ``s`` or None."""
        if ep[0] == "c":
            if ep[1] == (s - 1) % n:
                return 0
            if ep[1] == s:
                return K[s]
            return None
        if ep[0] == "b" and ep[1] == s:
            return ep[2]
        return None

    ledges = scheme.edges
    lidx = {le.id: j for j, le in enumerate(ledges)}
    ends = []
    for le in ledges:
        a, b = conv(le.tail), conv(le.head)
        ends.append((a, b))
        itail, ihead = _ends(edge_tail[eid[le.image.edge]], edge_head[eid[le.image.edge]], le.image.sign)
        if label[a] != itail or label[b] != ihead:
            report.error(
                "edge-image",
                f"{loc} edge {le.id}",
                f"image {le.image} runs {spec.vertex_ids[itail]}->{spec.vertex_ids[ihead]} "
                f"but endpoints map to {spec.vertex_ids[label[a]]}->{spec.vertex_ids[label[b]]}",
            )

    # faces close up; count edge usage
    usage = defaultdict(list)
    for f in scheme.faces:
        m = len(f.sides)
        for j, (le_name, sg) in enumerate(f.sides):
            usage[lidx[le_name]].append((f.id, j, sg))
            a, b = ends[lidx[le_name]] if sg > 0 else ends[lidx[le_name]][::-1]
            nxt_name, nxt_sg = f.sides[(j + 1) % m]
            na, _ = ends[lidx[nxt_name]] if nxt_sg > 0 else ends[lidx[nxt_name]][::-1]
            if b != na:
                report.error("face-open", f"{loc} face {f.id}", f"side {j} does not end where side {(j + 1) % m} starts")

    realization: list = [None] * len(ledges)
    int_edges, int_names = [], []
    covered = defaultdict(list)
    for j, le in enumerate(ledges):
        uses = usage.get(j, [])
        if len(uses) == 1:
            fid, _, sg = uses[0]
            a, b = ends[j] if sg > 0 else ends[j][::-1]
            found = None
            for s in range(n):
                pa, pb = pos_on_slot(a, s), pos_on_slot(b, s)
                if pa is not None and pb is not None and pb == pa + 1:
                    found = (s, pa)
                    break
            if found is None:
                report.error(
                    "boundary",
                    f"{loc} edge {le.id}",
                    "edge borders one face but is not a counterclockwise boundary piece",
                )
                continue
            s, q = found
            img = (eid[le.image.edge], le.image.sign * sg)
            if chains[s][0][q] != img:
                want = chains[s][0][q]
                report.error(
                    "boundary",
                    f"{loc} edge {le.id}",
                    f"boundary piece {q} of slot {s} should map to "
                    f"{DirectedEdge(spec.edge_ids[want[0]], want[1])}",
                )
            realization[j] = ("b", s, q)
            covered[(s, q)].append(le.id)
        elif len(uses) == 2:
            if uses[0][2] == uses[1][2]:
                report.error(
                    "interior-orientation",
                    f"{loc} edge {le.id}",
                    "interior edge is traversed in the same direction by both faces",
                )
            a, b = ends[j]
            canon = (a, b) if le.image.sign > 0 else (b, a)
            realization[j] = ("i", len(int_edges))
            int_edges.append((canon[0], canon[1], eid[le.image.edge]))
            int_names.append(le.id)
        else:
            report.error(
                "edge-usage",
                f"{loc} edge {le.id}",
                f"edge borders {len(uses)} face sides (expected 1 or 2)",
            )
    for s in range(n):
        for q in range(K[s]):
            got = covered.get((s, q), [])
            if len(got) != 1:
                report.error(
                    "boundary",
                    f"{loc} slot {s}",
                    f"boundary piece {q} is realized by {len(got)} edges",
                )

    # disk Euler count and vertex fans
    V = n + sum(k - 1 for k in K) + len(scheme.interior)
    E, F = len(ledges), len(scheme.faces)
    if V - E + F != 1:
        report.error("disk-euler", loc, f"V - E + F = {V - E + F} (V,E,F)=({V},{E},{F}), expected 1")
    wedges = defaultdict(list)
    for f in scheme.faces:
        m = len(f.sides)
        for j, (le_name, sg) in enumerate(f.sides):
            nxt_name, nxt_sg = f.sides[(j + 1) % m]
            a, b = ends[lidx[le_name]] if sg > 0 else ends[lidx[le_name]][::-1]
            end_in = (le_name, "head" if sg > 0 else "tail")
            end_out = (nxt_name, "tail" if nxt_sg > 0 else "head")
            wedges[b].append((end_in, end_out))
    for v in label:
        w = wedges.get(v, [])
        if not w:
            report.error("vertex-fan", f"{loc} vertex {_ep_name(v, scheme)}", "vertex lies on no face")
            continue
        uf = _UnionFind()
        for x, y in w:
            uf.union(x, y)
        if len({uf.find(x) for x, _ in w}) != 1:
            report.error(
                "vertex-fan",
                f"{loc} vertex {_ep_name(v, scheme)}",
                "faces around this vertex do not form a single fan (complex is not a disk)",
            )

    # face images
    face_type, face_rot, slot_edge_l, slot_parent, corner_parent = [], [], [], [], []
    for f in scheme.faces:
        tt = tid[f.image]
        m = len(f.sides)
        target_n = parts["tile_size"][tt]
        sides = []
        for le_name, sg in f.sides:
            le = ledges[lidx[le_name]]
            a, b = ends[lidx[le_name]] if sg > 0 else ends[lidx[le_name]][::-1]
            sides.append(((eid[le.image.edge], le.image.sign * sg), label[b], lidx[le_name], b))
        target = [
            ((parts["slot_edge"][tt][i], parts["slot_sign"][tt][i]), parts["corner"][tt][i])
            for i in range(target_n)
        ]
        floc = f"{loc} face {f.id}"
        if m != target_n:
            report.error("face-size", floc, f"face has {m} sides but tile {f.image} has {target_n}")
        else:
            def matches(seq, r):
                return all(seq[j][:2] == target[(j + r) % m] for j in range(m))

            if not (0 <= f.rot < m):
                report.error("face-rotation", floc, f"rotation offset {f.rot} out of range 0..{m - 1}")
            elif not matches(sides, f.rot):
                good = [r for r in range(m) if matches(sides, r)]
                # a reversed traversal ends each side at the previous side's start
                rev = []
                for j in range(m - 1, -1, -1):
                    (e_img, sg_img), *_ = sides[j]
                    start = sides[j - 1][1]
                    rev.append(((e_img, -sg_img), start))
                refl = [r for r in range(m) if matches(rev, r)]
                if good:
                    report.error("face-rotation", floc, f"wrong rotation offset {f.rot}; face sides align with rot {good[0]}")
                elif refl:
                    report.error("orientation-reversed", floc, "orientation reversed: face image matches only under a reflection")
                else:
                    report.error("face-image", floc, f"face does not map cellularly onto tile {f.image}")
        face_type.append(tt)
        face_rot.append(f.rot)
        if m == target_n and realization and all(r is not None for r in realization):
            se, sp, cp = [], [], []
            for i in range(m):
                j = (i - f.rot) % m
                li = sides[j][2]
                se.append(li)
                real = realization[li]
                sp.append(real[1] if real[0] == "b" else -1)
                head = sides[j][3]
                cp.append(head[1] if head[0] == "c" else -1)
            slot_edge_l.append(tuple(se))
            slot_parent.append(tuple(sp))
            corner_parent.append(tuple(cp))

    if len(report.errors) != ok_before:
        return None
    return CompiledScheme(
        tile=t,
        interior_labels=[vid[vt] for _, vt in scheme.interior],
        interior_names=[name for name, _ in scheme.interior],
        int_edges=int_edges,
        int_edge_names=int_names,
        edge_realization=realization,
        face_names=[f.id for f in scheme.faces],
        face_type=face_type,
        face_rot=face_rot,
        face_slot_edge=slot_edge_l,
        face_slot_parent=slot_parent,
        face_corner_parent=corner_parent,
    )


def _ep_name(ep, scheme) -> str:
    if ep[0] == "c":
        return f"corner {ep[1]}"
    if ep[0] == "b":
        return f"bp {ep[1]}.{ep[2]}"
    return scheme.interior[ep[1]][0]


def _local_degrees(spec, parts, schemes, report) -> list[int]:
    """d_v = (level-1 edge ends at v) / (level-0 edge ends at f(v))."""
    nv = len(spec.vertex_ids)
    val0 = [0] * nv
    for e in range(len(spec.edge_ids)):
        val0[parts["edge_tail"][e]] += 1
        val0[parts["edge_head"][e]] += 1
    val1 = list(val0)  # each base edge end contributes one end piece
    for t, cs in enumerate(schemes):
        for a, b, _ in cs.int_edges:
            for ep in (a, b):
                if ep[0] == "c":
                    val1[parts["corner"][t][ep[1]]] += 1
    degrees = []
    for v in range(nv):
        num, den = val1[v], val0[parts["vmap"][v]]
        if den == 0 or num % den:
            report.error(
                "local-degree",
                f"vertex {spec.vertex_ids[v]}",
                f"valence ratio {num}/{den} is not an integer (map is not a branched covering)",
            )
            degrees.append(max(1, num // max(den, 1)))
        else:
            degrees.append(num // den)
    return degrees


def _check_hints(spec, vmap, degrees, report) -> None:
    from .orbits import ideal_vertices

    ideal = set(ideal_vertices(vmap, degrees))
    for v, vt in enumerate(spec.vertex_types):
        if vt.weight_hint is None or vt.weight_hint == "none":
            continue
        computed = "infinite" if v in ideal else "finite"
        if computed != vt.weight_hint:
            report.warn(
                "weight-hint",
                f"vertex {vt.id}",
                f"declared weight hint {vt.weight_hint!r} but the computed weight is {computed}",
            )


def _build(spec: FsrSpec) -> tuple[ValidationReport, CompiledRule | None]:
    report = ValidationReport()
    parts: dict = {}
    _check_sphere(spec, parts, report)
    if not report.ok:
        # scheme checks need consistent tiles and words
        return report, None
    schemes = [_check_scheme(spec, parts, t, report) for t in range(len(spec.tile_types))]
    if not report.ok:
        return report, None
    degrees = _local_degrees(spec, parts, schemes, report)
    if not report.ok:
        return report, None
    _check_hints(spec, parts["vmap"], degrees, report)
    rule = CompiledRule(
        spec=spec,
        vertex_ids=spec.vertex_ids,
        edge_ids=spec.edge_ids,
        tile_ids=spec.tile_ids,
        vmap=parts["vmap"],
        edge_tail=parts["edge_tail"],
        edge_head=parts["edge_head"],
        word_img=parts["word_img"],
        word_pts=parts["word_pts"],
        tile_size=parts["tile_size"],
        slot_edge=parts["slot_edge"],
        slot_sign=parts["slot_sign"],
        corner=parts["corner"],
        schemes=schemes,
        sides=parts["sides"],
        local_degree=degrees,
    )
    return report, rule


@functools.lru_cache(maxsize=64)
def _build_cached(spec: FsrSpec):
    return _build(spec)


def validate_fsr(spec: FsrSpec) -> ValidationReport:
    """Check every structural invariant of ``spec``; never raises on a bad rule."""
    report, _ = _build_cached(spec)
    return report


def compile_rule(spec: FsrSpec | CompiledRule) -> CompiledRule:
    """Index form of a valid rule; raises :class:`InvalidRuleError` otherwise."""
    if isinstance(spec, CompiledRule):
        return spec
    report, rule = _build_cached(spec)
    if rule is None:
        raise InvalidRuleError(report)
    return rule
