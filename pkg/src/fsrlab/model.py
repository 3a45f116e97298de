"""Combinatorial encoding of a finite subdivision rule and the ``.fsr`` text format.

A rule is stored declaratively: the base sphere complex (vertex, edge and tile
types glued by a :class:`SphereGluing`), the subdivision word of every edge
type and one :class:`SubdivisionScheme` per tile type.  Every cell of the
level-1 complex carries the label of its image under the subdivision map.

Orientation conventions used throughout the package:

* a tile boundary is a cyclic list of slots read counterclockwise; slot ``i``
  holds a directed edge and the corner at its head, so slot ``i`` runs from
  corner ``i - 1`` to corner ``i``;
* ``bp s.k`` is the ``k``-th subdivision point met when walking slot ``s``
  counterclockwise (``k`` starts at 1);
* a scheme face with image tile ``t'`` and rotation ``r`` sends its side ``j``
  onto slot ``(j + r) mod n'`` of ``t'``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Union

__all__ = [
    "DirectedEdge",
    "VertexType",
    "EdgeType",
    "TileType",
    "LocalEdge",
    "LocalFace",
    "SubdivisionScheme",
    "SphereGluing",
    "FsrSpec",
    "FsrParseError",
    "FsrSyntaxError",
    "FsrReferenceError",
    "parse_fsr",
    "serialize_fsr",
]


@dataclass(frozen=True, order=True)
class DirectedEdge:
    """An edge type traversed along (+1) or against (-1) its declared direction."""

    edge: str
    sign: int = 1

    def reversed(self) -> "DirectedEdge":
        return DirectedEdge(self.edge, -self.sign)

    def __str__(self) -> str:
        return ("+" if self.sign > 0 else "-") + self.edge

    @classmethod
    def parse(cls, token: str) -> "DirectedEdge":
        return cls(token[1:], 1 if token[0] == "+" else -1)


@dataclass(frozen=True)
class VertexType:
    id: str
    weight_hint: str | None = None


@dataclass(frozen=True)
class EdgeType:
    id: str
    tail: str
    head: str
    images: tuple[DirectedEdge, ...]
    points: tuple[str, ...]

    @property
    def pieces(self) -> int:
        return len(self.images)

    def chain(self, sign: int = 1) -> tuple[tuple[DirectedEdge, ...], tuple[str, ...]]:
        """Subedge images and interior point images read along ``sign`` times the edge."""
        if sign > 0:
            return self.images, self.points
        return (
            tuple(img.reversed() for img in reversed(self.images)),
            tuple(reversed(self.points)),
        )


@dataclass(frozen=True)
class TileType:
    id: str
    edges: tuple[DirectedEdge, ...]
    corners: tuple[str, ...]

    @property
    def size(self) -> int:
        return len(self.edges)

    def corner_before(self, slot: int) -> str:
        return self.corners[(slot - 1) % len(self.corners)]


# endpoint forms: ("corner", i) | ("bp", slot, k) | ("interior", id)
Endpoint = Union[tuple[str, int], tuple[str, int, int], tuple[str, str]]


@dataclass(frozen=True)
class LocalEdge:
    id: str
    tail: Endpoint
    head: Endpoint
    image: DirectedEdge


@dataclass(frozen=True)
class LocalFace:
    id: str
    sides: tuple[tuple[str, int], ...]
    image: str
    rot: int


@dataclass(frozen=True)
class SubdivisionScheme:
    tile: str
    interior: tuple[tuple[str, str], ...]
    edges: tuple[LocalEdge, ...]
    faces: tuple[LocalFace, ...]


@dataclass(frozen=True)
class SphereGluing:
    # (edge id, (tile, slot), (tile, slot))
    sides: tuple[tuple[str, tuple[str, int], tuple[str, int]], ...]


@dataclass(frozen=True)
class FsrSpec:
    name: str
    vertex_types: tuple[VertexType, ...]
    edge_types: tuple[EdgeType, ...]
    tile_types: tuple[TileType, ...]
    schemes: tuple[SubdivisionScheme, ...]
    gluing: SphereGluing

    # lookups are rebuilt on demand; an FsrSpec itself stays a plain value
    def vertex(self, vid: str) -> VertexType:
        return _index(self.vertex_types)[vid]

    def edge(self, eid: str) -> EdgeType:
        return _index(self.edge_types)[eid]

    def tile(self, tid: str) -> TileType:
        return _index(self.tile_types)[tid]

    def scheme(self, tid: str) -> SubdivisionScheme:
        for s in self.schemes:
            if s.tile == tid:
                return s
        raise KeyError(tid)

    @property
    def vertex_ids(self) -> list[str]:
        return [v.id for v in self.vertex_types]

    @property
    def edge_ids(self) -> list[str]:
        return [e.id for e in self.edge_types]

    @property
    def tile_ids(self) -> list[str]:
        return [t.id for t in self.tile_types]


def _index(items) -> dict:
    return {item.id: item for item in items}


# ---------------------------------------------------------------------------
# parsing


class FsrParseError(ValueError):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.message = message
        self.line = line
        self.col = col
        where = f"{line}:{col}: " if line else ""
        super().__init__(where + message)


class FsrSyntaxError(FsrParseError):
    pass


class FsrReferenceError(FsrParseError):
    """Unknown, duplicate or missing identifier."""


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<comment>\#[^\n]*)
  | (?P<newline>\n)
  | (?P<arrow>->)
  | (?P<sedge>[+-][A-Za-z_][A-Za-z0-9_']*)
  | (?P<bp>\d+\.\d+)
  | (?P<int>\d+)
  | (?P<id>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<punct>[:\[\]{}(),=])
    """,
    re.VERBOSE,
)

_KEYWORDS = {
    "fsr", "vertex", "edge", "tile", "subdivision", "sphere", "subdivides",
    "interior", "face", "image", "rot", "corner", "bp", "side", "slot",
}


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    pos, line, line_start = 0, 1, 0
    depth = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise FsrSyntaxError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        col = pos - line_start + 1
        s = m.group()
        if kind == "newline":
            if depth == 0 and toks and toks[-1].kind != "nl":
                toks.append(_Tok("nl", "\n", line, col))
            line += 1
            line_start = m.end()
        elif kind not in ("ws", "comment"):
            if kind == "punct" and s in "[{(":
                depth += 1
            elif kind == "punct" and s in "]})":
                depth = max(depth - 1, 0)
            if kind == "id" and s in _KEYWORDS:
                kind = "kw"
            toks.append(_Tok(kind, s, line, col))
        pos = m.end()
    if not toks or toks[-1].kind != "nl":
        toks.append(_Tok("nl", "\n", line, pos - line_start + 1))
    toks.append(_Tok("eof", "", line + 1, 1))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self, k: int = 0) -> _Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def next(self) -> _Tok:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def error(self, msg: str, tok: _Tok | None = None) -> FsrSyntaxError:
        tok = tok or self.peek()
        found = "end of input" if tok.kind == "eof" else ("end of line" if tok.kind == "nl" else repr(tok.text))
        return FsrSyntaxError(f"{msg}, found {found}", tok.line, tok.col)

    def expect(self, kind: str, text: str | None = None) -> _Tok:
        tok = self.peek()
        if tok.kind != kind or (text is not None and tok.text != text):
            want = repr(text) if text is not None else kind
            raise self.error(f"expected {want}")
        return self.next()

    def accept(self, kind: str, text: str | None = None) -> _Tok | None:
        tok = self.peek()
        if tok.kind == kind and (text is None or tok.text == text):
            return self.next()
        return None

    def ident(self) -> _Tok:
        return self.expect("id")

    def integer(self) -> tuple[int, _Tok]:
        tok = self.expect("int")
        return int(tok.text), tok


@dataclass
class _Raw:
    name: tuple[str, _Tok] | None = None
    vertices: list = None
    edges: list = None
    words: list = None
    tiles: list = None
    schemes: list = None
    sides: list = None

    def __post_init__(self):
        for f in ("vertices", "edges", "words", "tiles", "schemes", "sides"):
            setattr(self, f, [])


def _parse_raw(text: str) -> _Raw:
    p = _Parser(text)
    raw = _Raw()
    while True:
        while p.accept("nl"):
            pass
        tok = p.peek()
        if tok.kind == "eof":
            break
        if tok.kind != "kw":
            raise p.error("expected a declaration keyword")
        kw = p.next().text
        if kw == "fsr":
            if raw.name is not None:
                raise FsrReferenceError("duplicate 'fsr' header", tok.line, tok.col)
            name = p.ident()
            raw.name = (name.text, name)
        elif kw == "vertex":
            p.peek().kind == "id" or p.expect("id")
            while p.peek().kind == "id":
                v = p.next()
                hint = None
                if p.accept("punct", ":"):
                    hint = p.ident().text
                    if hint not in ("none", "finite", "infinite"):
                        raise FsrSyntaxError(f"unknown weight hint {hint!r}", v.line, v.col)
                raw.vertices.append((v.text, hint, v))
        elif kw == "edge":
            eid = p.ident()
            if p.accept("punct", ":"):
                tail = p.ident()
                p.expect("arrow")
                head = p.ident()
                raw.edges.append((eid.text, tail, head, eid))
            elif p.accept("kw", "subdivides"):
                p.expect("punct", "[")
                images = [p.expect("sedge")]
                points = []
                while not p.accept("punct", "]"):
                    points.append(p.ident())
                    images.append(p.expect("sedge"))
                raw.words.append((eid.text, images, points, eid))
            else:
                raise p.error("expected ':' or 'subdivides'")
        elif kw == "tile":
            tid = p.ident()
            p.expect("punct", ":")
            p.expect("punct", "[")
            slots = []
            while not p.accept("punct", "]"):
                e = p.expect("sedge")
                c = p.ident()
                slots.append((e, c))
            raw.tiles.append((tid.text, slots, tid))
        elif kw == "subdivision":
            raw.schemes.append(_parse_scheme(p))
        elif kw == "sphere":
            p.expect("punct", "{")
            while not p.accept("punct", "}"):
                p.expect("kw", "side")
                eid = p.ident()
                p.expect("punct", "=")
                pair = []
                for k in range(2):
                    if k:
                        p.expect("punct", ",")
                    p.expect("punct", "(")
                    t = p.ident()
                    p.expect("punct", ",")
                    p.expect("kw", "slot")
                    s, stok = p.integer()
                    p.expect("punct", ")")
                    pair.append((t, s, stok))
                raw.sides.append((eid, pair))
        else:
            raise FsrSyntaxError(f"unexpected keyword {kw!r}", tok.line, tok.col)
        if p.peek().kind not in ("nl", "eof"):
            raise p.error("expected end of line")
    return raw


def _parse_endpoint(p: _Parser):
    tok = p.expect("kw")
    if tok.text == "corner":
        i, itok = p.integer()
        return ("corner", i), itok
    if tok.text == "bp":
        b = p.expect("bp")
        s, k = b.text.split(".")
        return ("bp", int(s), int(k)), b
    if tok.text == "interior":
        v = p.ident()
        return ("interior", v.text), v
    raise p.error("expected 'corner', 'bp' or 'interior'", tok)


def _parse_scheme(p: _Parser):
    tid = p.ident()
    p.expect("punct", "{")
    interior, edges, faces = [], [], []
    while not p.accept("punct", "}"):
        tok = p.expect("kw")
        if tok.text == "interior":
            vid = p.ident()
            p.expect("punct", ":")
            vt = p.ident()
            interior.append((vid, vt))
        elif tok.text == "edge":
            lid = p.ident()
            p.expect("punct", ":")
            tail = _parse_endpoint(p)
            p.expect("arrow")
            head = _parse_endpoint(p)
            p.expect("kw", "image")
            img = p.expect("sedge")
            edges.append((lid, tail, head, img))
        elif tok.text == "face":
            fid = p.ident()
            p.expect("punct", ":")
            p.expect("punct", "[")
            sides = []
            while not p.accept("punct", "]"):
                sides.append(p.expect("sedge"))
            p.expect("kw", "image")
            img = p.ident()
            p.expect("kw", "rot")
            rot, _ = p.integer()
            faces.append((fid, sides, img, rot))
        else:
            raise p.error("expected 'interior', 'edge' or 'face'", tok)
    return (tid, interior, edges, faces)


def _unique(items, what):
    seen = {}
    for ident, tok in items:
        if ident in seen:
            raise FsrReferenceError(f"duplicate {what} {ident!r}", tok.line, tok.col)
        seen[ident] = tok
    return seen


def parse_fsr(text: str) -> FsrSpec:
    """Parse ``.fsr`` text into an :class:`FsrSpec`.

    Only names are resolved here; use :func:`fsrlab.validate.validate_fsr` for
    the topological and cellular checks.
    """
    raw = _parse_raw(text)
    if raw.name is None:
        raise FsrSyntaxError("missing 'fsr <name>' header", 1, 1)

    vids = _unique([(v, tok) for v, _, tok in raw.vertices], "vertex")
    vertices = tuple(VertexType(v, h) for v, h, _ in raw.vertices)

    def need_vertex(tok):
        if tok.text not in vids:
            raise FsrReferenceError(f"unknown vertex {tok.text!r}", tok.line, tok.col)
        return tok.text

    eids = _unique([(e, tok) for e, _, _, tok in raw.edges], "edge")

    def need_edge(tok) -> DirectedEdge:
        d = DirectedEdge.parse(tok.text)
        if d.edge not in eids:
            raise FsrReferenceError(f"unknown edge {d.edge!r}", tok.line, tok.col)
        return d

    words = {}
    for eid, images, points, tok in raw.words:
        if eid not in eids:
            raise FsrReferenceError(f"unknown edge {eid!r}", tok.line, tok.col)
        if eid in words:
            raise FsrReferenceError(f"duplicate subdivision word for edge {eid!r}", tok.line, tok.col)
        words[eid] = (tuple(need_edge(t) for t in images), tuple(need_vertex(t) for t in points))
    edges = []
    for eid, tail, head, tok in raw.edges:
        if eid not in words:
            raise FsrReferenceError(f"edge {eid!r} has no subdivision word", tok.line, tok.col)
        images, points = words[eid]
        edges.append(EdgeType(eid, need_vertex(tail), need_vertex(head), images, points))
    edge_by_id = {e.id: e for e in edges}

    tids = _unique([(t, tok) for t, _, tok in raw.tiles], "tile")
    tiles = []
    for tid, slots, _ in raw.tiles:
        tiles.append(
            TileType(tid, tuple(need_edge(e) for e, _ in slots), tuple(need_vertex(c) for _, c in slots))
        )
    tile_by_id = {t.id: t for t in tiles}

    def need_tile(tok):
        if tok.text not in tids:
            raise FsrReferenceError(f"unknown tile {tok.text!r}", tok.line, tok.col)
        return tok.text

    schemes = {}
    for tid_tok, interior, ledges, lfaces in raw.schemes:
        tid = need_tile(tid_tok)
        if tid in schemes:
            raise FsrReferenceError(f"duplicate subdivision for tile {tid!r}", tid_tok.line, tid_tok.col)
        tile = tile_by_id[tid]
        inames = _unique([(v.text, v) for v, _ in interior], "interior vertex")
        _unique([(e.text, e) for e, *_ in ledges], "local edge")
        _unique([(f.text, f) for f, *_ in lfaces], "local face")

        def endpoint(ep):
            (form, tok) = ep
            if form[0] == "corner":
                if not 0 <= form[1] < tile.size:
                    raise FsrReferenceError(f"tile {tid!r} has no corner {form[1]}", tok.line, tok.col)
            elif form[0] == "bp":
                s, k = form[1], form[2]
                if not 0 <= s < tile.size:
                    raise FsrReferenceError(f"tile {tid!r} has no slot {s}", tok.line, tok.col)
                pieces = edge_by_id[tile.edges[s].edge].pieces
                if not 1 <= k < pieces:
                    raise FsrReferenceError(
                        f"slot {s} of tile {tid!r} has no boundary point {k}", tok.line, tok.col
                    )
            elif form[1] not in inames:
                raise FsrReferenceError(f"unknown interior vertex {form[1]!r}", tok.line, tok.col)
            return form

        local_edges = tuple(
            LocalEdge(lid.text, endpoint(tail), endpoint(head), need_edge(img))
            for lid, tail, head, img in ledges
        )
        lnames = {e.id for e in local_edges}
        faces = []
        for fid, sides, img, rot in lfaces:
            refs = []
            for s in sides:
                d = DirectedEdge.parse(s.text)
                if d.edge not in lnames:
                    raise FsrReferenceError(f"unknown local edge {d.edge!r}", s.line, s.col)
                refs.append((d.edge, d.sign))
            faces.append(LocalFace(fid.text, tuple(refs), need_tile(img), rot))
        schemes[tid] = SubdivisionScheme(
            tid, tuple((v.text, need_vertex(vt)) for v, vt in interior), local_edges, tuple(faces)
        )
    for tid, _, tok in raw.tiles:
        if tid not in schemes:
            raise FsrReferenceError(f"tile {tid!r} has no subdivision", tok.line, tok.col)

    sides = []
    seen_sides = set()
    for etok, pair in raw.sides:
        eid = etok.text
        if eid not in eids:
            raise FsrReferenceError(f"unknown edge {eid!r}", etok.line, etok.col)
        if eid in seen_sides:
            raise FsrReferenceError(f"duplicate side record for edge {eid!r}", etok.line, etok.col)
        seen_sides.add(eid)
        resolved = []
        for ttok, slot, stok in pair:
            tid = need_tile(ttok)
            if not 0 <= slot < tile_by_id[tid].size:
                raise FsrReferenceError(f"tile {tid!r} has no slot {slot}", stok.line, stok.col)
            resolved.append((tid, slot))
        sides.append((eid, resolved[0], resolved[1]))

    return FsrSpec(
        name=raw.name[0],
        vertex_types=vertices,
        edge_types=tuple(edges),
        tile_types=tuple(tiles),
        schemes=tuple(schemes[t.id] for t in tiles),
        gluing=SphereGluing(tuple(sides)),
    )


# ---------------------------------------------------------------------------
# serialization


def _endpoint_text(ep: Endpoint) -> str:
    if ep[0] == "corner":
        return f"corner {ep[1]}"
    if ep[0] == "bp":
        return f"bp {ep[1]}.{ep[2]}"
    return f"interior {ep[1]}"


def _lines(spec: FsrSpec) -> Iterator[str]:
    yield f"fsr {spec.name}"
    yield ""
    yield "vertex " + " ".join(
        v.id if v.weight_hint is None else f"{v.id}:{v.weight_hint}" for v in spec.vertex_types
    )
    yield ""
    for e in spec.edge_types:
        yield f"edge {e.id} : {e.tail} -> {e.head}"
    for e in spec.edge_types:
        word = [str(e.images[0])]
        for pt, img in zip(e.points, e.images[1:]):
            word += [pt, str(img)]
        yield f"edge {e.id} subdivides [ {' '.join(word)} ]"
    yield ""
    for t in spec.tile_types:
        body = " ".join(f"{d} {c}" for d, c in zip(t.edges, t.corners))
        yield f"tile {t.id} : [ {body} ]"
    for s in spec.schemes:
        yield ""
        yield f"subdivision {s.tile} {{"
        for vid, vt in s.interior:
            yield f"  interior {vid} : {vt}"
        for le in s.edges:
            yield f"  edge {le.id} : {_endpoint_text(le.tail)} -> {_endpoint_text(le.head)} image {le.image}"
        for lf in s.faces:
            sides = " ".join(("+" if sg > 0 else "-") + eid for eid, sg in lf.sides)
            yield f"  face {lf.id} : [ {sides} ] image {lf.image} rot {lf.rot}"
        yield "}"
    yield ""
    yield "sphere {"
    for eid, (t1, s1), (t2, s2) in spec.gluing.sides:
        yield f"  side {eid} = ({t1}, slot {s1}), ({t2}, slot {s2})"
    yield "}"


def serialize_fsr(spec: FsrSpec) -> str:
    """Canonical text for ``spec``; declarations keep their order within each section."""
    return "\n".join(_lines(spec)) + "\n"
