"""Level complexes R^n(S²) and R^n(t) built by pasting subdivision schemes.

Every level-n cell ``c`` carries the *label* ``f^n(c)``, a cell of the base
complex.  Edges are stored in canonical direction, i.e. the direction that
``f^n`` maps positively onto the label edge, so a face of type ``t`` traverses
the edge in its slot ``i`` with the sign of slot ``i`` of ``t``.  Subdividing a
face of type ``t`` is then a copy of ``scheme(t)`` and subdividing an edge of
label ``e`` is a copy of the subdivision word of ``e``; no search is needed.

Image labels (the subdivision map itself) are threaded through *addresses*:
the image of the child at address ``α`` of a level-n cell ``X`` is the child at
address ``α`` of ``f(X)``, read from the sphere level that subdivided
``f(X)``.
"""

from __future__ import annotations

import functools
import os
from collections import deque
from dataclasses import dataclass, field

from .model import FsrSpec
from .validate import CompiledRule, compile_rule

__all__ = [
    "DEFAULT_CELL_BUDGET",
    "BudgetExceeded",
    "LevelComplex",
    "Census",
    "ReturningTile",
    "GrowthConstants",
    "Tower",
    "get_tower",
    "subdivide_sphere",
    "subdivide_tile",
    "census",
    "valences",
    "local_degree",
    "find_returning_tile",
    "growth_constants",
]

DEFAULT_CELL_BUDGET = 5_000_000


class BudgetExceeded(RuntimeError):
    """Raised before building a level whose cell count would exceed the budget."""

    def __init__(self, level: int, projected: int, budget: int):
        self.level = level
        self.projected = projected
        self.budget = budget
        super().__init__(
            f"cell budget exceeded: level {level} would bring the total to {projected} cells "
            f"(budget {budget}); raise it with FSRLAB_CELL_BUDGET"
        )


def _budget_from_env() -> int:
    raw = os.environ.get("FSRLAB_CELL_BUDGET")
    if not raw:
        return DEFAULT_CELL_BUDGET
    try:
        return int(float(raw))
    except ValueError:
        raise ValueError(f"FSRLAB_CELL_BUDGET must be an integer, got {raw!r}") from None


@dataclass
class LevelComplex:
    """One level of a sphere tower (``tile is None``) or of a tile tower.

    Parents are ``(dim, index)`` pairs in the previous level; level 0 has the
    single level −1 tile ``(2, 0)`` as parent of every cell.  ``*_img`` hold the
    image under the subdivision map as an index of the previous *sphere*
    level (undefined, ``-1``, at level 0).
    """

    level: int
    tile: int | None
    rule: CompiledRule = field(repr=False)
    # vertices
    vlabel: list[int]
    vimg: list[int]
    vpar: list[tuple[int, int]]
    vbirth: list[int]
    # edges (canonical direction)
    etail: list[int]
    ehead: list[int]
    elabel: list[int]
    eimg: list[int]
    epar: list[tuple[int, int]]
    eroot: list[int]  # level-0 edge containing the edge, or -1
    # faces
    ftype: list[int]
    fedges: list[tuple[int, ...]]
    fcorners: list[tuple[int, ...]]
    fimg: list[int]
    fpar: list[int]
    froot: list[tuple[int, ...]]  # per slot: slot of the level-0 face containing it, or -1
    faddr: list[int]  # index of the scheme face this face was copied from (-1 at level 0)
    # children of the previous level's cells
    pts: list[tuple[int, ...]]
    pieces: list[tuple[int, ...]]
    fint_v: list[tuple[int, ...]]
    fint_e: list[tuple[int, ...]]
    fchild: list[tuple[int, ...]]
    n_base_vertices: int = 0

    @property
    def kind(self) -> str:
        return "sphere" if self.tile is None else "tile"

    @property
    def n_vertices(self) -> int:
        return len(self.vlabel)

    @property
    def n_edges(self) -> int:
        return len(self.etail)

    @property
    def n_faces(self) -> int:
        return len(self.ftype)

    @property
    def n_cells(self) -> int:
        return self.n_vertices + self.n_edges + self.n_faces

    def euler_characteristic(self) -> int:
        return self.n_vertices - self.n_edges + self.n_faces

    def face_slot_signs(self, f: int) -> list[int]:
        return self.rule.slot_sign[self.ftype[f]]

    def is_base_vertex(self, v: int) -> bool:
        """Whether ``v`` is a vertex of the level-0 complex of this tower."""
        return v < self.n_base_vertices

    def valences(self) -> list[int]:
        val = [0] * self.n_vertices
        for a, b in zip(self.etail, self.ehead):
            val[a] += 1
            val[b] += 1
        return val

    @functools.cached_property
    def edge_sides(self) -> list[list[tuple[int, int]]]:
        """For every edge the list of ``(face, slot)`` sides it occupies (1 or 2)."""
        sides: list[list[tuple[int, int]]] = [[] for _ in range(self.n_edges)]
        for f, edges in enumerate(self.fedges):
            for i, e in enumerate(edges):
                sides[e].append((f, i))
        return sides

    @functools.cached_property
    def vertex_faces(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.n_vertices)]
        for f, corners in enumerate(self.fcorners):
            for v in sorted(set(corners)):
                out[v].append(f)
        return out

    def boundary_chain(self, slot: int) -> list[tuple[int, int]]:
        """Tile levels only: ``(edge, sign)`` pairs realizing model ``slot`` counterclockwise."""
        if self.tile is None:
            raise ValueError("boundary chains exist only for tile complexes")
        edges = [(f, i) for f in range(self.n_faces) for i, r in enumerate(self.froot[f]) if r == slot]
        # order along the slot by walking from its starting corner
        start = (slot - 1) % self.rule.tile_size[self.tile]
        by_tail = {}
        for f, i in edges:
            e = self.fedges[f][i]
            sg = self.rule.slot_sign[self.ftype[f]][i]
            tail = self.etail[e] if sg > 0 else self.ehead[e]
            by_tail.setdefault(tail, []).append((e, sg))
        chain, v = [], start
        for _ in range(len(edges)):
            e, sg = by_tail[v].pop()
            chain.append((e, sg))
            v = self.ehead[e] if sg > 0 else self.etail[e]
        return chain


@dataclass(frozen=True)
class Census:
    level: int
    vertices: int
    edges: int
    faces: int
    faces_by_type: dict[str, int]

    @property
    def counts(self) -> tuple[int, int, int]:
        return (self.vertices, self.edges, self.faces)

    def to_dict(self) -> dict:
        return {
            "level": self.level,
            "V": self.vertices,
            "E": self.edges,
            "F": self.faces,
            "faces_by_type": dict(self.faces_by_type),
        }


def census(cx: LevelComplex) -> Census:
    by_type = {t: 0 for t in cx.rule.tile_ids}
    for t in cx.ftype:
        by_type[cx.rule.tile_ids[t]] += 1
    return Census(cx.level, cx.n_vertices, cx.n_edges, cx.n_faces, by_type)


# ---------------------------------------------------------------------------
# construction


def _sphere_level0(rule: CompiledRule) -> LevelComplex:
    nv, ne, nt = rule.n_vertices, rule.n_edges, rule.n_tiles
    return LevelComplex(
        level=0,
        tile=None,
        rule=rule,
        vlabel=list(range(nv)),
        vimg=[-1] * nv,
        vpar=[(2, 0)] * nv,
        vbirth=[0] * nv,
        etail=list(rule.edge_tail),
        ehead=list(rule.edge_head),
        elabel=list(range(ne)),
        eimg=[-1] * ne,
        epar=[(2, 0)] * ne,
        eroot=list(range(ne)),
        ftype=list(range(nt)),
        fedges=[tuple(rule.slot_edge[t]) for t in range(nt)],
        fcorners=[tuple(rule.corner[t]) for t in range(nt)],
        fimg=[-1] * nt,
        fpar=[0] * nt,
        froot=[tuple(range(rule.tile_size[t])) for t in range(nt)],
        faddr=[-1] * nt,
        pts=[],
        pieces=[],
        fint_v=[()],
        fint_e=[()],
        fchild=[tuple(range(nt))],
        n_base_vertices=nv,
    )


def _tile_level0(rule: CompiledRule, t: int) -> LevelComplex:
    n = rule.tile_size[t]
    etail, ehead = [], []
    for i in range(n):
        a, b = (i - 1) % n, i
        if rule.slot_sign[t][i] < 0:
            a, b = b, a
        etail.append(a)
        ehead.append(b)
    return LevelComplex(
        level=0,
        tile=t,
        rule=rule,
        vlabel=list(rule.corner[t]),
        vimg=[-1] * n,
        vpar=[(2, 0)] * n,
        vbirth=[0] * n,
        etail=etail,
        ehead=ehead,
        elabel=list(rule.slot_edge[t]),
        eimg=[-1] * n,
        epar=[(2, 0)] * n,
        eroot=list(range(n)),
        ftype=[t],
        fedges=[tuple(range(n))],
        fcorners=[tuple(range(n))],
        fimg=[-1],
        fpar=[0],
        froot=[tuple(range(n))],
        faddr=[-1],
        pts=[],
        pieces=[],
        fint_v=[()],
        fint_e=[()],
        fchild=[(0,)],
        n_base_vertices=n,
    )


def _projected_cells(rule: CompiledRule, prev: LevelComplex) -> int:
    nv, ne, nf = prev.n_vertices, 0, 0
    for lab in prev.elabel:
        k = len(rule.word_img[lab])
        nv += k - 1
        ne += k
    for t in prev.ftype:
        cs = rule.schemes[t]
        nv += len(cs.interior_labels)
        ne += len(cs.int_edges)
        nf += len(cs.face_type)
    return nv + ne + nf


def _step(prev: LevelComplex, src: LevelComplex | None) -> LevelComplex:
    """Subdivide ``prev`` (level n) once.

    ``src`` is the sphere level n, whose children tables describe how the
    level-(n−1) images of ``prev``'s cells were subdivided; it is ``None``
    when ``prev`` is level 0 (images are then the labels themselves).
    """
    rule = prev.rule
    n1 = prev.level + 1
    vmap = rule.vmap

    vlabel = [vmap[x] for x in prev.vlabel]
    if src is None:
        vimg = list(vlabel)
    else:
        vimg = list(prev.vimg)
    vpar = [(0, v) for v in range(prev.n_vertices)]
    vbirth = list(prev.vbirth)

    etail, ehead, elabel, eimg, epar, eroot = [], [], [], [], [], []
    pts_tab, pieces_tab = [], []

    # edges: interior points then pieces
    for E in range(prev.n_edges):
        lab = prev.elabel[E]
        word_img, word_pts = rule.word_img[lab], rule.word_pts[lab]
        if src is not None:
            img_E = prev.eimg[E]
            src_pts, src_pieces = src.pts[img_E], src.pieces[img_E]
        base = len(vlabel)
        pts = tuple(range(base, base + len(word_pts)))
        for j, p in enumerate(word_pts):
            vlabel.append(p)
            vimg.append(p if src is None else src_pts[j])
            vpar.append((1, E))
            vbirth.append(n1)
        pts_tab.append(pts)
        pos = (prev.etail[E],) + pts + (prev.ehead[E],)
        ebase = len(etail)
        for q, (img_e, rho) in enumerate(word_img):
            a, b = pos[q], pos[q + 1]
            if rho < 0:
                a, b = b, a
            etail.append(a)
            ehead.append(b)
            elabel.append(img_e)
            eimg.append(img_e if src is None else src_pieces[q])
            epar.append((1, E))
            eroot.append(prev.eroot[E])
        pieces_tab.append(tuple(range(ebase, ebase + len(word_img))))

    ftype, fedges, fcorners, fimg, fpar, froot, faddr = [], [], [], [], [], [], []
    fint_v_tab, fint_e_tab, fchild_tab = [], [], []
    slot_sign = rule.slot_sign
    for F in range(prev.n_faces):
        t = prev.ftype[F]
        cs = rule.schemes[t]
        n = rule.tile_size[t]
        if src is not None:
            img_F = prev.fimg[F]
            src_iv, src_ie, src_fc = src.fint_v[img_F], src.fint_e[img_F], src.fchild[img_F]
        corners = prev.fcorners[F]
        slot_edges = prev.fedges[F]
        signs = slot_sign[t]
        ivbase = len(vlabel)
        for j, lab in enumerate(cs.interior_labels):
            vlabel.append(lab)
            vimg.append(lab if src is None else src_iv[j])
            vpar.append((2, F))
            vbirth.append(n1)
        fint_v_tab.append(tuple(range(ivbase, ivbase + len(cs.interior_labels))))

        def vertex_of(ep):
            kind = ep[0]
            if kind == "c":
                return corners[ep[1]]
            if kind == "i":
                return ivbase + ep[1]
            s, k = ep[1], ep[2]
            E = slot_edges[s]
            K = len(pts_tab[E]) + 1
            return pts_tab[E][k - 1 if signs[s] > 0 else K - 1 - k]

        iebase = len(etail)
        for j, (a, b, lab) in enumerate(cs.int_edges):
            etail.append(vertex_of(a))
            ehead.append(vertex_of(b))
            elabel.append(lab)
            eimg.append(lab if src is None else src_ie[j])
            epar.append((2, F))
            eroot.append(-1)
        fint_e_tab.append(tuple(range(iebase, iebase + len(cs.int_edges))))

        def edge_of(local):
            real = cs.edge_realization[local]
            if real[0] == "i":
                return iebase + real[1]
            s, q = real[1], real[2]
            E = slot_edges[s]
            K = len(pieces_tab[E])
            return pieces_tab[E][q if signs[s] > 0 else K - 1 - q]

        fbase = len(ftype)
        prev_root = prev.froot[F]
        for j, tt in enumerate(cs.face_type):
            es = tuple(edge_of(le) for le in cs.face_slot_edge[j])
            tsign = slot_sign[tt]
            cs_corners = tuple(ehead[e] if tsign[i] > 0 else etail[e] for i, e in enumerate(es))
            ftype.append(tt)
            fedges.append(es)
            fcorners.append(cs_corners)
            fimg.append(tt if src is None else src_fc[j])
            fpar.append(F)
            froot.append(tuple(prev_root[s] if s >= 0 else -1 for s in cs.face_slot_parent[j]))
            faddr.append(j)
        fchild_tab.append(tuple(range(fbase, fbase + len(cs.face_type))))

    return LevelComplex(
        level=n1,
        tile=prev.tile,
        rule=rule,
        vlabel=vlabel,
        vimg=vimg,
        vpar=vpar,
        vbirth=vbirth,
        etail=etail,
        ehead=ehead,
        elabel=elabel,
        eimg=eimg,
        epar=epar,
        eroot=eroot,
        ftype=ftype,
        fedges=fedges,
        fcorners=fcorners,
        fimg=fimg,
        fpar=fpar,
        froot=froot,
        faddr=faddr,
        pts=pts_tab,
        pieces=pieces_tab,
        fint_v=fint_v_tab,
        fint_e=fint_e_tab,
        fchild=fchild_tab,
        n_base_vertices=prev.n_base_vertices,
    )


class Tower:
    """Memoized sphere levels and tile levels of one rule, sharing one cell budget."""

    def __init__(self, rule: CompiledRule, budget: int | None = None):
        self.rule = rule
        self.budget = _budget_from_env() if budget is None else int(budget)
        self._sphere: list[LevelComplex] = [_sphere_level0(rule)]
        self._tiles: dict[int, list[LevelComplex]] = {}
        self.total_cells = self._sphere[0].n_cells

    def _extend(self, levels: list[LevelComplex], n: int, is_tile: bool) -> None:
        while len(levels) <= n:
            prev = levels[-1]
            src = None
            if prev.level > 0:
                src = self.sphere(prev.level) if is_tile else prev
            projected = self.total_cells + _projected_cells(self.rule, prev)
            if projected > self.budget:
                raise BudgetExceeded(prev.level + 1, projected, self.budget)
            nxt = _step(prev, src)
            self.total_cells += nxt.n_cells
            levels.append(nxt)

    def sphere(self, n: int) -> LevelComplex:
        if n < 0:
            raise ValueError("level must be ≥ 0")
        self._extend(self._sphere, n, is_tile=False)
        return self._sphere[n]

    def tile(self, t: int | str, n: int) -> LevelComplex:
        if n < 0:
            raise ValueError("level must be ≥ 0")
        ti = self.rule.tile_index(t)
        levels = self._tiles.setdefault(ti, [_tile_level0(self.rule, ti)])
        self._extend(levels, n, is_tile=True)
        return levels[n]

    @property
    def computed_sphere_levels(self) -> int:
        return len(self._sphere) - 1


@functools.lru_cache(maxsize=32)
def _tower_for(spec: FsrSpec, budget: int) -> Tower:
    return Tower(compile_rule(spec), budget)


def get_tower(spec: FsrSpec | CompiledRule, budget: int | None = None) -> Tower:
    """Shared memoized tower for ``spec`` (one per spec and budget)."""
    rule = compile_rule(spec)
    b = _budget_from_env() if budget is None else int(budget)
    return _tower_for(rule.spec, b)


def subdivide_sphere(spec: FsrSpec | CompiledRule, n: int, budget: int | None = None) -> LevelComplex:
    """R^n(S²) with parent and image labels for every cell."""
    return get_tower(spec, budget).sphere(n)


def subdivide_tile(spec: FsrSpec | CompiledRule, t: int | str, n: int, budget: int | None = None) -> LevelComplex:
    """R^n(t) as a disk complex; its images point into R^{n−1}(S²)."""
    return get_tower(spec, budget).tile(t, n)


def valences(spec: FsrSpec | CompiledRule, n: int) -> list[int]:
    return subdivide_sphere(spec, n).valences()


def local_degree(spec: FsrSpec | CompiledRule, v: int | str) -> int:
    """Local degree of the subdivision map at a base vertex, ``val_1(v) / val_0(f(v))``."""
    rule = compile_rule(spec)
    vi = rule.vertex_ids.index(v) if isinstance(v, str) else v
    val0 = subdivide_sphere(rule, 0).valences()
    val1 = subdivide_sphere(rule, 1).valences()
    num, den = val1[vi], val0[rule.vmap[vi]]
    if num % den:
        raise ValueError(f"non-integral local degree {num}/{den} at vertex {rule.vertex_ids[vi]}")
    return num // den


# ---------------------------------------------------------------------------
# returning tiles and growth constants


@dataclass(frozen=True)
class ReturningTile:
    n: int
    cycle: tuple[str, ...]
    witness: int  # face index at level n of the sphere tower
    addresses: tuple[int, ...]  # scheme face indices followed from the level-0 tile
    tile: str

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "cycle": list(self.cycle),
            "witness": {"level": self.n, "dim": 2, "index": self.witness},
            "addresses": list(self.addresses),
            "tile": self.tile,
        }


@dataclass(frozen=True)
class GrowthConstants:
    a: int
    b_zero_possible: bool
    returning: ReturningTile

    def to_dict(self) -> dict:
        return {"a": self.a, "b_zero_possible": self.b_zero_possible, "returning": self.returning.to_dict()}


def tile_digraph(rule: CompiledRule) -> list[list[int]]:
    """``t -> t'`` when a level-1 tile inside ``t`` maps onto ``t'``."""
    return [sorted(set(cs.face_type)) for cs in rule.schemes]


def _shortest_cycle_through(succ: list[list[int]], s: int) -> list[int] | None:
    prev = {s: None}
    queue = deque([s])
    while queue:
        u = queue.popleft()
        for w in succ[u]:
            if w == s:
                path = [u]
                while prev[path[-1]] is not None:
                    path.append(prev[path[-1]])
                return path[::-1]
            if w not in prev:
                prev[w] = u
                queue.append(w)
    return None


def find_returning_tile(spec: FsrSpec | CompiledRule) -> ReturningTile:
    """Smallest ``n`` with a level-n tile ``s ⊆ t`` and ``f^n(s) = t``.

    Follows a shortest cycle ``t_0 -> t_1 -> ... -> t_0`` of the tile digraph
    and descends through the children tables, choosing at step ``i`` a child
    of type ``t_{i+1}``; the tile reached maps onto ``t_0`` under ``f^n``.
    """
    rule = compile_rule(spec)
    succ = tile_digraph(rule)
    best = None
    for t in range(rule.n_tiles):
        cyc = _shortest_cycle_through(succ, t)
        if cyc is not None and (best is None or len(cyc) < len(best)):
            best = cyc
    assert best is not None  # every tile has an out-arc, so a cycle exists
    n = len(best)
    tower = get_tower(rule)
    face = best[0]
    addresses = []
    for i in range(n):
        cx = tower.sphere(i + 1)
        nxt = best[(i + 1) % n]
        cs = rule.schemes[best[i]]
        j = cs.face_type.index(nxt)
        addresses.append(j)
        face = cx.fchild[face][j]
    return ReturningTile(
        n=n,
        cycle=tuple(rule.tile_ids[t] for t in best),
        witness=face,
        addresses=tuple(addresses),
        tile=rule.tile_ids[best[0]],
    )


def iterate_image(spec: FsrSpec | CompiledRule, level: int, face: int, steps: int) -> int:
    """Apply the subdivision map ``steps`` times to a face of R^level(S²)."""
    tower = get_tower(spec)
    for k in range(steps):
        face = tower.sphere(level - k).fimg[face]
    return face


def iterate_parent(spec: FsrSpec | CompiledRule, level: int, face: int, steps: int) -> int:
    tower = get_tower(spec)
    for k in range(steps):
        face = tower.sphere(level - k).fpar[face]
    return face


def growth_constants(spec: FsrSpec | CompiledRule) -> GrowthConstants:
    """Constants ``a`` (number of base tiles) and whether ``b = 0`` may be taken."""
    rule = compile_rule(spec)
    ret = find_returning_tile(rule)
    return GrowthConstants(a=rule.n_tiles, b_zero_possible=ret.n == 1, returning=ret)
