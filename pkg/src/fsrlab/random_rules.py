"""Random valid rules from branched covers of a polygonal pillowcase.

The base sphere is two n-gons P and Q glued along edges ``e_0..e_{n-1}``
(``e_i`` runs from ``V_i`` to ``V_{i+1}``).  A degree-d cover branched over
the ``V_i`` is chosen by gluing d copies of each tile with permutations.
When it is a sphere, any simple edge cycle γ through n marked vertices
cuts it into two disks; the disk on the left of γ is the subdivision of P,
the one on the right that of Q, and every cell maps to the cell it covers.
The subdivision map is then an orientation-preserving branched cover of
degree d, so the result is valid by construction.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .model import FsrSpec, parse_fsr

__all__ = ["PillowCover", "pillow_cover", "cover_to_text", "random_rule", "random_rules"]


class _UF:
    def __init__(self, n: int):
        self.p = list(range(n))

    def find(self, x: int) -> int:
        while self.p[x] != x:
            self.p[x] = self.p[self.p[x]]
            x = self.p[x]
        return x

    def union(self, a: int, b: int) -> None:
        a, b = self.find(a), self.find(b)
        if a != b:
            self.p[max(a, b)] = min(a, b)


@dataclass
class PillowCover:
    """The level-1 complex of a pillow rule: faces ``P_k`` (index k) and ``Q_k`` (index d + k).

    Edge ``i * d + k`` is the lift of ``e_i`` on the boundary of ``P_k``;
    ``face_edges[f][s]`` is the edge on slot ``s`` of face ``f``.
    """

    n: int
    d: int
    vertex_label: list[int]  # base vertex index covered by each vertex
    etail: list[int]
    ehead: list[int]
    elabel: list[int]
    face_edges: list[list[int]]

    @property
    def n_vertices(self) -> int:
        return len(self.vertex_label)

    @property
    def n_edges(self) -> int:
        return len(self.etail)

    def euler(self) -> int:
        return self.n_vertices - self.n_edges + 2 * self.d

    def connected(self) -> bool:
        uf = _UF(2 * self.d)
        for f, edges in enumerate(self.face_edges):
            for g, other in enumerate(self.face_edges):
                if set(edges) & set(other):
                    uf.union(f, g)
        return len({uf.find(f) for f in range(2 * self.d)}) == 1

    def simple_cycles(self, min_length: int, limit: int = 20_000) -> list[list[tuple[int, int]]]:
        """Directed simple edge cycles as ``(edge, +1|-1)`` lists, each starting at its least vertex."""
        inc: list[list[tuple[int, int, int]]] = [[] for _ in range(self.n_vertices)]
        for e in range(self.n_edges):
            inc[self.etail[e]].append((e, 1, self.ehead[e]))
            inc[self.ehead[e]].append((e, -1, self.etail[e]))
        out: list[list[tuple[int, int]]] = []

        def dfs(start, v, path, seen):
            if len(out) >= limit:
                return
            for e, s, w in inc[v]:
                if path and e == path[-1][0]:
                    continue
                if w == start and len(path) + 1 >= min_length:
                    out.append(path + [(e, s)])
                elif w > start and w not in seen:
                    seen.add(w)
                    dfs(start, w, path + [(e, s)], seen)
                    seen.discard(w)

        for start in range(self.n_vertices):
            dfs(start, start, [], {start})
        return out


def pillow_cover(n: int, perms: list[list[int]]) -> PillowCover:
    """Glue ``P_k`` slot i to ``Q_{perms[i][k]}`` slot ``n-1-i`` for every i and k."""
    d = len(perms[0])
    # corner slots: face f, slot s -> id f * n + s (corner s ends slot s)
    uf = _UF(2 * d * n)
    for i in range(n):
        j = n - 1 - i
        for k in range(d):
            m = d + perms[i][k]
            uf.union(k * n + i, m * n + (j - 1) % n)  # head of e_i
            uf.union(k * n + (i - 1) % n, m * n + j)  # tail of e_i
    roots = sorted({uf.find(x) for x in range(2 * d * n)})
    vid = {r: t for t, r in enumerate(roots)}
    label = [0] * len(roots)
    for k in range(d):
        for s in range(n):
            label[vid[uf.find(k * n + s)]] = (s + 1) % n
    etail, ehead, elabel = [], [], []
    face_edges = [[0] * n for _ in range(2 * d)]
    for i in range(n):
        for k in range(d):
            e = i * d + k
            etail.append(vid[uf.find(k * n + (i - 1) % n)])
            ehead.append(vid[uf.find(k * n + i)])
            elabel.append(i)
            face_edges[k][i] = e
            face_edges[d + perms[i][k]][n - 1 - i] = e
    return PillowCover(n, d, label, etail, ehead, elabel, face_edges)


def cover_to_text(
    cover: PillowCover,
    cycle: list[tuple[int, int]],
    marks: list[int],
    rots: list[int] | None = None,
    name: str = "cover",
) -> str:
    """Rule text for a cover cut along ``cycle`` with ``V_i`` at position ``marks[i]``.

    ``marks`` are strictly increasing positions in ``cycle`` (position p is
    the start vertex of ``cycle[p]``); ``rots[f]`` rotates the side listing
    of face f.
    """
    n, d = cover.n, cover.d
    rots = rots or [0] * (2 * d)
    V = [f"V{i}" for i in range(n)]
    E = [f"e{i}" for i in range(n)]

    def start(p):
        e, s = cycle[p % len(cycle)]
        return cover.etail[e] if s > 0 else cover.ehead[e]

    mark_of = {start(p): i for i, p in enumerate(marks)}
    # arcs: arc i runs along the cycle from marks[i] to marks[i+1]
    arcs = []
    for i in range(n):
        a, b = marks[i], marks[(i + 1) % n] + (len(cycle) if i == n - 1 else 0)
        arcs.append([cycle[p % len(cycle)] for p in range(a, b)])
    on_cycle = {e for e, _ in cycle}
    # faces on the left of the cycle: P_k is left of +e, Q_k left of -e
    side_face = {}
    for f, edges in enumerate(cover.face_edges):
        for e in edges:
            side_face.setdefault(e, []).append(f)
    left = set()
    for e, s in cycle:
        pf, qf = side_face[e]  # P_k first, then Q_m
        left.add(pf if s > 0 else qf)
    stack = list(left)
    while stack:
        f = stack.pop()
        for e in cover.face_edges[f]:
            if e in on_cycle:
                continue
            for g in side_face[e]:
                if g not in left:
                    left.add(g)
                    stack.append(g)
    regions = {"P": sorted(left), "Q": sorted(set(range(2 * d)) - left)}

    lines = [f"fsr {name}", "", "vertex " + " ".join(V), ""]
    for i in range(n):
        lines.append(f"edge {E[i]} : {V[i]} -> {V[(i + 1) % n]}")
    for i in range(n):
        word = []
        for q, (e, s) in enumerate(arcs[i]):
            if q:
                word.append(V[cover.vertex_label[start(marks[i] + q)]])
            word.append(("+" if s > 0 else "-") + E[cover.elabel[e]])
        lines.append(f"edge {E[i]} subdivides [ {' '.join(word)} ]")
    lines.append("")
    lines.append("tile P : [ " + " ".join(f"+{E[i]} {V[(i + 1) % n]}" for i in range(n)) + " ]")
    lines.append("tile Q : [ " + " ".join(f"-{E[n - 1 - j]} {V[n - 1 - j]}" for j in range(n)) + " ]")

    for tile in ("P", "Q"):
        faces = regions[tile]
        # local endpoints of every cover vertex in this disk
        ep: dict[int, str] = {}
        for i in range(n):
            slot = i if tile == "P" else n - 1 - i
            for q in range(1, len(arcs[i])):
                k = q if tile == "P" else len(arcs[i]) - q
                ep[start(marks[i] + q)] = f"bp {slot}.{k}"
        for v, i in mark_of.items():
            ep[v] = f"corner {(i - 1) % n}" if tile == "P" else f"corner {n - 1 - i}"
        interior = []
        edges = sorted({e for f in faces for e in cover.face_edges[f]})
        for e in edges:
            for v in (cover.etail[e], cover.ehead[e]):
                if v not in ep:
                    ep[v] = f"interior z{v}"
                    interior.append(v)
        body = [f"  interior z{v} : {V[cover.vertex_label[v]]}" for v in sorted(interior)]
        for e in edges:
            body.append(f"  edge x{e} : {ep[cover.etail[e]]} -> {ep[cover.ehead[e]]} image +{E[cover.elabel[e]]}")
        for f in faces:
            sign = "+" if f < d else "-"
            sides = [f"{sign}x{e}" for e in cover.face_edges[f]]
            r = rots[f] % n
            sides = sides[r:] + sides[:r]
            image = "P" if f < d else "Q"
            body.append(f"  face f{f} : [ {' '.join(sides)} ] image {image} rot {r}")
        lines += ["", f"subdivision {tile} {{", *body, "}"]
    lines += ["", "sphere {"]
    for i in range(n):
        lines.append(f"  side {E[i]} = (P, slot {i}), (Q, slot {n - 1 - i})")
    lines.append("}")
    return "\n".join(lines) + "\n"


def random_rule(rng: random.Random, n: int | None = None, d: int | None = None, name: str = "random") -> FsrSpec:
    """A random valid rule on an n-gon pillow (n in {3, 4}) of degree d ≤ 3."""
    for _ in range(1000):
        nn = n if n is not None else rng.choice((3, 4))
        dd = d if d is not None else rng.randint(1, 3)
        perms = [list(range(dd))] + [rng.sample(range(dd), dd) for _ in range(nn - 1)]
        cover = pillow_cover(nn, perms)
        if cover.euler() != 2 or not cover.connected():
            continue
        cycles = cover.simple_cycles(nn)
        if not cycles:
            continue
        cycle = rng.choice(cycles)
        shift = rng.randrange(len(cycle))
        cycle = cycle[shift:] + cycle[:shift]
        marks = sorted(rng.sample(range(len(cycle)), nn))
        # put the first mark at position 0 so arcs do not wrap
        cycle = cycle[marks[0] :] + cycle[: marks[0]]
        marks = [m - marks[0] for m in marks]
        rots = [rng.randrange(nn) for _ in range(2 * dd)]
        return parse_fsr(cover_to_text(cover, cycle, marks, rots, name))
    raise RuntimeError("no spherical cover found")  # pragma: no cover


def random_rules(count: int, seed: int = 0) -> list[FsrSpec]:
    rng = random.Random(seed)
    return [random_rule(rng, name=f"random{i}") for i in range(count)]
