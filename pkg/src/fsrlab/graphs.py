"""Fat and skinny path subdivision graphs, level metrics and the Rushton probe."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .engine import get_tower
from .model import FsrSpec
from .validate import CompiledRule, compile_rule

__all__ = [
    "FLAVORS",
    "SubdivisionGraph",
    "ProbeReport",
    "build_subdivision_graph",
    "level_distance",
    "project_vertex",
    "rushton_probe",
]

FLAVORS = ("fat", "skinny")

# all-pairs matrices above this many vertices are not cached by level_distance
_DENSE_LIMIT = 8000


@dataclass
class SubdivisionGraph:
    """Leveled graph Γ: one vertex per tile of R^m(S²) for -1 <= m <= L.

    Vertices of level ``m`` are the face indices of the level-m sphere complex;
    level -1 has the single vertex 0.  Vertical edges join a tile to its
    parent; horizontal edges are stored per level in CSR form.
    """

    rule: CompiledRule = field(repr=False)
    flavor: str
    depth: int
    sizes: list[int]  # sizes[m + 1] = number of vertices at level m
    indptr: list[np.ndarray]
    indices: list[np.ndarray]
    parent: list[np.ndarray]  # parent[m + 1][u] = vertex at level m - 1 (level 0 -> 0)
    _dist: dict[int, np.ndarray] = field(default_factory=dict, repr=False)

    def n_vertices(self, m: int) -> int:
        return self.sizes[m + 1]

    def neighbors(self, m: int, u: int) -> np.ndarray:
        ip = self.indptr[m + 1]
        return self.indices[m + 1][ip[u] : ip[u + 1]]

    def horizontal_edges(self, m: int) -> list[tuple[int, int]]:
        out = []
        for u in range(self.n_vertices(m)):
            for w in self.neighbors(m, u):
                if u < w:
                    out.append((u, int(w)))
        return out

    def vertical_edges(self, m: int) -> list[tuple[int, int]]:
        """Edges from level ``m`` vertices to their parents at level ``m - 1``."""
        return [(u, int(p)) for u, p in enumerate(self.parent[m + 1])]

    def distances(self, m: int) -> np.ndarray:
        """All-pairs δ_m as an int32 matrix, -1 standing for ∞."""
        if m not in self._dist:
            self._dist[m] = kernels.bfs_all_pairs(self.indptr[m + 1], self.indices[m + 1])
        return self._dist[m]

    def bfs_from(self, m: int, u: int) -> np.ndarray:
        dist = np.full(self.n_vertices(m), -1, dtype=np.int64)
        dist[u] = 0
        queue = deque([u])
        while queue:
            x = queue.popleft()
            for w in self.neighbors(m, x):
                if dist[w] < 0:
                    dist[w] = dist[x] + 1
                    queue.append(int(w))
        return dist

    def projection(self, m: int, n: int) -> np.ndarray:
        """Array sending each level-n vertex to the level-m tile containing it."""
        if not -1 <= m <= n <= self.depth:
            raise ValueError(f"need -1 <= m <= n <= {self.depth}")
        proj = np.arange(self.n_vertices(n), dtype=np.int64)
        for k in range(n, m, -1):
            proj = self.parent[k + 1][proj]
        return proj


def _csr(n: int, pairs: set[tuple[int, int]]) -> tuple[np.ndarray, np.ndarray]:
    adj: list[list[int]] = [[] for _ in range(n)]
    for a, b in pairs:
        adj[a].append(b)
        adj[b].append(a)
    indptr = np.zeros(n + 1, dtype=np.int32)
    for u in range(n):
        adj[u].sort()
        indptr[u + 1] = indptr[u] + len(adj[u])
    indices = np.fromiter((w for row in adj for w in row), dtype=np.int32, count=int(indptr[-1]))
    return indptr, indices


def _horizontal_pairs(cx, flavor: str) -> set[tuple[int, int]]:
    pairs: set[tuple[int, int]] = set()
    if flavor == "fat":
        for sides in cx.edge_sides:
            faces = sorted({f for f, _ in sides})
            for i in range(len(faces)):
                for j in range(i + 1, len(faces)):
                    pairs.add((faces[i], faces[j]))
    else:
        for faces in cx.vertex_faces:
            for i in range(len(faces)):
                for j in range(i + 1, len(faces)):
                    pairs.add((faces[i], faces[j]))
    return pairs


def build_subdivision_graph(spec: FsrSpec | CompiledRule, L: int, flavor: str = "fat") -> SubdivisionGraph:
    """Γ up to level ``L``; multiple adjacencies collapse to one simple edge."""
    if flavor not in FLAVORS:
        raise ValueError(f"flavor must be one of {FLAVORS}")
    if L < -1:
        raise ValueError("L must be ≥ -1")
    rule = compile_rule(spec)
    tower = get_tower(rule)
    sizes = [1]
    indptr = [np.zeros(2, dtype=np.int32)]
    indices = [np.zeros(0, dtype=np.int32)]
    parent = [np.zeros(1, dtype=np.int64)]
    for m in range(0, L + 1):
        cx = tower.sphere(m)
        sizes.append(cx.n_faces)
        ip, ix = _csr(cx.n_faces, _horizontal_pairs(cx, flavor))
        indptr.append(ip)
        indices.append(ix)
        parent.append(np.asarray(cx.fpar, dtype=np.int64))
    return SubdivisionGraph(rule, flavor, L, sizes, indptr, indices, parent)


def level_distance(graph: SubdivisionGraph, m: int, u: int, v: int) -> float:
    """δ_m(u, v) inside Γ_m only; ``math.inf`` when u and v are disconnected."""
    n = graph.n_vertices(m)
    if not (0 <= u < n and 0 <= v < n):
        raise IndexError(f"vertices must lie in 0..{n - 1} at level {m}")
    if u == v:
        return 0
    if m in graph._dist or n <= _DENSE_LIMIT:
        d = int(graph.distances(m)[u, v])
    else:
        d = int(graph.bfs_from(m, u)[v])
    return math.inf if d < 0 else d


def project_vertex(graph: SubdivisionGraph, m: int, n: int, u: int) -> int:
    """Transition function f_{m,n}: the level-m tile containing level-n tile ``u``."""
    return int(graph.projection(m, n)[u])


@dataclass
class ProbeReport:
    probe: str
    parameters: dict
    status: str  # PASS_AT_DEPTH | VIOLATION | CERTIFIED | WITNESS | UNKNOWN
    evidence: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "schema": "probe.v1",
            "probe": self.probe,
            "parameters": self.parameters,
            "status": self.status,
            "evidence": self.evidence,
            "details": self.details,
        }


def rushton_probe(spec: FsrSpec | CompiledRule, M: int, n: int, L: int, limit: int = 20) -> ProbeReport:
    """Check ``δ_{m+n}(u', v') > δ_m(u, v)`` for every far level-m pair and all lifts.

    Every ``m`` with ``0 <= m <= L - n`` is scanned exhaustively on the fat
    graph.  A pass is evidence at this depth only: the criterion quantifies
    over all ``m``.
    """
    if M < 1 or n < 1:
        raise ValueError("M and n must be ≥ 1")
    if L < n:
        raise ValueError("depth L must be ≥ n")
    rule = compile_rule(spec)
    g = build_subdivision_graph(rule, L, "fat")
    evidence = []
    per_level = []
    total = 0
    for m in range(0, L - n + 1):
        d_low = g.distances(m)
        d_high = g.distances(m + n)
        proj = g.projection(m, m + n)
        far_pairs = int(((d_low >= M)).sum())
        count, examples = kernels.rushton_scan(d_low, d_high, proj, M, limit)
        per_level.append({"m": m, "far_pairs": far_pairs, "violations": int(count)})
        total += count
        for i, j, lo, hi in examples:
            if len(evidence) >= limit:
                break
            evidence.append(
                {
                    "m": m,
                    "u": int(proj[i]),
                    "v": int(proj[j]),
                    "u_lift": int(i),
                    "v_lift": int(j),
                    "delta_m": int(lo),
                    "delta_m_plus_n": int(hi),
                }
            )
    status = "VIOLATION" if total else "PASS_AT_DEPTH"
    return ProbeReport(
        "rushton",
        {"M": M, "n": n, "L": L, "flavor": "fat"},
        status,
        evidence,
        {"levels": per_level, "violations": int(total), "kernel": kernels.IMPLEMENTATION},
    )
