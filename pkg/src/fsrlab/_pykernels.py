"""Pure numpy versions of the compiled kernels (same signatures and results)."""

from __future__ import annotations

import numpy as np


def bfs_all_pairs(indptr: np.ndarray, indices: np.ndarray) -> np.ndarray:
    """Hop distances between all vertex pairs; -1 marks unreachable pairs.

    Runs one breadth-first sweep for all sources at once: row ``s`` of the
    frontier matrix is the BFS frontier of source ``s``, and a neighbourhood
    step is a segmented OR over the CSR rows.
    """
    indptr = np.asarray(indptr, dtype=np.int64)
    indices = np.asarray(indices, dtype=np.int64)
    n = len(indptr) - 1
    dist = np.full((n, n), -1, dtype=np.int32)
    if n == 0:
        return dist
    np.fill_diagonal(dist, 0)
    frontier = np.eye(n, dtype=bool)
    seen = frontier.copy()
    starts = indptr[:-1]
    empty = indptr[1:] == starts
    depth = 0
    while frontier.any() and len(indices):
        depth += 1
        # a trailing False column keeps every row start a valid reduceat offset
        gathered = np.zeros((n, len(indices) + 1), dtype=bool)
        gathered[:, :-1] = frontier[:, indices]
        reached = np.logical_or.reduceat(gathered, starts, axis=1)
        reached[:, empty] = False
        new = reached & ~seen
        if not new.any():
            break
        dist[new] = depth
        seen |= new
        frontier = new
    return dist


def rushton_scan(d_low, d_high, proj, M: int, limit: int):
    d_low = np.asarray(d_low)
    d_high = np.asarray(d_high)
    proj = np.asarray(proj, dtype=np.int64)
    lo = d_low[np.ix_(proj, proj)]
    bad = (lo >= M) & (d_high >= 0) & (d_high <= lo)
    idx = np.argwhere(bad)
    examples = [(int(i), int(j), int(lo[i, j]), int(d_high[i, j])) for i, j in idx[:limit]]
    return int(bad.sum()), examples
