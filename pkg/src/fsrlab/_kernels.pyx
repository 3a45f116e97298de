# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: all-pairs BFS on a CSR graph and the Rushton pair scan."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def bfs_all_pairs(cnp.int32_t[::1] indptr, cnp.int32_t[::1] indices):
    """Hop distances between all vertex pairs; -1 marks unreachable pairs."""
    cdef Py_ssize_t n = indptr.shape[0] - 1
    dist_arr = np.full((n, n), -1, dtype=np.int32)
    cdef cnp.int32_t[:, ::1] dist = dist_arr
    cdef cnp.int32_t[::1] queue = np.empty(max(n, 1), dtype=np.int32)
    cdef Py_ssize_t s, head, tail, k
    cdef cnp.int32_t u, w, du
    for s in range(n):
        dist[s, s] = 0
        queue[0] = <cnp.int32_t>s
        head = 0
        tail = 1
        while head < tail:
            u = queue[head]
            head += 1
            du = dist[s, u] + 1
            for k in range(indptr[u], indptr[u + 1]):
                w = indices[k]
                if dist[s, w] < 0:
                    dist[s, w] = du
                    queue[tail] = w
                    tail += 1
    return dist_arr


def rushton_scan(cnp.int32_t[:, ::1] d_low, cnp.int32_t[:, ::1] d_high,
                 cnp.int32_t[::1] proj, int M, int limit):
    """Pairs (u', v') with M <= d_low[proj u', proj v'] < inf and d_high[u', v'] <= that value.

    Returns ``(count, examples)`` where ``examples`` holds at most ``limit``
    rows ``(u', v', d_low, d_high)`` in row-major order; ``d_high = -1`` means
    the lifted pair is disconnected, which is never a violation.
    """
    cdef Py_ssize_t n = d_high.shape[0]
    cdef Py_ssize_t i, j
    cdef cnp.int32_t lo, hi
    cdef long count = 0
    out = []
    for i in range(n):
        for j in range(n):
            lo = d_low[proj[i], proj[j]]
            if lo < M:
                continue
            hi = d_high[i, j]
            if hi >= 0 and hi <= lo:
                count += 1
                if len(out) < limit:
                    out.append((i, j, lo, hi))
    return count, out
