import importlib

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fsrlab import _pykernels, kernels


def csr(n, pairs):
    adj = [[] for _ in range(n)]
    for a, b in pairs:
        adj[a].append(b)
        adj[b].append(a)
    indptr = np.zeros(n + 1, dtype=np.int32)
    for u in range(n):
        indptr[u + 1] = indptr[u] + len(adj[u])
    return indptr, np.array([w for row in adj for w in sorted(row)], dtype=np.int32)


def minplus_closure(n, pairs):
    INF = 10**9
    d = np.full((n, n), INF, dtype=np.int64)
    np.fill_diagonal(d, 0)
    for a, b in pairs:
        if a != b:
            d[a, b] = d[b, a] = 1
    for k in range(n):
        d = np.minimum(d, d[:, [k]] + d[[k], :])
    d[d >= INF] = -1
    return d


graphs = st.integers(1, 25).flatmap(
    lambda n: st.tuples(st.just(n), st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=60))
)


@settings(max_examples=60, deadline=None)
@given(graphs)
def test_bfs_matches_minplus_closure(g):
    n, pairs = g
    pairs = [(a, b) for a, b in pairs if a != b]
    ip, ix = csr(n, pairs)
    ref = minplus_closure(n, pairs)
    assert np.array_equal(_pykernels.bfs_all_pairs(ip, ix), ref)
    assert np.array_equal(kernels.bfs_all_pairs(ip, ix), ref)


def test_empty_graph():
    d = kernels.bfs_all_pairs(np.zeros(1, dtype=np.int32), np.zeros(0, dtype=np.int32))
    assert d.shape == (0, 0)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 12), st.integers(0, 2**31 - 1), st.integers(1, 4))
def test_rushton_scan_implementations_agree(n, seed, M):
    rng = np.random.default_rng(seed)
    m = int(rng.integers(1, n + 1))
    d_low = rng.integers(-1, 6, size=(m, m)).astype(np.int32)
    d_high = rng.integers(-1, 6, size=(n, n)).astype(np.int32)
    proj = rng.integers(0, m, size=n).astype(np.int32)
    a = _pykernels.rushton_scan(d_low, d_high, proj, M, 1000)
    b = kernels.rushton_scan(d_low, d_high, proj, M, 1000)
    assert a[0] == b[0]
    assert sorted(map(tuple, a[1])) == sorted(map(tuple, b[1]))
    # brute force
    count = 0
    for i in range(n):
        for j in range(n):
            lo = d_low[proj[i], proj[j]]
            hi = d_high[i, j]
            if lo >= M and 0 <= hi <= lo:
                count += 1
    assert a[0] == count


def test_pure_python_switch(monkeypatch):
    monkeypatch.setenv("FSRLAB_PURE_PYTHON", "1")
    mod = importlib.reload(kernels)
    try:
        assert mod.IMPLEMENTATION == "numpy"
    finally:
        monkeypatch.delenv("FSRLAB_PURE_PYTHON")
        importlib.reload(kernels)


def test_compiled_kernel_available():
    if kernels.IMPLEMENTATION != "cython":
        pytest.skip("compiled extension not built")
    assert kernels._impl is not _pykernels


def test_benchmark_script_runs():
    import subprocess
    import sys
    from pathlib import Path

    script = Path(__file__).resolve().parent.parent / "benchmarks" / "bench_kernels.py"
    out = subprocess.run(
        [sys.executable, str(script), "--fixture", "pillow2", "--levels", "1", "2", "--repeat", "1"],
        capture_output=True, text=True, check=True, timeout=120,
    ).stdout
    assert "bfs_all_pairs" in out and "rushton_scan" in out
