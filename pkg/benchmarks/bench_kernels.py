"""Compare the compiled kernels with the numpy fallback on fat path graphs.

    python benchmarks/bench_kernels.py [--fixture barycentric] [--levels 2 3 4] [--repeat 3]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from fsrlab import _pykernels, build_subdivision_graph, kernels, load_fixture


def best_of(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--fixture", default="barycentric")
    ap.add_argument("--levels", type=int, nargs="+", default=[2, 3, 4])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    compiled = kernels._impl if kernels.IMPLEMENTATION == "cython" else None
    if compiled is None:
        print("compiled extension not available; timing the numpy fallback only")
    g = build_subdivision_graph(load_fixture(args.fixture), max(args.levels), "fat")
    print(f"{'kernel':<14}{'level':>6}{'vertices':>10}{'numpy s':>12}{'cython s':>12}{'speedup':>9}")
    for m in args.levels:
        ip = np.ascontiguousarray(g.indptr[m + 1], dtype=np.int32)
        ix = np.ascontiguousarray(g.indices[m + 1], dtype=np.int32)
        t_np = best_of(lambda: _pykernels.bfs_all_pairs(ip, ix), args.repeat)
        row = f"{'bfs_all_pairs':<14}{m:>6}{g.n_vertices(m):>10}{t_np:>12.4f}"
        if compiled is not None:
            t_c = best_of(lambda: compiled.bfs_all_pairs(ip, ix), args.repeat)
            assert np.array_equal(compiled.bfs_all_pairs(ip, ix), _pykernels.bfs_all_pairs(ip, ix))
            row += f"{t_c:>12.4f}{t_np / t_c:>9.1f}"
        print(row)
    for m in args.levels[:-1]:
        n = m + 1
        d_low = np.ascontiguousarray(g.distances(m), dtype=np.int32)
        d_high = np.ascontiguousarray(g.distances(n), dtype=np.int32)
        proj = np.ascontiguousarray(g.projection(m, n), dtype=np.int32)
        t_np = best_of(lambda: _pykernels.rushton_scan(d_low, d_high, proj, 3, 20), args.repeat)
        row = f"{'rushton_scan':<14}{n:>6}{g.n_vertices(n):>10}{t_np:>12.4f}"
        if compiled is not None:
            t_c = best_of(lambda: compiled.rushton_scan(d_low, d_high, proj, 3, 20), args.repeat)
            row += f"{t_c:>12.4f}{t_np / t_c:>9.1f}"
        print(row)


if __name__ == "__main__":
    main()
