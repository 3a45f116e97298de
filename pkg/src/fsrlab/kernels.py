"""Kernel selection: the compiled extension when importable, numpy otherwise.

Set ``FSRLAB_PURE_PYTHON=1`` to force the numpy implementation.
"""

from __future__ import annotations

import os

import numpy as np

from . import _pykernels

IMPLEMENTATION = "numpy"
_impl = _pykernels

if os.environ.get("FSRLAB_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled  # type: ignore[attr-defined]
    except ImportError:  # pragma: no cover - depends on the build
        pass
    else:
        _impl = _compiled
        IMPLEMENTATION = "cython"


def bfs_all_pairs(indptr, indices) -> np.ndarray:
    return _impl.bfs_all_pairs(
        np.ascontiguousarray(indptr, dtype=np.int32), np.ascontiguousarray(indices, dtype=np.int32)
    )


def rushton_scan(d_low, d_high, proj, M: int, limit: int = 10):
    return _impl.rushton_scan(
        np.ascontiguousarray(d_low, dtype=np.int32),
        np.ascontiguousarray(d_high, dtype=np.int32),
        np.ascontiguousarray(proj, dtype=np.int32),
        int(M),
        int(limit),
    )
