"""Kernel backend selection.

The hot per-source BFS loops live in the compiled ``depnet._speedups``
extension; ``pure.py`` is a NumPy fallback with identical signatures.
Set DEPNET_PURE=1 to force the fallback (used by the benchmark).
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

if os.environ.get("DEPNET_PURE"):
    from . import pure as backend
else:
    try:
        from depnet import _speedups as backend  # type: ignore[no-redef]
    except ImportError:
        from . import pure as backend  # type: ignore[no-redef]


def _chunks(n: int, jobs: int) -> list[tuple[int, int]]:
    jobs = max(1, min(jobs, n))
    step = (n + jobs - 1) // jobs
    return [(lo, min(lo + step, n)) for lo in range(0, n, step)]


def distance_stats_all(indptr, indices, n, jobs=1):
    """Per-source distance sums / reach counts / inverse-distance sums for
    every source. Fans out over threads when the compiled backend is in
    (it releases the GIL); chunk results concatenate in source order, so
    the output is identical for any job count."""
    if jobs <= 1 or not backend.SUPPORTS_THREADS or n < 64:
        return backend.distance_stats(indptr, indices, n, 0, n)
    spans = _chunks(n, jobs)
    with ThreadPoolExecutor(max_workers=len(spans)) as pool:
        parts = list(pool.map(lambda s: backend.distance_stats(indptr, indices, n, s[0], s[1]), spans))
    sums = np.concatenate([p[0] for p in parts])
    cnts = np.concatenate([p[1] for p in parts])
    invs = np.concatenate([p[2] for p in parts])
    return sums, cnts, invs


def betweenness_all(indptr, indices, n, jobs=1):
    """Raw Brandes scores summed over all sources. Partial arrays from the
    thread chunks merge in fixed chunk order."""
    if jobs <= 1 or not backend.SUPPORTS_THREADS or n < 64:
        return backend.betweenness_partial(indptr, indices, n, 0, n)
    spans = _chunks(n, jobs)
    with ThreadPoolExecutor(max_workers=len(spans)) as pool:
        parts = list(pool.map(lambda s: backend.betweenness_partial(indptr, indices, n, s[0], s[1]), spans))
    total = np.zeros(n, dtype=np.float64)
    for part in parts:
        total += part
    return total
