"""Shared plumbing."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


def max_workers() -> int:
    """Parallelism cap from ATLAS_THREADS (default 1 = serial)."""
    try:
        n = int(os.environ.get("ATLAS_THREADS", "1"))
    except ValueError:
        return 1
    return max(1, n)


def parallel_map(fn, items):
    """Order-preserving map, threaded when ATLAS_THREADS > 1.

    Every mapped function in this package is pure, so the result is
    schedule-independent.
    """
    items = list(items)
    n = max_workers()
    if n <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))
