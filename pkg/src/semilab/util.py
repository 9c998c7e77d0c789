"""Shared plumbing."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


def worker_count():
    """Worker cap from SEMILAB_THREADS (default 1 = serial)."""
    try:
        return max(1, int(os.environ.get("SEMILAB_THREADS", "1")))
    except ValueError:
        return 1


def map_indexed(fn, items):
    """Map preserving input order; parallel over threads when
    SEMILAB_THREADS > 1. Order-stable, so reductions stay deterministic."""
    items = list(items)
    workers = worker_count()
    if workers <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))
