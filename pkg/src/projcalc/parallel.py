"""Optional process parallelism, controlled by PROJCALC_THREADS (default: serial)."""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor


def worker_count():
    try:
        return max(1, int(os.environ.get("PROJCALC_THREADS", "1")))
    except ValueError:
        return 1


def parallel_map(fn, items):
    items = list(items)
    n = min(worker_count(), len(items))
    if n <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
