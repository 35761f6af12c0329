"""Row-chunked evaluation of phase-space functions, capped by GRAVPHASE_THREADS."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

ENV_THREADS = "GRAVPHASE_THREADS"


def max_threads() -> int:
    raw = os.environ.get(ENV_THREADS)
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return min(8, os.cpu_count() or 1)


def evaluate_on_grid(func, z: np.ndarray, p: np.ndarray) -> np.ndarray:
    """values[i, j] = func(z[i], p[j]); rows are independent so chunks run concurrently."""
    threads = max_threads()
    if threads == 1 or z.size * p.size < 65536:
        Z, P = np.meshgrid(z, p, indexing="ij")
        return np.asarray(func(Z, P), dtype=float)
    chunks = np.array_split(np.arange(z.size), threads)
    out = np.empty((z.size, p.size))

    def work(rows):
        Z, P = np.meshgrid(z[rows], p, indexing="ij")
        out[rows] = func(Z, P)

    with ThreadPoolExecutor(max_workers=threads) as pool:
        list(pool.map(work, [c for c in chunks if c.size]))
    return out
