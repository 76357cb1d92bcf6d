"""Splittable seeds: one 64-bit seed, sub-streams addressed by a key path.

A stream is fixed by ``(seed, key...)`` alone, so adding starts or raising a
budget never changes the random numbers of the earlier ones.
"""

from __future__ import annotations

import os
import zlib

import numpy as np

DEFAULT_SEED = 0


def _key(part) -> int:
    if isinstance(part, (int, np.integer)):
        return int(part) & 0xFFFFFFFF
    return zlib.crc32(str(part).encode())


def substream(seed, *keys) -> np.random.Generator:
    seed = DEFAULT_SEED if seed is None else int(seed) & 0xFFFFFFFFFFFFFFFF
    ss = np.random.SeedSequence(entropy=seed, spawn_key=tuple(_key(k) for k in keys))
    return np.random.default_rng(ss)


def worker_count() -> int:
    """Workers allowed by ``NCGRAPH_THREADS``: unset means serial, ``0`` means all CPUs."""
    raw = os.environ.get("NCGRAPH_THREADS")
    if raw is None or raw.strip() == "":
        return 1
    try:
        value = int(raw)
    except ValueError:
        return 1
    if value <= 0:
        return os.cpu_count() or 1
    return value


def parallel_map(func, items):
    """``list(map(func, items))``, threaded when ``NCGRAPH_THREADS`` allows; order is kept."""
    items = list(items)
    workers = min(worker_count(), len(items))
    if workers <= 1:
        return [func(it) for it in items]
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))
