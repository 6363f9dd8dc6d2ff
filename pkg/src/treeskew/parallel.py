"""Seed-range partitioning for reproducible Monte Carlo loops.

Work is split into one contiguous block per worker and partial results are
combined in block order, so a run is bit-identical for a fixed
(seed, worker count) regardless of thread scheduling.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence, TypeVar

T = TypeVar("T")


def block_bounds(n: int, workers: int) -> list[tuple[int, int]]:
    """Split ``range(n)`` into ``workers`` contiguous (lo, hi) blocks."""
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    workers = max(1, min(workers, n if n else 1))
    step, extra = divmod(n, workers)
    bounds = []
    lo = 0
    for i in range(workers):
        hi = lo + step + (1 if i < extra else 0)
        bounds.append((lo, hi))
        lo = hi
    return bounds


def map_blocks(fn: Callable[[int, int], T], n: int, workers: int = 1) -> list[T]:
    """Apply ``fn(lo, hi)`` to every block, returning results in block order."""
    bounds = block_bounds(n, workers)
    if len(bounds) <= 1 or workers <= 1:
        return [fn(lo, hi) for lo, hi in bounds]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda b: fn(b[0], b[1]), bounds))
