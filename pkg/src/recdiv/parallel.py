"""Deterministic fan-out over fixed work chunks.

Work is always cut into the same chunks regardless of the worker count, and
results come back in chunk order, so output never depends on ``threads``.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def default_threads() -> int:
    return len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else (os.cpu_count() or 1)


def map_chunks(fn: Callable[[T], R], chunks: Sequence[T], threads: int | None = 1) -> list[R]:
    threads = default_threads() if threads is None else max(1, threads)
    if threads == 1 or len(chunks) <= 1:
        return [fn(c) for c in chunks]
    with ProcessPoolExecutor(max_workers=min(threads, len(chunks))) as pool:
        return list(pool.map(fn, chunks))
