"""Batch helpers for Monte-Carlo sweeps.

The COAXSIM_THREADS environment variable caps the worker count; the
default of 1 keeps every run strictly serial. Workers only ever evaluate
pure functions of their seed, so aggregation is order-independent.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence, TypeVar

T = TypeVar("T")


def max_workers() -> int:
    value = os.environ.get("COAXSIM_THREADS", "1")
    try:
        workers = int(value)
    except ValueError:
        raise ValueError(f"COAXSIM_THREADS must be an integer, got {value!r}") from None
    return max(1, workers)


def seed_map(fn: Callable[[int], T], seeds: Iterable[int]) -> list[T]:
    """Evaluate ``fn`` over seeds, preserving input order in the output."""
    seeds = list(seeds)
    workers = max_workers()
    if workers == 1 or len(seeds) <= 1:
        return [fn(s) for s in seeds]
    with ThreadPoolExecutor(max_workers=min(workers, len(seeds))) as pool:
        return list(pool.map(fn, seeds))
