"""Ordered chunked map on a thread pool.

The compiled kernels drop the GIL, so threads are enough. Results always come
back in submission order so merged output does not depend on thread count.
"""
from __future__ import annotations

import sys
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Iterator, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def ordered_map(func: Callable[[T], R], items: Iterable[T], threads: int = 1) -> Iterator[R]:
    if threads < 1:
        raise ValueError("threads must be >= 1")
    if threads == 1:
        yield from map(func, items)
        return
    with ThreadPoolExecutor(max_workers=threads) as ex:
        # bounded window keeps memory flat on long ranges
        pending = []
        for item in items:
            pending.append(ex.submit(func, item))
            if len(pending) >= 2 * threads:
                yield pending.pop(0).result()
        for fut in pending:
            yield fut.result()


def chunks(lo: int, hi: int, size: int) -> list[tuple[int, int]]:
    """[lo, hi] cut into consecutive closed intervals of at most ``size`` integers."""
    return [(s, min(s + size - 1, hi)) for s in range(lo, hi + 1, size)]


def progress(msg: str, enabled: bool = True) -> None:
    if enabled:
        print(msg, file=sys.stderr, flush=True)
