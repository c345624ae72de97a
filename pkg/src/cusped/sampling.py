"""Seeded sampling and order-independent parallel evaluation.

Samples are always drawn up front from a seeded generator; workers only
evaluate fixed chunks, and results are merged in chunk order.  Output is
therefore identical for any thread count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence, TypeVar

import numpy as np

T = TypeVar("T")
R = TypeVar("R")

_threads = 1


def set_threads(n: int) -> None:
    global _threads
    _threads = max(1, int(n))


def get_threads() -> int:
    return _threads


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Independent generator for (seed, stream); streams let one seed feed several samples."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(stream,))))


def chunked(items: Sequence[T], size: int) -> list[Sequence[T]]:
    return [items[i : i + size] for i in range(0, len(items), size)]


def parallel_map(fn: Callable[[T], R], chunks: Sequence[T], threads: int | None = None) -> list[R]:
    threads = _threads if threads is None else threads
    if threads <= 1 or len(chunks) <= 1:
        return [fn(c) for c in chunks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, chunks))


def sample_distinct_tuples(rng: np.random.Generator, n: int, k: int, size: int) -> np.ndarray:
    """``size`` rows of k distinct indices in range(n), each row uniform over distinct k-tuples."""
    if n < k:
        raise ValueError(f"need at least {k} items, have {n}")
    out = rng.integers(0, n, size=(size, k))
    while True:
        srt = np.sort(out, axis=1)
        bad = np.flatnonzero((srt[:, 1:] == srt[:, :-1]).any(axis=1))
        if not len(bad):
            return out
        out[bad] = rng.integers(0, n, size=(len(bad), k))
