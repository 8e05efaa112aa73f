"""
Deterministic chunked map-reduce over a thread pool.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Sequence, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def split_chunks(items: Sequence[T], n_chunks: int) -> List[List[T]]:
    """Split into at most ``n_chunks`` contiguous, non-empty chunks."""
    items = list(items)
    if not items:
        return []
    n_chunks = max(1, min(n_chunks, len(items)))
    size, extra = divmod(len(items), n_chunks)
    chunks, start = [], 0
    for i in range(n_chunks):
        stop = start + size + (1 if i < extra else 0)
        chunks.append(items[start:stop])
        start = stop
    return chunks


def chunked_map_reduce(
    items: Sequence[T],
    fn: Callable[[List[T]], R],
    merge: Callable[[R, R], R],
    initial: R,
    threads: int = 1,
) -> R:
    """
    Apply ``fn`` to contiguous chunks of ``items`` and fold with ``merge``.

    Partial results are merged in chunk order, so the result is independent
    of ``threads`` whenever ``merge`` is associative.
    """
    items = list(items)
    if threads <= 1 or len(items) < 2:
        partials = [fn(items)] if items else []
    else:
        chunks = split_chunks(items, threads * 4)
        logger.debug("map-reduce over %d chunks on %d threads", len(chunks), threads)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            partials = list(pool.map(fn, chunks))

    result = initial
    for partial in partials:
        result = merge(result, partial)
    return result


def merge_counts(left: dict, right: dict) -> dict:
    """Key-wise integer addition of two count maps."""
    merged = dict(left)
    for key, count in right.items():
        merged[key] = merged.get(key, 0) + count
    return merged
