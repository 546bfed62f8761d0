# workers.py
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, TypeVar

import config

log = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def fan_out(fn: Callable[[T], R], items: Iterable[T], workers: int | None = None) -> List[R]:
    """
    Apply `fn` to every item, optionally on a thread pool.
    Results come back in input order, so the output matches a sequential run.
    """
    items = list(items)
    n = config.WORKERS if workers is None else int(workers)
    if n <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    log.debug("fan-out of %d items over %d threads", len(items), n)
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
