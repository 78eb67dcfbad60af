# Services/workers.py
import logging
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from typing import Any, Callable, List, Sequence, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")

# Read-only payload installed once per worker process
_SHARED: Any = None


def _init_worker(shared: Any) -> None:
    global _SHARED
    _SHARED = shared


def _run_task(func: Callable[[Any, T], R], item: T) -> R:
    return func(_SHARED, item)


def map_shared(func: Callable[[Any, T], R], shared: Any, items: Sequence[T], threads: int = 1) -> List[R]:
    """
    Apply func(shared, item) to every item, results in input order.

    With threads > 1 the shared payload is sent to each worker once through
    the pool initializer instead of being pickled with every task. func must
    be a module-level function.
    """
    if threads <= 1 or len(items) < 2:
        return [func(shared, item) for item in items]
    chunksize = max(1, len(items) // (threads * 8))
    logger.debug(f"Dispatching {len(items)} tasks to {threads} workers (chunksize {chunksize})")
    with ProcessPoolExecutor(max_workers=threads, initializer=_init_worker, initargs=(shared,)) as pool:
        return list(pool.map(partial(_run_task, func), items, chunksize=chunksize))
