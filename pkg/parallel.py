# parallel.py

import logging
import threading
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

from settings import get_thread_count

logger = logging.getLogger(__name__)

T = TypeVar('T')
R = TypeVar('R')


class WorkerPool:
    """Thread pool with deterministic, input-ordered results."""

    def __init__(self, max_workers: Optional[int] = None):
        self.max_workers = max_workers if max_workers is not None else get_thread_count()
        self._executor: Optional[ThreadPoolExecutor] = None
        self._lock = threading.Lock()

    @property
    def executor(self) -> ThreadPoolExecutor:
        """Lazy initialization of thread pool executor"""
        with self._lock:
            if self._executor is None:
                self._executor = ThreadPoolExecutor(
                    max_workers=self.max_workers,
                    thread_name_prefix="okounkov"
                )
                logger.debug(f"Started worker pool with {self.max_workers} threads")
        return self._executor

    def ordered_map(self, func: Callable[[T], R], items: Iterable[T]) -> List[R]:
        items = list(items)
        # Nested calls from a worker thread run inline to avoid pool starvation
        if (self.max_workers <= 1 or len(items) <= 1
                or threading.current_thread().name.startswith("okounkov")):
            return [func(item) for item in items]
        return list(self.executor.map(func, items))

    def shutdown(self) -> None:
        """Cleanup method to be called when shutting down"""
        with self._lock:
            if self._executor:
                self._executor.shutdown(wait=True)
                self._executor = None
                logger.debug("Worker pool shut down")


_default_pool: Optional[WorkerPool] = None


def get_pool() -> WorkerPool:
    global _default_pool
    if _default_pool is None:
        _default_pool = WorkerPool()
    return _default_pool


def ordered_map(func: Callable[[T], R], items: Iterable[T]) -> List[R]:
    return get_pool().ordered_map(func, items)


def shutdown() -> None:
    global _default_pool
    if _default_pool is not None:
        _default_pool.shutdown()
        _default_pool = None
