from __future__ import annotations

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable

logger = logging.getLogger(__name__)

BandFn = Callable[[int, int], None]


def resolve_workers(requested: int | None) -> int:
    if requested is None or requested <= 0:
        return max(1, os.cpu_count() or 1)
    return requested


class WorkerPool:
    """Splits a row (or column) range into contiguous bands and runs them on threads.

    Each band writes a disjoint slice of a preallocated output, so results do
    not depend on how many workers there are or in which order bands finish.
    """

    def __init__(self, workers: int | None = 1) -> None:
        self.workers = resolve_workers(workers)
        self._executor: ThreadPoolExecutor | None = None
        if self.workers > 1:
            self._executor = ThreadPoolExecutor(
                max_workers=self.workers, thread_name_prefix="stereopipe"
            )
        logger.debug("worker pool with %d thread(s)", self.workers)

    def __enter__(self) -> WorkerPool:
        return self

    def __exit__(self, *_exc: object) -> None:
        self.close()

    def close(self) -> None:
        if self._executor is not None:
            self._executor.shutdown(wait=True)
            self._executor = None

    def bands(self, length: int) -> list[tuple[int, int]]:
        count = max(1, min(self.workers, length))
        step, extra = divmod(length, count)
        spans: list[tuple[int, int]] = []
        start = 0
        for index in range(count):
            stop = start + step + (1 if index < extra else 0)
            spans.append((start, stop))
            start = stop
        return spans

    def run_bands(self, fn: BandFn, length: int) -> None:
        spans = self.bands(length)
        if self._executor is None or len(spans) == 1:
            for start, stop in spans:
                fn(start, stop)
            return
        futures = [self._executor.submit(fn, start, stop) for start, stop in spans]
        for future in futures:
            future.result()


_serial = WorkerPool(1)


def serial_pool() -> WorkerPool:
    return _serial
