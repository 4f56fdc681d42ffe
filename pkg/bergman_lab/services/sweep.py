"""格子点の掃引（並列実行対応）

結果は入力の順序で返し、失敗は入力順で最初のものを送出する。
"""

import logging
import os
from typing import Callable, Optional, Sequence, TypeVar

import anyio
import anyio.to_thread

from bergman_lab.config import settings

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def worker_count(threads: Optional[int] = None) -> int:
    """--threads > BERGMAN_LAB_THREADS > CPU 数"""
    return max(1, threads or settings.threads or os.cpu_count() or 1)


def sweep(fn: Callable[[T], R], items: Sequence[T], threads: Optional[int] = None) -> list[R]:
    """items の各要素に fn を適用する（最大 threads 並列）"""
    items = list(items)
    workers = worker_count(threads)
    if workers == 1 or len(items) <= 1:
        return [fn(item) for item in items]

    results: list = [None] * len(items)
    errors: dict[int, BaseException] = {}

    async def _run() -> None:
        limiter = anyio.CapacityLimiter(workers)

        async def _one(index: int, item) -> None:
            try:
                results[index] = await anyio.to_thread.run_sync(fn, item, limiter=limiter)
            except Exception as e:
                errors[index] = e

        async with anyio.create_task_group() as tg:
            for index, item in enumerate(items):
                tg.start_soon(_one, index, item)

    anyio.run(_run)
    if errors:
        first = min(errors)
        logger.error("sweep failed at item %d of %d: %s", first, len(items), errors[first])
        raise errors[first]
    logger.debug("sweep of %d items on %d workers done", len(items), workers)
    return results
