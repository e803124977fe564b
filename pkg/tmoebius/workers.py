"""
Worker Pool

Fans independent pieces of an enumeration out over a process pool and
collects the results in input order.
"""
import asyncio
import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, List, Optional, Sequence, TypeVar

from config import TMOEBIUS_JOBS

logger = logging.getLogger("tmoebius.workers")

T = TypeVar("T")
R = TypeVar("R")


def resolve_jobs(jobs: Optional[int]) -> int:
    if jobs is None:
        return TMOEBIUS_JOBS
    return max(1, int(jobs))


async def _gather(func: Callable[[T], R], items: Sequence[T], jobs: int) -> List[R]:
    loop = asyncio.get_running_loop()
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        futures = [loop.run_in_executor(pool, func, item) for item in items]
        return list(await asyncio.gather(*futures))


def parallel_map(func: Callable[[T], R], items: Sequence[T], jobs: Optional[int] = None) -> List[R]:
    """
    Apply func to every item, in worker processes when jobs > 1.

    func must be picklable (a module-level function or a functools.partial of one).
    Results come back in the order of items regardless of completion order.
    """
    items = list(items)
    jobs = resolve_jobs(jobs)
    if jobs <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    logger.debug(f"Dispatching {len(items)} tasks to {jobs} workers")
    return asyncio.run(_gather(func, items, jobs))
