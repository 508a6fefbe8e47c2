"""
Ordered Parallel Map
Thread pool fan-out with results merged in submission order
"""
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, TypeVar

from loguru import logger

T = TypeVar("T")
R = TypeVar("R")


def ordered_map(func: Callable[[T], R], items: Iterable[T], workers: int = 1) -> List[R]:
    """
    Apply func to every item, possibly on several threads

    The result list follows the order of items regardless of completion order,
    so callers get deterministic output.
    """
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [func(item) for item in items]

    logger.debug(f"Fanning out {len(items)} tasks over {workers} workers")
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(func, items))
