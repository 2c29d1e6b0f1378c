"""
进程池扇出

结果顺序与输入顺序一致，与 worker 数量无关。
"""
import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, List, Sequence, TypeVar

log = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def parallel_map(fn: Callable[[T], R], items: Sequence[T], jobs: int = 1) -> List[R]:
    """
    对 items 逐项调用 fn

    Args:
        fn: 模块顶层函数（需要可 pickle）
        items: 输入序列
        jobs: worker 数量，<= 1 时在当前进程内顺序执行

    Returns:
        与 items 同序的结果列表
    """
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    workers = min(jobs, len(items))
    log.debug("fan out %d items over %d workers", len(items), workers)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
