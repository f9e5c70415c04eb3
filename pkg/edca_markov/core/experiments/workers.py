"""
扫描点与仿真种子的并行执行；结果顺序与输入顺序一致
"""
import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, Optional, TypeVar

from edca_markov.core.logger import logger
from edca_markov.utils.load_env import env_int

T = TypeVar("T")
R = TypeVar("R")


def worker_count(requested: Optional[int] = None) -> int:
    """显式参数优先，其次是环境变量 EDCA_WORKERS，默认 CPU 核数"""
    if requested is not None:
        return max(1, requested)
    return max(1, env_int("EDCA_WORKERS", os.cpu_count() or 1))


def ordered_map(fn: Callable[[T], R], items: Iterable[T], workers: Optional[int] = None) -> list[R]:
    """
    用进程池执行 fn；fn 必须是模块级函数（可被 pickle）。
    只有一个 worker 或只有一个任务时在当前进程内执行。
    """
    items = list(items)
    n = min(worker_count(workers), len(items))
    if n <= 1:
        return [fn(item) for item in items]
    logger.debug(f"使用 {n} 个进程执行 {len(items)} 个任务")
    with ProcessPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
