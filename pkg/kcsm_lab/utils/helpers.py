#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
KCSM Lab Helper Functions

提供通用的辅助函数：参数解析、哈希、并行映射、内存预算。
"""

import hashlib
import json
import os
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, Callable, Iterable, List, Optional, Sequence, TypeVar, Union

import psutil

from .logger import current_level, init_worker_logging

T = TypeVar("T")
R = TypeVar("R")

WORKERS_ENV = "KCSM_LAB_WORKERS"


def ensure_directory(path: Union[str, Path]) -> Path:
    """
    确保目录存在

    Args:
        path: 目录路径

    Returns:
        Path: 目录路径对象
    """
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    return path


def parse_int_range(text: Union[str, int, Sequence[int]]) -> List[int]:
    """
    解析整数范围，支持 "2..10"、"3,5,8" 与单个整数

    Args:
        text: 范围字符串或整数序列

    Returns:
        List[int]: 展开后的整数列表
    """
    if isinstance(text, int):
        return [text]
    if not isinstance(text, str):
        return [int(v) for v in text]

    values: List[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if ".." in part:
            lo, hi = part.split("..", 1)
            lo_i, hi_i = int(lo), int(hi)
            if hi_i < lo_i:
                raise ValueError(f"范围上界小于下界: {part}")
            values.extend(range(lo_i, hi_i + 1))
        else:
            values.append(int(part))
    return values


def parse_float_list(text: Union[str, float, Sequence[float]]) -> List[float]:
    """
    解析浮点列表，支持 "0.1,0.2" 与 "0.1:0.5:5" (起点:终点:点数，含端点)
    """
    if isinstance(text, (int, float)):
        return [float(text)]
    if not isinstance(text, str):
        return [float(v) for v in text]

    text = text.strip()
    if text.count(":") == 2:
        start, stop, num = text.split(":")
        n = int(num)
        if n == 1:
            return [float(start)]
        step = (float(stop) - float(start)) / (n - 1)
        return [round(float(start) + i * step, 12) for i in range(n)]
    return [float(v) for v in text.split(",") if v.strip()]


def canonical_json(data: Any) -> str:
    """排序键、紧凑分隔符的规范 JSON 字符串"""
    return json.dumps(data, sort_keys=True, separators=(",", ":"), ensure_ascii=False, default=str)


def config_hash(data: Any) -> str:
    """配置的 SHA-256 哈希 (规范 JSON)"""
    return hashlib.sha256(canonical_json(data).encode("utf-8")).hexdigest()


def get_worker_count(requested: Optional[int] = None) -> int:
    """
    确定工作进程数量

    优先级: 显式参数 > 环境变量 KCSM_LAB_WORKERS > 1。
    "auto" 或 0 表示使用物理核心数。
    """
    value: Any = requested
    if value is None:
        value = os.environ.get(WORKERS_ENV)
    if value is None or value == "":
        return 1
    if isinstance(value, str) and value.strip().lower() == "auto":
        value = 0
    try:
        count = int(value)
    except (TypeError, ValueError):
        raise ValueError(f"工作进程数必须是整数或 auto ({WORKERS_ENV} 或 --workers): {value!r}") from None
    if count <= 0:
        count = psutil.cpu_count(logical=False) or psutil.cpu_count() or 1
    return max(1, count)


def available_memory_bytes() -> int:
    """当前可用内存 (字节)"""
    return int(psutil.virtual_memory().available)


def parallel_map(func: Callable[[T], R], tasks: Iterable[T], workers: int = 1) -> List[R]:
    """
    按任务顺序返回结果的并行映射

    workers <= 1 时在当前进程顺序执行；结果顺序只由任务顺序决定。
    """
    tasks = list(tasks)
    if workers <= 1 or len(tasks) <= 1:
        return [func(task) for task in tasks]
    with ProcessPoolExecutor(max_workers=min(workers, len(tasks)), initializer=init_worker_logging,
                             initargs=(current_level(),)) as executor:
        return list(executor.map(func, tasks))


def chunked(items: Sequence[T], n_chunks: int) -> List[List[T]]:
    """把序列切成至多 n_chunks 个连续块"""
    n_chunks = max(1, min(n_chunks, len(items)))
    size, extra = divmod(len(items), n_chunks)
    chunks: List[List[T]] = []
    start = 0
    for i in range(n_chunks):
        stop = start + size + (1 if i < extra else 0)
        chunks.append(list(items[start:stop]))
        start = stop
    return [c for c in chunks if c]


def format_float(value: float) -> str:
    """CSV 中统一的浮点格式"""
    if value is None:
        return ""
    return format(float(value), ".12g")
