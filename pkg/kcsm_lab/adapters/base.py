#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Scheduler Base Class

调度器基类，定义连续时间动力学中 Poisson 时钟过程的统一接口。
"""

from abc import ABC, abstractmethod
from typing import Iterator, Tuple

from ..utils.logger import LoggerMixin

# (时刻, 顶点, 用于重采样的均匀随机数)
Ring = Tuple[float, int, float]


class Scheduler(ABC, LoggerMixin):
    """
    调度器抽象基类

    调度器只负责产生时钟响铃序列：每个顶点带一个速率 1 的 Poisson 时钟。
    约束判定、重采样与记录由 dynamics 完成，因此不同调度器给出同分布的轨迹。
    """

    name = "abstract"

    @abstractmethod
    def rings(self, n_vertices: int, t_max: float, seed: int, replica: int) -> Iterator[Ring]:
        """
        按时间顺序产生响铃

        Args:
            n_vertices: 顶点数
            t_max: 终止时刻 (不产生晚于它的响铃)
            seed: 随机种子
            replica: 副本编号

        Yields:
            Ring: (时刻, 顶点, 均匀随机数)，时刻严格递增
        """

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}(name={self.name!r})"
