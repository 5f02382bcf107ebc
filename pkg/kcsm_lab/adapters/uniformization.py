#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Uniformization Scheduler

速率为 |V| 的全局时钟，每次响铃均匀选取一个顶点。
"""

from typing import Iterator

from .base import Ring, Scheduler
from ..utils.streams import GlobalStream, StreamTag


class UniformizationScheduler(Scheduler):
    """均匀化调度器，与事件队列调度器同分布"""

    name = "uniformization"

    def rings(self, n_vertices: int, t_max: float, seed: int, replica: int) -> Iterator[Ring]:
        clock = GlobalStream(seed, StreamTag.GLOBAL_CLOCK, replica)
        t = 0.0
        while True:
            t += clock.exponential() / n_vertices
            if t > t_max:
                return
            x = min(int(clock.uniform() * n_vertices), n_vertices - 1)
            yield t, x, clock.uniform()
