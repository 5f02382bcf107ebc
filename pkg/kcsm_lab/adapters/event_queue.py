#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Event Queue Scheduler

每个顶点独立的 Poisson 时钟，下一次响铃时刻保存在二叉堆中。
"""

import heapq
from typing import Iterator

from .base import Ring, Scheduler
from ..utils.streams import VertexStreams


class EventQueueScheduler(Scheduler):
    """
    事件驱动调度器 (默认)

    顶点 x 的随机数全部来自键为 (seed, replica, x) 的独立流，
    因此每个顶点的时钟与其它顶点的事件无关。
    """

    name = "event-queue"

    def rings(self, n_vertices: int, t_max: float, seed: int, replica: int) -> Iterator[Ring]:
        streams = VertexStreams(seed, replica, n_vertices)
        heap = [(streams.exponential(x), x) for x in range(n_vertices)]
        heapq.heapify(heap)
        while heap:
            t, x = heap[0]
            if t > t_max:
                return
            u = streams.uniform(x)
            heapq.heapreplace(heap, (t + streams.exponential(x), x))
            yield t, x, u
