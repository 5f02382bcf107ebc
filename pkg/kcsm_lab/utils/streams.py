#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Random Streams

基于计数器的可拆分随机数流。

每条流由 (seed, 标签, 键...) 唯一确定，底层是 numpy 的 Philox 生成器，
通过 SeedSequence 的 spawn_key 拆分。因此结果与工作进程数量、任务调度顺序无关。
"""

import math
from enum import IntEnum
from typing import List

import numpy as np


class StreamTag(IntEnum):
    """随机流用途标签"""
    EQUILIBRIUM = 1
    VERTEX_CLOCK = 2
    GLOBAL_CLOCK = 3
    BOOTSTRAP = 4
    ORACLE = 5
    GRAPH = 6
    INTERACTION = 7
    TEST_FUNCTION = 8
    SOLVER = 9


def stream(seed: int, tag: StreamTag, *key: int) -> np.random.Generator:
    """
    创建一条独立的随机流

    Args:
        seed: 实验种子 (非负整数)
        tag: 用途标签
        *key: 其它整数键，例如副本编号、顶点编号

    Returns:
        np.random.Generator: Philox 生成器
    """
    if seed is None or int(seed) < 0:
        raise ValueError(f"seed 必须是非负整数, 收到 {seed!r}")
    spawn_key = (int(tag),) + tuple(int(k) for k in key)
    sequence = np.random.SeedSequence(entropy=int(seed), spawn_key=spawn_key)
    return np.random.Generator(np.random.Philox(sequence))


class VertexStreams:
    """
    每个顶点一条均匀分布随机流，带块缓冲

    同一 (seed, replica, vertex) 在任何调度方式下得到完全相同的序列。
    """

    BLOCK = 256

    def __init__(self, seed: int, replica: int, n_vertices: int,
                 tag: StreamTag = StreamTag.VERTEX_CLOCK):
        self.seed = seed
        self.replica = replica
        self._tag = tag
        self._generators: List[np.random.Generator] = [None] * n_vertices
        self._buffers: List[List[float]] = [[] for _ in range(n_vertices)]

    def uniform(self, x: int) -> float:
        """取顶点 x 的下一个 [0, 1) 均匀随机数"""
        buf = self._buffers[x]
        if not buf:
            gen = self._generators[x]
            if gen is None:
                gen = stream(self.seed, self._tag, self.replica, x)
                self._generators[x] = gen
            # 倒序存放，pop() 按生成顺序取数
            buf.extend(gen.random(self.BLOCK)[::-1].tolist())
        return buf.pop()

    def exponential(self, x: int) -> float:
        """取顶点 x 的下一个 Exp(1) 随机数"""
        return -math.log1p(-self.uniform(x))


class GlobalStream:
    """单条带缓冲的均匀随机流 (全局时钟使用)"""

    BLOCK = 1024

    def __init__(self, seed: int, tag: StreamTag, *key: int):
        self._gen = stream(seed, tag, *key)
        self._buf: List[float] = []

    def uniform(self) -> float:
        if not self._buf:
            self._buf.extend(self._gen.random(self.BLOCK)[::-1].tolist())
        return self._buf.pop()

    def exponential(self) -> float:
        return -math.log1p(-self.uniform())
