#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Test splittable random streams
"""

import numpy as np
import pytest

from kcsm_lab.utils.streams import GlobalStream, StreamTag, VertexStreams, stream


def test_same_key_same_numbers():
    """测试相同 (seed, 标签, 键) 给出相同序列"""
    a = stream(7, StreamTag.BOOTSTRAP, 3, 1).random(10)
    b = stream(7, StreamTag.BOOTSTRAP, 3, 1).random(10)
    assert np.array_equal(a, b)


def test_different_keys_independent():
    """测试不同标签、键或种子给出不同序列"""
    base = stream(7, StreamTag.BOOTSTRAP, 3).random(5)
    assert not np.array_equal(base, stream(7, StreamTag.ORACLE, 3).random(5))
    assert not np.array_equal(base, stream(7, StreamTag.BOOTSTRAP, 4).random(5))
    assert not np.array_equal(base, stream(8, StreamTag.BOOTSTRAP, 3).random(5))


def test_invalid_seed():
    """测试负种子或缺失种子"""
    with pytest.raises(ValueError):
        stream(-1, StreamTag.EQUILIBRIUM)
    with pytest.raises(ValueError):
        stream(None, StreamTag.EQUILIBRIUM)


def test_vertex_stream_matches_plain_stream():
    """测试顶点流按生成顺序取数，跨越缓冲块边界也一致"""
    streams = VertexStreams(seed=3, replica=2, n_vertices=4)
    count = VertexStreams.BLOCK + 10
    drawn = [streams.uniform(1) for _ in range(count)]
    expected = stream(3, StreamTag.VERTEX_CLOCK, 2, 1).random(2 * VertexStreams.BLOCK)[:count]
    assert np.allclose(drawn, expected)


def test_vertex_streams_do_not_interfere():
    """测试一个顶点的取数不影响另一个顶点"""
    a = VertexStreams(seed=1, replica=0, n_vertices=3)
    b = VertexStreams(seed=1, replica=0, n_vertices=3)
    for _ in range(20):
        a.uniform(0)
    assert a.uniform(2) == b.uniform(2)


def test_global_exponential():
    """测试全局流的指数随机数为正，均值接近 1"""
    clock = GlobalStream(5, StreamTag.GLOBAL_CLOCK, 0)
    values = np.array([clock.exponential() for _ in range(5000)])
    assert np.all(values >= 0)
    assert values.mean() == pytest.approx(1.0, abs=4 / np.sqrt(5000))


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
