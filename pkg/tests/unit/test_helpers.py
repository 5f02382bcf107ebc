#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Test helper functions: parameter parsing, hashing, worker count, parallel map
"""

import pytest

from kcsm_lab.utils.helpers import (
    WORKERS_ENV,
    chunked,
    config_hash,
    format_float,
    get_worker_count,
    parallel_map,
    parse_float_list,
    parse_int_range,
)


def _square(x):
    return x * x


def test_parse_int_range():
    """测试整数范围解析"""
    assert parse_int_range("2..5") == [2, 3, 4, 5]
    assert parse_int_range("3,5,8") == [3, 5, 8]
    assert parse_int_range("1,4..6") == [1, 4, 5, 6]
    assert parse_int_range(7) == [7]
    assert parse_int_range([2, 3]) == [2, 3]
    assert parse_int_range("") == []
    with pytest.raises(ValueError):
        parse_int_range("5..2")


def test_parse_float_list():
    """测试浮点列表与等分网格解析"""
    assert parse_float_list("0.1,0.25") == [0.1, 0.25]
    assert parse_float_list("0:1:5") == [0.0, 0.25, 0.5, 0.75, 1.0]
    assert parse_float_list("0.1:0.6:26")[-1] == 0.6
    assert len(parse_float_list("0.1:0.6:26")) == 26
    assert parse_float_list("0.3:0.9:1") == [0.3]
    assert parse_float_list(0.5) == [0.5]


def test_config_hash_is_canonical():
    """测试配置哈希与键顺序无关"""
    assert config_hash({"a": 1, "b": [1, 2]}) == config_hash({"b": [1, 2], "a": 1})
    assert config_hash({"a": 1}) != config_hash({"a": 2})


def test_worker_count(monkeypatch):
    """测试工作进程数的优先级"""
    monkeypatch.delenv(WORKERS_ENV, raising=False)
    assert get_worker_count() == 1
    assert get_worker_count(3) == 3
    monkeypatch.setenv(WORKERS_ENV, "2")
    assert get_worker_count() == 2
    assert get_worker_count(5) == 5
    monkeypatch.setenv(WORKERS_ENV, "auto")
    assert get_worker_count() >= 1
    monkeypatch.setenv(WORKERS_ENV, "abc")
    with pytest.raises(ValueError):
        get_worker_count()


def test_chunked_and_parallel_map():
    """测试分块与保持顺序的并行映射"""
    assert chunked(list(range(7)), 3) == [[0, 1, 2], [3, 4], [5, 6]]
    assert chunked([1, 2], 5) == [[1], [2]]
    assert chunked([], 3) == []
    assert parallel_map(_square, range(6), workers=1) == [0, 1, 4, 9, 16, 25]
    assert parallel_map(_square, range(6), workers=2) == [0, 1, 4, 9, 16, 25]


def test_format_float():
    """测试 CSV 浮点格式"""
    assert format_float(0.5) == "0.5"
    assert format_float(1 / 3) == "0.333333333333"
    assert format_float(None) == ""
    assert format_float(float("inf")) == "inf"


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
