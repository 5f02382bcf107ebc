#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
KCSM Lab Utils Module

工具模块包含日志、参数解析、随机流与文件读写等通用功能。
"""

from .logger import LoggerMixin, get_logger, setup_logging
from .helpers import (
    config_hash,
    get_worker_count,
    parallel_map,
    parse_float_list,
    parse_int_range,
)
from .streams import StreamTag, stream

__all__ = [
    "LoggerMixin",
    "get_logger",
    "setup_logging",
    "config_hash",
    "get_worker_count",
    "parallel_map",
    "parse_float_list",
    "parse_int_range",
    "StreamTag",
    "stream",
]
