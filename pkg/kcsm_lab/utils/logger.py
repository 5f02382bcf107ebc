#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
KCSM Lab Logging Utilities

所有日志器挂在 kcsm_lab 命名空间下；日志写到 stderr，结果表可以安全地写到 stdout。
"""

import logging
import sys
from pathlib import Path
from typing import Optional, Union

ROOT_LOGGER_NAME = "kcsm_lab"
DEFAULT_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
WORKER_FORMAT = "%(asctime)s - [worker %(process)d] %(name)s - %(levelname)s - %(message)s"


class ColoredFormatter(logging.Formatter):
    """终端输出按级别着色"""

    LEVEL_COLORS = {
        logging.DEBUG: "\033[36m",
        logging.INFO: "\033[32m",
        logging.WARNING: "\033[33m",
        logging.ERROR: "\033[31m",
        logging.CRITICAL: "\033[35m",
    }
    RESET = "\033[0m"

    def format(self, record: logging.LogRecord) -> str:
        color = self.LEVEL_COLORS.get(record.levelno)
        if color is None:
            return super().format(record)
        # 复制记录，颜色码不能进入文件处理器
        colored = logging.makeLogRecord(record.__dict__)
        colored.levelname = f"{color}{record.levelname}{self.RESET}"
        return super().format(colored)


def _as_level(level: Union[str, int]) -> int:
    if isinstance(level, int):
        return level
    return getattr(logging, str(level).upper(), logging.INFO)


def setup_logging(
    level: Union[str, int] = "INFO",
    log_file: Optional[str] = None,
    enable_color: bool = True,
    format_string: Optional[str] = None
) -> logging.Logger:
    """
    配置 kcsm_lab 根日志器 (重复调用会替换已有的处理器)

    Args:
        level: 日志级别名称或数值
        log_file: 额外写入的日志文件，None 表示只输出到 stderr
        enable_color: stderr 是终端时是否着色
        format_string: 格式字符串，默认 DEFAULT_FORMAT

    Returns:
        logging.Logger: kcsm_lab 根日志器
    """
    numeric_level = _as_level(level)
    fmt = format_string or DEFAULT_FORMAT

    root = logging.getLogger(ROOT_LOGGER_NAME)
    root.setLevel(numeric_level)
    for handler in list(root.handlers):
        root.removeHandler(handler)
        handler.close()

    stream_handler = logging.StreamHandler(sys.stderr)
    colored = enable_color and sys.stderr.isatty()
    stream_handler.setFormatter(ColoredFormatter(fmt) if colored else logging.Formatter(fmt))
    root.addHandler(stream_handler)

    if log_file:
        path = Path(log_file)
        path.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(path, encoding="utf-8")
        file_handler.setFormatter(logging.Formatter(fmt))
        root.addHandler(file_handler)

    for handler in root.handlers:
        handler.setLevel(numeric_level)
    return root


def current_level() -> int:
    """kcsm_lab 根日志器当前的有效级别"""
    return logging.getLogger(ROOT_LOGGER_NAME).getEffectiveLevel()


def init_worker_logging(level: int) -> None:
    """
    工作进程的日志初始化

    子进程不继承父进程的处理器；级别沿用父进程，但不低于 WARNING。
    """
    setup_logging(max(level, logging.WARNING), enable_color=False, format_string=WORKER_FORMAT)


def get_logger(name: Optional[str] = None) -> logging.Logger:
    """
    取得 kcsm_lab 命名空间下的日志器

    Args:
        name: 短名称 (如 "spectra")，会自动加上 kcsm_lab 前缀；None 表示根日志器

    Returns:
        logging.Logger: 日志器实例
    """
    if not name:
        full_name = ROOT_LOGGER_NAME
    elif name == ROOT_LOGGER_NAME or name.startswith(ROOT_LOGGER_NAME + "."):
        full_name = name
    else:
        full_name = f"{ROOT_LOGGER_NAME}.{name}"

    if not logging.getLogger(ROOT_LOGGER_NAME).handlers:
        setup_logging(level="WARNING")
    return logging.getLogger(full_name)


class LoggerMixin:
    """为类提供以类名命名的 logger 属性"""

    @property
    def logger(self) -> logging.Logger:
        return get_logger(type(self).__name__.lower())
