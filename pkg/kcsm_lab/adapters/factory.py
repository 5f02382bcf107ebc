#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Scheduler Factory

调度器工厂，根据名称创建并缓存调度器实例。
"""

from typing import Dict, List

from ..core.exceptions import SchedulerNotSupportedError
from ..utils.logger import get_logger

from .base import Scheduler

_scheduler_cache: Dict[str, Scheduler] = {}

logger = get_logger("scheduler_factory")

DEFAULT_SCHEDULER = "event-queue"


def available_schedulers() -> List[str]:
    return ["event-queue", "uniformization"]


def get_scheduler(name: str = DEFAULT_SCHEDULER, force_reload: bool = False) -> Scheduler:
    """
    获取调度器实例

    Args:
        name: 调度器名称 ('event-queue' 或 'uniformization')
        force_reload: 是否强制重新创建

    Returns:
        Scheduler: 调度器实例

    Raises:
        SchedulerNotSupportedError: 不支持的调度器
    """
    key = name.strip().lower()
    if not force_reload and key in _scheduler_cache:
        return _scheduler_cache[key]

    if key == "event-queue":
        from .event_queue import EventQueueScheduler
        scheduler = EventQueueScheduler()
    elif key == "uniformization":
        from .uniformization import UniformizationScheduler
        scheduler = UniformizationScheduler()
    else:
        raise SchedulerNotSupportedError(name, available_schedulers())

    _scheduler_cache[key] = scheduler
    logger.debug(f"调度器创建成功: {scheduler.__class__.__name__}")
    return scheduler
