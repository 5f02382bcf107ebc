#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Scheduler adapters

动力学时钟过程的可替换后端。
"""

from .base import Scheduler
from .factory import available_schedulers, get_scheduler

__all__ = ["Scheduler", "available_schedulers", "get_scheduler"]
