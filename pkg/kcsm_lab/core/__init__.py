#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
KCSM Lab Core Module

核心模块包含图结构、模型规格、自举渗流、动力学、谱分析、Gibbs 相互作用与实验运行器。
"""

from .topology import Graph, Rectangle, RootedTree, lattice, spanning_tree
from .models import ModelSpec, SiteMeasure, SpinConfig, constraint, dominates
from .catalog import catalog, load_model_description
from .config import ConfigManager, ExperimentConfig
from .manager import ExperimentRunner
from .exceptions import (
    KcsmLabError,
    TopologyError,
    ModelSpecError,
    SizeCapError,
    SolverError,
    ConfigError,
)

__all__ = [
    "Graph",
    "Rectangle",
    "RootedTree",
    "lattice",
    "spanning_tree",
    "ModelSpec",
    "SiteMeasure",
    "SpinConfig",
    "constraint",
    "dominates",
    "catalog",
    "load_model_description",
    "ConfigManager",
    "ExperimentConfig",
    "ExperimentRunner",
    "KcsmLabError",
    "TopologyError",
    "ModelSpecError",
    "SizeCapError",
    "SolverError",
    "ConfigError",
]
