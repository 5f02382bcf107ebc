#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
KCSM Lab - 动力学约束自旋模型实验室

在一般图与格点上定义动力学约束自旋模型 (East、FA-jf、North-East、Spiral、
树上模型等)，提供精确谱隙、连续时间蒙特卡罗动力学、自举渗流阈值估计、
Gibbs 相互作用推广，以及在可精确求解的规模上逐条验证谱隙不等式的检查套件。

主要功能:
- 模型目录与模型描述文件
- 稀疏生成元的精确谱隙与遍历分支
- 持续性函数与击中时间的蒙特卡罗估计
- 自举渗流闭包与有限体积阈值
- 带相互作用的约束动力学
- 可复现的实验运行器与命令行

基本用法:
    from kcsm_lab import catalog, model_gap

    report = model_gap(catalog("east", n=8, q=0.5))
    print(f"谱隙: {report.gap:.6g}")

版本: 1.0.0
许可: MIT License
"""

# 版本信息 (子模块在导入时读取，必须先于下面的导入)
__version__ = "1.0.0"
__license__ = "MIT"

from .core.topology import Graph, Rectangle, RootedTree, lattice, random_connected_graph, spanning_tree
from .core.models import ModelSpec, SiteMeasure, SpinConfig, constraint, custom_model, dominates, vacant
from .core.catalog import catalog, known_models, load_model_description
from .core.bootstrap import ThresholdEstimate, closure, estimate_qbp, internally_spanned
from .core.dynamics import HittingTimeSample, PersistenceCurve, hitting_time, persistence, simulate
from .core.spectra import SpectralReport, build_generator, gap_plus, model_gap, spectral_gap
from .core.gibbs import Interaction, gibbs_measure, interacting_gap
from .core.checks import CheckReport, run_check_suite
from .core.config import ConfigManager, ExperimentConfig
from .core.manager import ExperimentRunner, RunResult
from .core.exceptions import (
    KcsmLabError,
    TopologyError,
    ModelSpecError,
    UnsupportedModelError,
    SizeCapError,
    SolverError,
    PreconditionError,
    CollarError,
    ConfigError,
)

# 公开API
__all__ = [
    # 图与模型
    "Graph",
    "Rectangle",
    "RootedTree",
    "lattice",
    "random_connected_graph",
    "spanning_tree",
    "ModelSpec",
    "SiteMeasure",
    "SpinConfig",
    "constraint",
    "custom_model",
    "dominates",
    "vacant",
    "catalog",
    "known_models",
    "load_model_description",

    # 分析
    "ThresholdEstimate",
    "closure",
    "estimate_qbp",
    "internally_spanned",
    "HittingTimeSample",
    "PersistenceCurve",
    "hitting_time",
    "persistence",
    "simulate",
    "SpectralReport",
    "build_generator",
    "gap_plus",
    "model_gap",
    "spectral_gap",
    "Interaction",
    "gibbs_measure",
    "interacting_gap",

    # 实验
    "CheckReport",
    "run_check_suite",
    "ConfigManager",
    "ExperimentConfig",
    "ExperimentRunner",
    "RunResult",

    # 异常类
    "KcsmLabError",
    "TopologyError",
    "ModelSpecError",
    "UnsupportedModelError",
    "SizeCapError",
    "SolverError",
    "PreconditionError",
    "CollarError",
    "ConfigError",

    # 便捷函数
    "gap",
    "run_experiment",
    "run_checks",
]


# 便捷函数
def gap(name: str, **params) -> float:
    """
    便捷函数：目录模型的谱隙

    Args:
        name: 模型名称
        **params: 模型参数 (n, shape, q, ...)

    Returns:
        float: 谱隙
    """
    return model_gap(catalog(name, **params)).gap


def run_experiment(config_path: str) -> RunResult:
    """
    便捷函数：按配置文件运行一次实验

    Args:
        config_path: 实验配置文件路径

    Returns:
        RunResult: 运行结果 (CSV 与清单已写出)
    """
    manager = ConfigManager(config_path)
    manager.load_config()
    return ExperimentRunner(manager).run()


def run_checks(profile: str = "quick", seed: int = 0) -> CheckReport:
    """便捷函数：运行不等式检查套件"""
    return run_check_suite(profile, seed)
