#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
KCSM Lab Exception Classes

定义动力学约束自旋模型实验室使用的异常类。
"""

from typing import Optional, List, Sequence


class KcsmLabError(Exception):
    """
    KCSM Lab 基础异常类

    所有模型、求解器与实验相关异常的基类。
    """

    def __init__(self, message: str, details: Optional[str] = None,
                 suggestions: Optional[List[str]] = None):
        """
        初始化异常

        Args:
            message: 错误消息
            details: 详细信息
            suggestions: 解决建议
        """
        super().__init__(message)
        self.message = message
        self.details = details
        self.suggestions = suggestions or []

    def __str__(self) -> str:
        """返回格式化的错误信息"""
        result = self.message

        if self.details:
            result += f"\n详细信息: {self.details}"

        if self.suggestions:
            result += "\n解决建议:"
            for i, suggestion in enumerate(self.suggestions, 1):
                result += f"\n  {i}. {suggestion}"

        return result

    def to_dict(self) -> dict:
        """转换为字典格式"""
        return {
            'error_type': self.__class__.__name__,
            'message': self.message,
            'details': self.details,
            'suggestions': self.suggestions
        }


class TopologyError(KcsmLabError):
    """
    图结构异常

    图不连通、邻接表不对称、格点嵌入不一致或拓扑类型不受支持时抛出。
    """

    def __init__(self, problem: str, details: Optional[str] = None):
        suggestions = [
            "检查邻接表是否对称且不含自环",
            "确认图是连通的 (可使用 Graph.from_edges 重新构造)",
            "周期格点每个方向的长度至少为 3",
        ]
        super().__init__(f"图结构错误: {problem}", details, suggestions)
        self.problem = problem


class ModelSpecError(KcsmLabError):
    """
    模型定义异常

    影响集违反 Hp1/Hp2、边界设置非法、目录名称未知或参数无效时抛出。
    """

    def __init__(self, problem: str, model_name: Optional[str] = None,
                 details: Optional[str] = None,
                 suggestions: Optional[List[str]] = None):
        message = f"模型定义错误: {problem}"
        if model_name:
            message = f"模型定义错误 ({model_name}): {problem}"

        if suggestions is None:
            suggestions = [
                "使用 catalog() 构造目录中的标准模型",
                "确认 x 不属于自身的任何影响集 (Hp1)",
                "确认好边界集合是边界集合 B 的子集",
            ]
        super().__init__(message, details, suggestions)
        self.model_name = model_name
        self.problem = problem


class UnknownModelError(ModelSpecError):
    """目录中不存在请求的模型名称"""

    def __init__(self, name: str, known: Sequence[str]):
        super().__init__(
            f"未知的模型名称: {name}",
            details=f"可用模型: {', '.join(known)}",
            suggestions=["检查模型名称拼写", "或通过 custom_model() 定义自己的影响集"],
        )
        self.name = name
        self.known = list(known)


class UnsupportedModelError(KcsmLabError):
    """
    模型不支持该操作

    例如将非 0-1 自旋空间的模型传给自举渗流。
    """

    def __init__(self, operation: str, reason: str):
        super().__init__(
            f"操作 {operation} 不支持该模型",
            reason,
            ["自举渗流与穿越路径只对 S = {0,1}, G = {0} 的模型有定义"],
        )
        self.operation = operation


class SizeCapError(KcsmLabError):
    """
    规模超限异常

    精确分析 (状态空间枚举) 超过顶点上限或内存预算时抛出。
    """

    def __init__(self, n_vertices: int, cap: int, details: Optional[str] = None):
        super().__init__(
            f"状态空间过大: |V| = {n_vertices} 超过上限 {cap}",
            details,
            [
                "减小体积 (顶点数) 后重试",
                "对大体积使用蒙特卡罗动力学 (persistence / hitting) 而非精确谱",
            ],
        )
        self.n_vertices = n_vertices
        self.cap = cap


class SolverError(KcsmLabError):
    """
    数值求解失败

    特征值或线性方程求解器不收敛或矩阵奇异时抛出。
    """

    def __init__(self, solver: str, reason: str, residual: Optional[float] = None):
        details = reason
        if residual is not None:
            details = f"{reason} (残差 {residual:.3e})"
        super().__init__(
            f"求解器 {solver} 失败",
            details,
            ["放宽容差 tolerance", "提高 dense_limit 以使用稠密求解器"],
        )
        self.solver = solver
        self.residual = residual


class PreconditionError(KcsmLabError):
    """操作的前置条件不满足"""

    def __init__(self, operation: str, condition: str,
                 details: Optional[str] = None):
        super().__init__(
            f"{operation}: 前置条件不满足: {condition}",
            details,
        )
        self.operation = operation
        self.condition = condition


class CollarError(KcsmLabError):
    """
    边界环带过窄

    边界条件 τ 没有覆盖与体积相交的某个相互作用支撑集时抛出。
    """

    def __init__(self, missing_sites: Sequence, interaction_range: int):
        shown = ", ".join(str(s) for s in list(missing_sites)[:5])
        super().__init__(
            "边界条件未覆盖所需的环带格点",
            f"缺失格点: {shown} (共 {len(missing_sites)} 个), 相互作用范围 r = {interaction_range}",
            [f"使用 collar(volume, width={interaction_range}) 生成足够宽的边界"],
        )
        self.missing_sites = list(missing_sites)
        self.interaction_range = interaction_range


class ConfigError(KcsmLabError):
    """
    实验配置异常

    当配置文件格式错误或不满足 schema 时抛出。
    """

    def __init__(self, config_path: Optional[str] = None,
                 config_error: Optional[str] = None):
        message = "实验配置错误"

        details = []
        if config_path:
            details.append(f"配置文件: {config_path}")
        if config_error:
            details.append(f"错误详情: {config_error}")

        suggestions = [
            "检查配置文件格式是否正确 (JSON 或 YAML)",
            "随机子命令 (persistence, bootstrap-scan, hitting, gibbs-gap) 必须给出 seed",
            "参考 kcsm_lab/data/default_config.json 中的字段",
        ]

        super().__init__(message, "; ".join(details) if details else None, suggestions)
        self.config_path = config_path
        self.config_error = config_error


class SchedulerNotSupportedError(KcsmLabError):
    """不支持的事件调度后端"""

    def __init__(self, name: str, supported: Optional[List[str]] = None):
        super().__init__(
            f"不支持的调度后端: {name}",
            f"支持的后端: {', '.join(supported)}" if supported else None,
            ["使用 'event-queue' (默认) 或 'uniformization'"],
        )
        self.name = name
        self.supported = supported or []
