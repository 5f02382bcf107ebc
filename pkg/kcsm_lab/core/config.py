#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Configuration Manager

实验配置管理器，负责实验配置文件的读取、合并、验证与保存。
"""

import copy
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Union

import yaml

from .exceptions import ConfigError
from ..utils.helpers import config_hash, get_worker_count, parse_float_list, parse_int_range
from ..utils.io import read_mapping, write_mapping
from ..utils.logger import LoggerMixin

SCHEMA_VERSION = 1
DEFAULT_CONFIG_PATH = Path(__file__).resolve().parent.parent / "data" / "default_config.json"

SUBCOMMANDS = ("gap", "persistence", "bootstrap-scan", "hitting", "gibbs-gap", "check")
STOCHASTIC_SUBCOMMANDS = ("persistence", "bootstrap-scan", "hitting", "gibbs-gap")
# 不影响结果的配置节，不计入配置哈希
RUNTIME_SECTIONS = ("parallel", "logging", "output")
PROFILES = ("quick", "full")


class ConfigManager(LoggerMixin):
    """
    配置管理器

    以包内的 default_config.json 为底，深度合并用户的 JSON 或 YAML 配置。
    """

    def __init__(self, config_path: Optional[Union[str, Path]] = None):
        """
        初始化配置管理器

        Args:
            config_path: 实验配置文件路径，None 表示只使用默认配置
        """
        self.config_path = Path(config_path) if config_path else None
        self._config: Dict[str, Any] = {}
        self._config_loaded = False
        self._default_config = self._get_default_config()

    def _get_default_config(self) -> Dict[str, Any]:
        with open(DEFAULT_CONFIG_PATH, "r", encoding="utf-8") as f:
            return json.load(f)

    def load_config(self, force_reload: bool = False) -> Dict[str, Any]:
        """
        加载配置文件

        Args:
            force_reload: 是否强制重新加载

        Returns:
            Dict[str, Any]: 合并并验证后的配置

        Raises:
            ConfigError: 文件缺失、格式错误或不符合模式
        """
        if self._config_loaded and not force_reload:
            return self._config

        config = copy.deepcopy(self._default_config)
        if self.config_path is not None:
            if not self.config_path.exists():
                raise ConfigError(str(self.config_path), "配置文件不存在")
            try:
                user = read_mapping(self.config_path)
            except (ValueError, yaml.YAMLError) as e:
                self.logger.error(f"配置文件格式错误: {e}")
                raise ConfigError(str(self.config_path), f"配置文件格式错误: {e}")
            config = self._merge_config(config, user)
            self.logger.info(f"配置文件加载成功: {self.config_path}")

        self._validate_config(config)
        self._config = config
        self._config_loaded = True
        return self._config

    def save_config(self, path: Optional[Union[str, Path]] = None) -> Path:
        """
        保存当前有效配置

        Raises:
            ConfigError: 没有目标路径或写入失败
        """
        target = Path(path) if path else self.config_path
        if target is None:
            raise ConfigError(None, "没有指定保存路径")
        if not self._config_loaded:
            self.load_config()
        try:
            write_mapping(target, self._config)
        except OSError as e:
            raise ConfigError(str(target), f"保存配置文件失败: {e}")
        self.logger.info(f"配置文件保存成功: {target}")
        return target

    def _validate_config(self, config: Dict[str, Any]) -> bool:
        """
        验证配置模式

        Raises:
            ConfigError: 配置不符合模式
        """
        where = str(self.config_path) if self.config_path else None

        def fail(message: str) -> None:
            raise ConfigError(where, message)

        if config.get("schema_version") != SCHEMA_VERSION:
            fail(f"不支持的 schema_version: {config.get('schema_version')} (期望 {SCHEMA_VERSION})")
        for section in ("experiment", "model", "grid", "sampling", "solver", "output"):
            if not isinstance(config.get(section), dict):
                fail(f"缺少必需的配置节: {section}")

        subcommand = config["experiment"].get("subcommand")
        if subcommand not in SUBCOMMANDS:
            fail(f"未知的子命令: {subcommand} (可选: {', '.join(SUBCOMMANDS)})")
        if not config["model"].get("name"):
            fail("model.name 不能为空")

        sampling = config["sampling"]
        seed = sampling.get("seed")
        if seed is None and subcommand in STOCHASTIC_SUBCOMMANDS:
            fail(f"子命令 {subcommand} 需要 sampling.seed (或 --seed)")
        if seed is not None and (not isinstance(seed, int) or isinstance(seed, bool) or seed < 0):
            fail(f"sampling.seed 必须是非负整数: {seed!r}")
        n_samples = sampling.get("n_samples")
        if not isinstance(n_samples, int) or n_samples < 1:
            fail("sampling.n_samples 必须是正整数")
        t_cap = sampling.get("t_cap")
        if t_cap is not None and not (isinstance(t_cap, (int, float)) and t_cap > 0):
            fail("sampling.t_cap 必须为正数或 null")
        if sampling.get("start", "ones") not in ("ones", "equilibrium"):
            fail("sampling.start 只能是 ones 或 equilibrium")

        try:
            q_values = parse_float_list(config["grid"].get("q", []))
            sizes = parse_int_range(config["grid"].get("sizes", []))
            t_grid = parse_float_list(sampling.get("t_grid", "0"))
        except (TypeError, ValueError) as e:
            fail(f"无法解析参数网格: {e}")
        if not q_values or any(not 0.0 < q < 1.0 for q in q_values):
            fail(f"grid.q 必须是 (0, 1) 内的非空列表: {q_values}")
        if any(s < 1 for s in sizes):
            fail(f"grid.sizes 必须为正整数: {sizes}")
        if not t_grid or min(t_grid) < 0:
            fail("sampling.t_grid 必须非空且非负")

        solver = config["solver"]
        if not solver.get("tolerance", 0) > 0:
            fail("solver.tolerance 必须为正")
        if not 1 <= int(solver.get("max_vertices", 24)) <= 24:
            fail("solver.max_vertices 必须在 1..24 内")

        workers = config.get("parallel", {}).get("workers")
        try:
            get_worker_count(None if workers in (None, "") else workers)
        except ValueError as e:
            fail(str(e))

        profile = config.get("check", {}).get("profile", "quick")
        if profile not in PROFILES:
            fail(f"未知的检查配置: {profile}")
        return True

    def _merge_config(self, default: Dict[str, Any], user: Mapping[str, Any]) -> Dict[str, Any]:
        """
        深度合并默认配置和用户配置

        Args:
            default: 默认配置
            user: 用户配置

        Returns:
            Dict[str, Any]: 合并后的配置
        """
        merged = copy.deepcopy(default)
        for key, value in user.items():
            if key in merged and isinstance(merged[key], dict) and isinstance(value, dict):
                merged[key] = self._merge_config(merged[key], value)
            else:
                merged[key] = copy.deepcopy(value)
        return merged

    def get(self, key: str, default: Any = None) -> Any:
        """
        获取配置值

        Args:
            key: 配置键，支持点号分隔的嵌套键
            default: 默认值
        """
        if not self._config_loaded:
            self.load_config()
        value: Any = self._config
        try:
            for k in key.split("."):
                value = value[k]
            return value
        except (KeyError, TypeError):
            return default

    def set(self, key: str, value: Any) -> bool:
        """设置配置值 (点号分隔的嵌套键)；设置后重新验证"""
        if not self._config_loaded:
            self.load_config()
        keys = key.split(".")
        config = self._config
        for k in keys[:-1]:
            config = config.setdefault(k, {})
        config[keys[-1]] = value
        self._validate_config(self._config)
        self.logger.debug(f"配置已更新: {key} = {value}")
        return True

    def apply_overrides(self, overrides: Mapping[str, Any]) -> None:
        """命令行参数覆盖配置字段，值为 None 的项忽略"""
        if not self._config_loaded:
            self.load_config()
        for key, value in overrides.items():
            if value is None:
                continue
            keys = key.split(".")
            config = self._config
            for k in keys[:-1]:
                config = config.setdefault(k, {})
            config[keys[-1]] = value
        self._validate_config(self._config)

    def result_config(self) -> Dict[str, Any]:
        """决定结果的配置部分 (去掉并行、日志与输出位置设置)"""
        return {k: v for k, v in self.config.items() if k not in RUNTIME_SECTIONS}

    def config_hash(self) -> str:
        """决定结果的配置部分的 SHA-256"""
        return config_hash(self.result_config())

    @property
    def config(self) -> Dict[str, Any]:
        if not self._config_loaded:
            self.load_config()
        return copy.deepcopy(self._config)

    def experiment(self) -> "ExperimentConfig":
        return ExperimentConfig.from_dict(self.config)


@dataclass
class ExperimentConfig:
    """一次实验的类型化配置"""
    subcommand: str
    model: Dict[str, Any]
    q_values: List[float]
    sizes: List[int]
    n_samples: int
    t_grid: List[float]
    seed: int
    t_cap: Optional[float] = None
    start: str = "ones"
    scheduler: str = "event-queue"
    tolerance: float = 1e-10
    dense_limit: int = 4096
    max_vertices: int = 24
    bootstrap: Dict[str, Any] = field(default_factory=dict)
    gibbs: Dict[str, Any] = field(default_factory=dict)
    profile: str = "quick"
    csv_path: str = "results.csv"
    write_manifest: bool = True
    workers: Optional[int] = None
    log_level: str = "INFO"
    raw: Dict[str, Any] = field(default_factory=dict, repr=False)

    @classmethod
    def from_dict(cls, config: Mapping[str, Any]) -> "ExperimentConfig":
        sampling = config["sampling"]
        solver = config["solver"]
        workers = config.get("parallel", {}).get("workers")
        return cls(
            subcommand=config["experiment"]["subcommand"],
            model=dict(config["model"]),
            q_values=parse_float_list(config["grid"]["q"]),
            sizes=parse_int_range(config["grid"].get("sizes", [])),
            n_samples=int(sampling["n_samples"]),
            t_grid=parse_float_list(sampling.get("t_grid", "0")),
            seed=int(sampling.get("seed") or 0),
            t_cap=sampling.get("t_cap"),
            start=sampling.get("start", "ones"),
            scheduler=sampling.get("scheduler", "event-queue"),
            tolerance=float(solver.get("tolerance", 1e-10)),
            dense_limit=int(solver.get("dense_limit", 4096)),
            max_vertices=int(solver.get("max_vertices", 24)),
            bootstrap=dict(config.get("bootstrap", {})),
            gibbs=dict(config.get("gibbs", {})),
            profile=config.get("check", {}).get("profile", "quick"),
            csv_path=str(config["output"].get("csv", "results.csv")),
            write_manifest=bool(config["output"].get("manifest", True)),
            workers=None if workers in (None, "") else workers,
            log_level=config.get("logging", {}).get("level", "INFO"),
            raw=copy.deepcopy(dict(config)),
        )
