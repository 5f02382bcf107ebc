#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Dynamics

连续时间热浴动力学的精确模拟、平衡态抽样、持续性函数估计与击中时间估计。

每个顶点带一个速率 1 的 Poisson 时钟；时钟响铃时若 c_x = 1，
则按 ν 重新抽取 x 的状态 (可能抽到原值)，否则什么也不发生。
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .exceptions import PreconditionError
from .models import ConstraintHolds, ModelSpec, SiteMeasure, SpinConfig, VertexState
from ..adapters.factory import DEFAULT_SCHEDULER, get_scheduler
from ..utils.helpers import chunked, get_worker_count, parallel_map
from ..utils.io import EVENT_DTYPE, read_events, write_events
from ..utils.logger import get_logger
from ..utils.streams import StreamTag, stream

logger = get_logger("dynamics")

FLAG_LEGAL = 1
FLAG_CHANGED = 2


# ----------------------------------------------------------------------
# 目标集合

@dataclass(frozen=True)
class ConfigPredicate:
    """把 SpinConfig -> bool 的函数包装成目标集合 (每次状态改变都检查)"""
    fn: Callable[[SpinConfig], bool]
    n_states: int = 2

    @property
    def watch(self):
        return None

    def holds(self, values: Sequence[int]) -> bool:
        return bool(self.fn(SpinConfig.from_values(values, self.n_states)))


Target = Union[VertexState, ConstraintHolds, ConfigPredicate, Callable[[SpinConfig], bool]]


def as_target(target: Target, model: ModelSpec):
    if isinstance(target, (VertexState, ConstraintHolds, ConfigPredicate)):
        return target
    if callable(target):
        return ConfigPredicate(target, model.measure.n_states)
    raise TypeError(f"无法识别的目标集合: {target!r}")


# ----------------------------------------------------------------------
# 轨迹

@dataclass
class Trajectory:
    """
    一条模拟轨迹

    events 是结构化数组 (time, vertex, state, flags)，flags 第 0 位为
    "约束满足"，第 1 位为 "状态改变"。不满足约束的响铃以原状态记录。
    """
    model_name: str
    initial: SpinConfig
    events: np.ndarray
    final: SpinConfig
    t_max: float
    seed: int
    replica: int
    scheduler: str
    stopped_at: Optional[float] = None

    @property
    def n_events(self) -> int:
        return len(self.events)

    @property
    def n_applied(self) -> int:
        return int(np.count_nonzero(self.events["flags"] & FLAG_CHANGED))

    def config_at(self, t: float) -> SpinConfig:
        """时刻 t 的构型 (右连续)"""
        values = list(self.initial.values())
        for time, vertex, state, flags in self.events:
            if time > t:
                break
            if flags & FLAG_LEGAL:
                values[int(vertex)] = int(state)
        return SpinConfig.from_values(values, self.initial.n_states)

    def replay(self) -> SpinConfig:
        """从初始构型重放全部事件"""
        return self.config_at(math.inf)

    def dump(self, path: Union[str, Path]) -> Path:
        """写出二进制事件日志，元数据写到同名 .json"""
        path = Path(path)
        write_events(path, self.events)
        meta = {
            "model": self.model_name, "n": self.initial.n, "n_states": self.initial.n_states,
            "initial": str(self.initial.code), "t_max": self.t_max, "seed": self.seed,
            "replica": self.replica, "scheduler": self.scheduler, "stopped_at": self.stopped_at,
        }
        with open(path.with_suffix(path.suffix + ".json"), "w", encoding="utf-8") as f:
            json.dump(meta, f, indent=2, sort_keys=True)
        return path

    @classmethod
    def load(cls, path: Union[str, Path]) -> "Trajectory":
        path = Path(path)
        with open(path.with_suffix(path.suffix + ".json"), "r", encoding="utf-8") as f:
            meta = json.load(f)
        initial = SpinConfig(meta["n"], int(meta["initial"]), meta["n_states"])
        traj = cls(meta["model"], initial, read_events(path), initial, meta["t_max"],
                   meta["seed"], meta["replica"], meta["scheduler"], meta["stopped_at"])
        traj.final = traj.replay()
        return traj


def _run(model: ModelSpec, values: List[int], t_max: float, seed: int, replica: int,
         scheduler: str, recorder: Optional[List[Tuple[float, int, int, int]]] = None,
         record_illegal: bool = True, stop_vertex: Optional[int] = None,
         target=None) -> Optional[float]:
    """
    原地推进 values，返回停止时刻 (未停止返回 None)

    stop_vertex: 该顶点状态第一次改变时停止
    target: 第一次进入目标集合时停止
    """
    compiled = model.compiled
    evaluate = compiled.evaluate
    mask = model.measure.good_mask
    draw = model.measure.state_from_uniform
    good = [mask[v] for v in values]
    watch = None if target is None else target.watch

    if target is not None and target.holds(values):
        return 0.0

    for t, x, u in get_scheduler(scheduler).rings(len(values), t_max, seed, replica):
        if evaluate(x, good):
            new = draw(u)
            old = values[x]
            if recorder is not None:
                recorder.append((t, x, new, FLAG_LEGAL | (FLAG_CHANGED if new != old else 0)))
            if new == old:
                continue
            values[x] = new
            good[x] = mask[new]
            if x == stop_vertex:
                return t
            if target is not None and (watch is None or x in watch) and target.holds(values):
                return t
        elif recorder is not None and record_illegal:
            recorder.append((t, x, values[x], 0))
    return None


def simulate(model: ModelSpec, initial: SpinConfig, t_max: float, seed: int, replica: int = 0,
             scheduler: str = DEFAULT_SCHEDULER, record_illegal: bool = True,
             stop_vertex: Optional[int] = None, target: Optional[Target] = None) -> Trajectory:
    """
    模拟 [0, t_max] 上的动力学

    Args:
        model: 模型规格
        initial: 初始构型
        t_max: 终止时刻 (非负)
        seed: 随机种子
        replica: 副本编号，与 seed 一起决定全部随机数
        scheduler: 时钟后端
        record_illegal: 是否记录约束不满足的响铃
        stop_vertex: 该顶点第一次改变状态时提前停止
        target: 第一次进入目标集合时提前停止

    Returns:
        Trajectory: 事件列表与终止构型
    """
    if t_max < 0:
        raise PreconditionError("simulate", "t_max 必须非负", f"t_max = {t_max}")
    if initial.n != model.n_vertices:
        raise PreconditionError("simulate", "初始构型长度与顶点数不一致")
    values = list(initial.values())
    recorder: List[Tuple[float, int, int, int]] = []
    stopped = _run(model, values, t_max, seed, replica, scheduler, recorder, record_illegal,
                   stop_vertex, None if target is None else as_target(target, model))
    events = np.array(recorder, dtype=EVENT_DTYPE) if recorder else np.zeros(0, dtype=EVENT_DTYPE)
    final = SpinConfig.from_values(values, initial.n_states)
    logger.debug(f"{model.name}: 模拟到 t={t_max}, 事件 {len(events)} 个")
    return Trajectory(model.name, initial, events, final, float(t_max), seed, replica,
                      scheduler, stopped)


def sample_equilibrium(measure: Union[SiteMeasure, float], n_vertices: int, seed: int,
                       replica: int = 0) -> SpinConfig:
    """
    从乘积测度 μ = ⊗ν 中抽取构型

    measure 也可以是 [0, 1] 中的空位密度 q (包括退化情形 q = 0 与 q = 1)。
    """
    u = stream(seed, StreamTag.EQUILIBRIUM, replica).random(n_vertices)
    if not isinstance(measure, SiteMeasure):
        q = float(measure)
        if not 0.0 <= q <= 1.0:
            raise PreconditionError("sample_equilibrium", "q 必须在 [0, 1] 内", f"q = {q}")
        return SpinConfig.from_values((u >= q).astype(np.int64))
    idx = np.searchsorted(np.asarray(measure.cumulative), u, side="right")
    return SpinConfig.from_values(np.minimum(idx, measure.n_states - 1), measure.n_states)


# ----------------------------------------------------------------------
# 持续性

@dataclass
class PersistenceCurve:
    """
    持续性函数 F(t) = P_μ(原点在 [0, t] 上不改变状态) 及其分解 F = F0 + F1

    F0: 原点初始处于好状态的部分；F1: 其余部分。
    """
    t: np.ndarray
    F: np.ndarray
    F0: np.ndarray
    F1: np.ndarray
    stderr: np.ndarray
    n_samples: int
    exact: bool = False
    model_name: str = ""
    q: float = float("nan")
    extras: Dict[str, Any] = field(default_factory=dict)

    def rows(self) -> List[Dict[str, float]]:
        return [{"t": float(t), "F": float(f), "F0": float(f0), "F1": float(f1), "stderr": float(s)}
                for t, f, f0, f1, s in zip(self.t, self.F, self.F0, self.F1, self.stderr)]


def two_state_persistence(q: float, t) -> np.ndarray:
    """单自旋 (无约束) 的持续性 p·e^{-qt} + q·e^{-pt}"""
    t = np.asarray(t, dtype=float)
    p = 1.0 - q
    return p * np.exp(-q * t) + q * np.exp(-p * t)


def persistence_upper_bound(q: float, gap: float, t) -> np.ndarray:
    """持续性上界 e^{-q·gap·t} + e^{-p·gap·t}"""
    t = np.asarray(t, dtype=float)
    return np.exp(-q * gap * t) + np.exp(-(1.0 - q) * gap * t)


def _persistence_chunk(task) -> Tuple[np.ndarray, np.ndarray]:
    model, origin, t_end, seed, replicas, scheduler = task
    mask = model.measure.good_mask
    taus = np.empty(len(replicas))
    start_good = np.empty(len(replicas), dtype=bool)
    for i, r in enumerate(replicas):
        values = list(sample_equilibrium(model.measure, model.n_vertices, seed, r).values())
        start_good[i] = mask[values[origin]]
        stopped = _run(model, values, t_end, seed, r, scheduler, stop_vertex=origin)
        taus[i] = math.inf if stopped is None else stopped
    return taus, start_good


def persistence(model: ModelSpec, t_grid: Sequence[float], n_samples: int, seed: int,
                origin: Optional[int] = None, scheduler: str = DEFAULT_SCHEDULER,
                workers: Optional[int] = None) -> PersistenceCurve:
    """
    蒙特卡罗估计持续性函数

    每个副本从 μ 抽取初始构型，模拟到原点第一次改变状态或到 t_grid 的最大值为止。
    同一个样本集给出所有 t 的估计，因此 F̂ 对 t 单调不增且 F̂(0) = 1。

    Args:
        model: 模型规格
        t_grid: 非负时间网格
        n_samples: 副本数
        seed: 随机种子
        origin: 原点，默认 model.origin
        scheduler: 时钟后端
        workers: 工作进程数

    Returns:
        PersistenceCurve: 估计值与二项标准误差
    """
    t = np.asarray(sorted(float(v) for v in t_grid))
    if t.size == 0 or t[0] < 0:
        raise PreconditionError("persistence", "时间网格必须非空且非负")
    if n_samples < 1:
        raise PreconditionError("persistence", "n_samples 必须为正")
    origin = model.origin if origin is None else origin
    workers = get_worker_count(workers)

    tasks = [(model, origin, float(t[-1]), seed, chunk, scheduler)
             for chunk in chunked(list(range(n_samples)), max(1, workers * 4))]
    parts = parallel_map(_persistence_chunk, tasks, workers)
    taus = np.concatenate([p[0] for p in parts])
    start_good = np.concatenate([p[1] for p in parts])

    alive = taus[None, :] > t[:, None]
    F = alive.mean(axis=1)
    F0 = (alive & start_good[None, :]).mean(axis=1)
    F1 = (alive & ~start_good[None, :]).mean(axis=1)
    stderr = np.sqrt(F * (1.0 - F) / n_samples)
    logger.info(f"{model.name}: 持续性估计完成, {n_samples} 个样本, "
                f"{int(np.isinf(taus).sum())} 个到终止时刻仍未翻转")
    return PersistenceCurve(t, F, F0, F1, stderr, n_samples, False, model.name, model.measure.q,
                            {"persistence_times": taus})


# ----------------------------------------------------------------------
# 击中时间

@dataclass
class HittingTimeSample:
    """
    击中时间样本

    被截断的样本按 t_cap 计入均值，因此 mean 是真实期望的下界。
    全部被截断时 reliable 为 False。
    """
    times: np.ndarray
    censored: np.ndarray
    t_cap: float

    @property
    def n_samples(self) -> int:
        return len(self.times)

    @property
    def mean(self) -> float:
        return float(self.times.mean())

    @property
    def stderr(self) -> float:
        if len(self.times) < 2:
            return float("nan")
        return float(self.times.std(ddof=1) / math.sqrt(len(self.times)))

    @property
    def censored_fraction(self) -> float:
        return float(self.censored.mean())

    @property
    def reliable(self) -> bool:
        return not bool(self.censored.all())

    def to_dict(self) -> Dict[str, float]:
        return {"mean": self.mean, "stderr": self.stderr, "n_samples": self.n_samples,
                "censored_fraction": self.censored_fraction, "t_cap": self.t_cap,
                "reliable": self.reliable}


def _hitting_chunk(task) -> Tuple[np.ndarray, np.ndarray]:
    model, start, target, t_cap, seed, replicas, scheduler = task
    times = np.empty(len(replicas))
    censored = np.zeros(len(replicas), dtype=bool)
    for i, r in enumerate(replicas):
        if start is None:
            values = list(sample_equilibrium(model.measure, model.n_vertices, seed, r).values())
        else:
            values = list(start.values())
        stopped = _run(model, values, t_cap, seed, r, scheduler, target=target)
        if stopped is None:
            times[i] = t_cap
            censored[i] = True
        else:
            times[i] = stopped
    return times, censored


def hitting_time(model: ModelSpec, start: Union[SpinConfig, str], target: Target,
                 n_samples: int, seed: int, t_cap: Optional[float] = None,
                 scheduler: str = DEFAULT_SCHEDULER, workers: Optional[int] = None) -> HittingTimeSample:
    """
    估计第一次进入目标集合 A 的时刻 T_A

    Args:
        model: 模型规格
        start: 初始构型，或 "equilibrium" 表示从 μ 抽取
        target: 目标集合 (VertexState / ConstraintHolds / SpinConfig 上的谓词)
        n_samples: 样本数
        seed: 随机种子
        t_cap: 截断时刻，默认 10^4 / (q·|V|)

    Returns:
        HittingTimeSample: 起点已在 A 中时击中时间为 0
    """
    if n_samples < 1:
        raise PreconditionError("hitting_time", "n_samples 必须为正")
    if t_cap is None:
        t_cap = 1e4 / (model.measure.q * model.n_vertices)
    if isinstance(start, str):
        if start != "equilibrium":
            raise PreconditionError("hitting_time", "start 只能是构型或 'equilibrium'")
        start = None
    elif start.n != model.n_vertices:
        raise PreconditionError("hitting_time", "初始构型长度与顶点数不一致")
    target = as_target(target, model)
    workers = get_worker_count(workers)

    tasks = [(model, start, target, float(t_cap), seed, chunk, scheduler)
             for chunk in chunked(list(range(n_samples)), max(1, workers * 4))]
    if isinstance(target, ConfigPredicate):
        # 任意函数不一定可以序列化，只在当前进程运行
        parts = [_hitting_chunk(task) for task in tasks]
    else:
        parts = parallel_map(_hitting_chunk, tasks, workers)
    sample = HittingTimeSample(np.concatenate([p[0] for p in parts]),
                               np.concatenate([p[1] for p in parts]), float(t_cap))
    if not sample.reliable:
        logger.warning(f"{model.name}: 全部 {n_samples} 个击中时间样本都在 t_cap={t_cap:g} 处被截断")
    elif sample.censored_fraction > 0:
        logger.info(f"{model.name}: {sample.censored_fraction:.1%} 的样本被截断")
    return sample
