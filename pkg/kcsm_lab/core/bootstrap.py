#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Bootstrap Percolation

与约束相关的确定性自举映射 T、其闭包 (最小不动点)、内部张成、
阈值 q_bp 的有限体积估计，以及二维矩形中的极端空位穿越路径。

只对 0-1 模型 (S = {0,1}, G = {0}) 有定义。
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from .catalog import catalog
from .exceptions import PreconditionError, UnsupportedModelError
from .models import CompiledConstraints, ModelSpec, SpinConfig
from .topology import Coord, Rectangle
from ..utils.helpers import chunked, get_worker_count, parallel_map
from ..utils.logger import get_logger
from ..utils.streams import StreamTag, stream

logger = get_logger("bootstrap")


def require_binary(model: ModelSpec, operation: str) -> None:
    """非 0-1 模型抛出 UnsupportedModelError"""
    if not model.measure.is_binary:
        raise UnsupportedModelError(operation, f"模型 {model.name} 的自旋空间为 {model.measure.states}")


def _from_good(good: Sequence[bool]) -> SpinConfig:
    return SpinConfig.from_values([0 if g else 1 for g in good])


def _close(compiled: CompiledConstraints, good: List[bool],
           allowed: Optional[Sequence[bool]] = None) -> int:
    """
    原地计算闭包，返回被清空的格点数

    工作队列: 只有当某个依赖格点变空时才重新检查一个格点。
    allowed 给出允许清空的格点，None 表示全部。
    """
    n = compiled.n
    evaluate = compiled.evaluate
    dependents = compiled.dependents
    queued = [False] * n
    queue = deque()
    for x in range(n):
        if not good[x] and (allowed is None or allowed[x]):
            queued[x] = True
            queue.append(x)

    emptied = 0
    while queue:
        x = queue.popleft()
        queued[x] = False
        if good[x] or not evaluate(x, good):
            continue
        good[x] = True
        emptied += 1
        for y in dependents[x]:
            if not good[y] and not queued[y] and (allowed is None or allowed[y]):
                queued[y] = True
                queue.append(y)
    return emptied


def bootstrap_step(model: ModelSpec, config: SpinConfig) -> SpinConfig:
    """
    同步自举映射 T: T(ω)_x = 0 若 ω_x = 0 或 c_x(ω) = 1，否则为 1

    Raises:
        UnsupportedModelError: 模型不是 0-1 模型
    """
    require_binary(model, "bootstrap_step")
    good = config.good_flags(model.measure)
    compiled = model.compiled
    return _from_good([g or compiled.evaluate(x, good) for x, g in enumerate(good)])


def closure(model: ModelSpec, config: SpinConfig) -> SpinConfig:
    """
    T 的最小不动点 [ω]，等于 T^k(ω) 在 k → ∞ 的极限

    使用工作队列实现，与同步迭代给出相同结果。
    """
    require_binary(model, "closure")
    good = config.good_flags(model.measure)
    _close(model.compiled, good)
    return _from_good(good)


def iterate_bootstrap(model: ModelSpec, config: SpinConfig,
                      max_steps: Optional[int] = None) -> List[SpinConfig]:
    """同步迭代 ω, T(ω), T²(ω), ... 直到不动点 (含起点)"""
    require_binary(model, "iterate_bootstrap")
    limit = model.n_vertices + 1 if max_steps is None else max_steps
    history = [config]
    for _ in range(limit):
        nxt = bootstrap_step(model, history[-1])
        if nxt == history[-1]:
            break
        history.append(nxt)
    return history


def internally_spanned(model: ModelSpec, region: Iterable[int], config: SpinConfig) -> bool:
    """
    Γ 是否被 ω 内部张成

    Γ 外的格点全部置为占据且保持不动，只允许 Γ 内的格点被清空；
    模型自身的好边界 M 与无约束顶点保持不变。
    """
    require_binary(model, "internally_spanned")
    region = set(region)
    n = model.n_vertices
    allowed = [x in region for x in range(n)]
    good = config.good_flags(model.measure)
    good = [g and a for g, a in zip(good, allowed)]
    _close(model.compiled, good, allowed)
    return all(good[x] for x in region)


def noncooperative_witness(model: ModelSpec, block: Iterable[int]) -> bool:
    """在 B 上为空、其余占据的构型能否被完全清空"""
    require_binary(model, "noncooperative_witness")
    block = set(block)
    good = [x in block for x in range(model.n_vertices)]
    _close(model.compiled, good)
    return all(good)


# ----------------------------------------------------------------------
# 阈值估计

@dataclass
class ThresholdEstimate:
    """
    有限体积阈值估计

    Attributes:
        q_hat: 最大体积上清空频率穿过 1/2 的插值点
        interval: 由二项误差传播得到的置信区间 (lo, hi)
        table: (size, q) -> (清空频率, 标准误差)
        crossed: 网格上是否真的出现了穿越
    """
    q_hat: float
    interval: Tuple[float, float]
    sizes: List[int]
    q_grid: List[float]
    samples: int
    seed: int
    family: str
    table: Dict[Tuple[int, float], Tuple[float, float]] = field(default_factory=dict)
    crossed: bool = True

    def frequencies(self, size: int) -> np.ndarray:
        return np.array([self.table[(size, q)][0] for q in self.q_grid])

    def rows(self) -> List[Dict[str, float]]:
        return [
            {"size": size, "q": q, "samples": self.samples,
             "emptied_fraction": self.table[(size, q)][0], "stderr": self.table[(size, q)][1]}
            for size in self.sizes for q in self.q_grid
        ]

    def to_dict(self) -> Dict[str, object]:
        return {"family": self.family, "q_hat": self.q_hat, "interval": list(self.interval),
                "sizes": self.sizes, "q_grid": self.q_grid, "samples": self.samples,
                "seed": self.seed, "crossed": self.crossed}


def threshold_family(name: str, **params) -> Callable[[int], ModelSpec]:
    """
    阈值扫描用的周期体积族

    一维模型 (east, fa-1f) 用长度 L 的环，其余模型用 L×L 环面。
    """
    key = name.strip().lower()
    one_dim = key in ("east", "fa-1f") and "d" not in params

    def build(size: int) -> ModelSpec:
        if one_dim:
            return catalog(key, n=size, periodic=True, **params)
        return catalog(key, shape=(size, size), periodic=True, **params)

    build.__name__ = key
    return build


def _crossing_point(qs: Sequence[float], freqs: Sequence[float]) -> Optional[float]:
    """频率曲线首次达到 1/2 的线性插值点"""
    for i, f in enumerate(freqs):
        if f >= 0.5:
            if i == 0:
                return float(qs[0])
            q0, q1 = qs[i - 1], qs[i]
            f0, f1 = freqs[i - 1], f
            if f1 == f0:
                return float(q1)
            return float(q0 + (0.5 - f0) * (q1 - q0) / (f1 - f0))
    return None


def _summarize(family: str, sizes: List[int], q_grid: List[float], samples: int, seed: int,
               emptied: Dict[int, np.ndarray]) -> ThresholdEstimate:
    table: Dict[Tuple[int, float], Tuple[float, float]] = {}
    for size in sizes:
        freq = emptied[size].mean(axis=0)
        for q, f in zip(q_grid, freq):
            table[(size, q)] = (float(f), float(np.sqrt(f * (1.0 - f) / samples)))

    largest = max(sizes)
    f = np.array([table[(largest, q)][0] for q in q_grid])
    se = np.array([table[(largest, q)][1] for q in q_grid])
    q_hat = _crossing_point(q_grid, f)
    crossed = q_hat is not None
    if q_hat is None:
        logger.warning(f"{family}: 清空频率在 q 网格上没有穿过 1/2")
        q_hat = q_grid[-1]
    lo = _crossing_point(q_grid, np.minimum(f + 2 * se, 1.0))
    hi = _crossing_point(q_grid, np.maximum(f - 2 * se, 0.0))
    lo = min(q_hat, q_grid[0] if lo is None else lo)
    hi = max(q_hat, 1.0 if hi is None else hi)
    return ThresholdEstimate(q_hat, (lo, hi), sizes, q_grid, samples, seed, family, table, crossed)


def _scan_chunk(task) -> np.ndarray:
    """一批副本在全部 q 上的清空指示 (利用单调耦合逐步加入空位)"""
    model, q_grid, seed, size, replicas = task
    compiled = model.compiled
    n = model.n_vertices
    out = np.zeros((len(replicas), len(q_grid)), dtype=bool)
    for i, r in enumerate(replicas):
        u = stream(seed, StreamTag.BOOTSTRAP, size, r).random(n)
        order = np.argsort(u, kind="stable")
        good = [False] * n
        pos = 0
        for j, q in enumerate(q_grid):
            while pos < n and u[order[pos]] < q:
                good[int(order[pos])] = True
                pos += 1
            _close(compiled, good)
            if all(good):
                out[i, j:] = True
                break
    return out


def estimate_qbp(family: Union[str, Callable[[int], ModelSpec]], sizes: Sequence[int],
                 q_grid: Sequence[float], samples: int, seed: int,
                 workers: Optional[int] = None) -> ThresholdEstimate:
    """
    估计自举渗流阈值

    对每个体积与副本抽取一组均匀随机数 U，在 q 处令 U < q 的格点为空位，
    因此不同 q 的样本是单调耦合的，清空频率对 q 单调不减。

    Args:
        family: 模型名称 (使用 threshold_family 的周期体积) 或 size -> ModelSpec 的函数
        sizes: 体积线长列表
        q_grid: 空位密度网格
        samples: 每个 (size, q) 的样本数
        seed: 随机种子
        workers: 工作进程数，None 表示读取 KCSM_LAB_WORKERS

    Returns:
        ThresholdEstimate: 频率表、q̂_bp 及其置信区间
    """
    if samples < 1:
        raise PreconditionError("estimate_qbp", "samples 必须为正")
    name = family if isinstance(family, str) else getattr(family, "__name__", "family")
    build = threshold_family(family) if isinstance(family, str) else family
    sizes = sorted(int(s) for s in sizes)
    q_grid = sorted(float(q) for q in q_grid)
    workers = get_worker_count(workers)

    emptied: Dict[int, np.ndarray] = {}
    for size in sizes:
        model = build(size)
        require_binary(model, "estimate_qbp")
        tasks = [(model, q_grid, seed, size, chunk)
                 for chunk in chunked(list(range(samples)), max(1, workers * 4))]
        emptied[size] = np.vstack(parallel_map(_scan_chunk, tasks, workers))
        logger.info(f"{name} L={size}: 完成 {samples} 个样本的扫描")

    return _summarize(name, sizes, q_grid, samples, seed, emptied)


def _oriented_cycle_free(occupied: np.ndarray, side: int) -> bool:
    """环面上占据格点沿 N/E 方向是否不存在有向环"""
    n = side * side
    idx = np.arange(n)
    x, y = idx % side, idx // side
    east = ((x + 1) % side) + side * y
    north = x + side * ((y + 1) % side)
    src, dst = [], []
    for target in (east, north):
        keep = occupied & occupied[target]
        src.append(idx[keep])
        dst.append(target[keep])
    src = np.concatenate(src)
    dst = np.concatenate(dst)
    graph = sparse.csr_matrix((np.ones(len(src)), (src, dst)), shape=(n, n))
    _, labels = csgraph.connected_components(graph, directed=True, connection="strong")
    return np.bincount(labels).max() < 2


def oriented_percolation_oracle(sizes: Sequence[int], q_grid: Sequence[float], samples: int,
                                seed: int, coupled: bool = False) -> ThresholdEstimate:
    """
    有向位点渗流对照: 环面上不存在占据的 N/E 有向环的频率

    North-East 模型在环面上的闭包为全空当且仅当不存在这样的环。
    coupled=True 时使用与 estimate_qbp 相同的随机数 (逐样本一致)，否则使用独立随机流。
    """
    tag = StreamTag.BOOTSTRAP if coupled else StreamTag.ORACLE
    sizes = sorted(int(s) for s in sizes)
    q_grid = sorted(float(q) for q in q_grid)
    emptied: Dict[int, np.ndarray] = {}
    for size in sizes:
        out = np.zeros((samples, len(q_grid)), dtype=bool)
        for r in range(samples):
            u = stream(seed, tag, size, r).random(size * size)
            for j, q in enumerate(q_grid):
                if _oriented_cycle_free(u >= q, size):
                    out[r, j:] = True
                    break
        emptied[size] = out
    return _summarize("oriented-percolation", sizes, q_grid, samples, seed, emptied)


# ----------------------------------------------------------------------
# 穿越路径

class CrossingDirection(Enum):
    """穿越方向"""
    TOP_BOTTOM = "top-bottom"   # 最右穿越
    LEFT_RIGHT = "left-right"   # 最低穿越


@dataclass(frozen=True)
class Crossing:
    """矩形中由空位组成的最近邻路径"""
    direction: CrossingDirection
    path: Tuple[int, ...]
    coords: Tuple[Coord, ...]

    @property
    def extremality(self) -> str:
        return "rightmost" if self.direction is CrossingDirection.TOP_BOTTOM else "lowermost"

    def __len__(self) -> int:
        return len(self.path)


def _ccw(d: Coord) -> Coord:
    return (-d[1], d[0])


def _cw(d: Coord) -> Coord:
    return (d[1], -d[0])


def find_crossing(config: SpinConfig, rect: Rectangle,
                  direction: CrossingDirection = CrossingDirection.TOP_BOTTOM) -> Optional[Crossing]:
    """
    寻找极端空位穿越

    上下穿越取最右者: 从顶行最右侧开始，朝南行进并优先左转 (即朝东)。
    左右穿越取最低者: 从左列最下方开始，朝东行进并优先右转 (即朝南)。
    深度优先搜索共享访问标记，每个格点至多访问一次。

    Returns:
        Crossing；不存在穿越时返回 None
    """
    if rect.dim != 2:
        raise PreconditionError("find_crossing", "只支持二维矩形")
    if config.n != rect.size:
        raise PreconditionError("find_crossing", "构型长度与矩形大小不一致",
                                f"{config.n} != {rect.size}")
    values = config.values()
    (x0, y0), (x1, y1) = rect.lower, rect.upper

    def vacant(c: Coord) -> bool:
        return rect.contains(c) and values[rect.index_of(c)] == 0

    if direction is CrossingDirection.TOP_BOTTOM:
        starts = [(x, y1) for x in range(x1, x0 - 1, -1)]
        heading = (0, -1)
        turns = lambda d: (_ccw(d), d, _cw(d))
        reached = lambda c: c[1] == y0
    else:
        starts = [(x0, y) for y in range(y0, y1 + 1)]
        heading = (1, 0)
        turns = lambda d: (_cw(d), d, _ccw(d))
        reached = lambda c: c[0] == x1

    visited = set()
    for start in starts:
        if start in visited or not vacant(start):
            continue
        visited.add(start)
        if reached(start):
            return _crossing(direction, rect, [start])
        stack = [(start, iter(turns(heading)))]
        while stack:
            node, options = stack[-1]
            for d in options:
                nxt = (node[0] + d[0], node[1] + d[1])
                if nxt in visited or not vacant(nxt):
                    continue
                visited.add(nxt)
                if reached(nxt):
                    return _crossing(direction, rect, [s[0] for s in stack] + [nxt])
                stack.append((nxt, iter(turns(d))))
                break
            else:
                stack.pop()
    return None


def _crossing(direction: CrossingDirection, rect: Rectangle, coords: List[Coord]) -> Crossing:
    return Crossing(direction, tuple(rect.index_of(c) for c in coords), tuple(coords))


def restrict_config(config: SpinConfig, rect: Rectangle, sub_rect: Rectangle) -> SpinConfig:
    """把矩形上的构型限制到子矩形"""
    if not (rect.contains(sub_rect.lower) and rect.contains(sub_rect.upper)):
        raise PreconditionError("restrict_config", "子矩形必须包含在矩形内")
    values = config.values()
    return SpinConfig.from_values([values[rect.index_of(c)] for c in sub_rect.coords()],
                                  config.n_states)
