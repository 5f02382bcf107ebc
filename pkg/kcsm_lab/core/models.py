#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
KCSM Lab Data Models

定义模型规格的数据结构：单点测度、影响集族、边界设置、自旋构型，
以及约束函数 c_x 的求值 (逐点与向量化两种形式) 和约束的支配关系。
"""

from __future__ import annotations

import bisect
import itertools
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import cached_property
from typing import Any, Callable, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .exceptions import ModelSpecError, PreconditionError
from .topology import Coord, Graph
from ..utils.streams import StreamTag, stream

# 图内顶点用 int，图外的虚拟格点用坐标元组
Site = Union[int, Coord]


class BoundaryMode(Enum):
    """边界设置"""
    NONE = "none"            # 没有好边界格点
    GOOD_SET = "good-set"    # 显式给出好边界集合 M ⊆ B
    MAXIMAL = "maximal"      # M = B
    MINIMAL = "minimal"      # 目录模型各自记录的最小边界


def _is_internal(site: Site) -> bool:
    return isinstance(site, (int, np.integer))


# ----------------------------------------------------------------------
# 单点测度

@dataclass(frozen=True)
class SiteMeasure:
    """
    单点概率测度 ν 与好集合 G ⊆ S

    构型中每个顶点存放状态下标 0..|S|-1，states 给出对应的状态标签。

    Attributes:
        states: 状态标签
        probabilities: 每个状态的概率 (全部为正，和为 1)
        good: 好状态的标签集合
    """
    states: Tuple[int, ...]
    probabilities: Tuple[float, ...]
    good: FrozenSet[int]

    def __post_init__(self):
        states = tuple(int(s) for s in self.states)
        probs = tuple(float(p) for p in self.probabilities)
        good = frozenset(int(s) for s in self.good)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "probabilities", probs)
        object.__setattr__(self, "good", good)

        if len(states) < 2:
            raise ModelSpecError("状态空间 S 至少需要两个状态")
        if len(set(states)) != len(states):
            raise ModelSpecError("状态标签重复", details=str(states))
        if len(probs) != len(states):
            raise ModelSpecError("概率个数与状态个数不一致")
        if any(not (p > 0.0) for p in probs):
            raise ModelSpecError("每个状态的概率必须为正", details=str(probs))
        if abs(sum(probs) - 1.0) > 1e-9:
            raise ModelSpecError("概率之和必须为 1", details=f"sum = {sum(probs)}")
        if not good or not good <= set(states):
            raise ModelSpecError("好集合 G 必须是 S 的非空子集", details=str(sorted(good)))

    @classmethod
    def bernoulli(cls, q: float) -> "SiteMeasure":
        """
        0-1 自旋: ν(0) = q (空位，好状态)，ν(1) = p = 1 - q

        Raises:
            ModelSpecError: q 不在 (0, 1) 内
        """
        q = float(q)
        if not 0.0 < q < 1.0:
            raise ModelSpecError("空位密度 q 必须在 (0, 1) 内", details=f"q = {q}")
        return cls((0, 1), (q, 1.0 - q), frozenset({0}))

    @property
    def n_states(self) -> int:
        return len(self.states)

    @cached_property
    def good_mask(self) -> Tuple[bool, ...]:
        """按状态下标的好状态标记"""
        return tuple(s in self.good for s in self.states)

    @property
    def q(self) -> float:
        """ν(G)"""
        return sum(p for p, g in zip(self.probabilities, self.good_mask) if g)

    @property
    def p(self) -> float:
        return 1.0 - self.q

    @property
    def is_binary(self) -> bool:
        return self.states == (0, 1) and self.good == frozenset({0})

    @cached_property
    def cumulative(self) -> Tuple[float, ...]:
        return tuple(itertools.accumulate(self.probabilities))

    def state_from_uniform(self, u: float) -> int:
        """由 [0,1) 均匀随机数按逆分布函数抽取状态下标"""
        i = bisect.bisect_right(self.cumulative, u)
        return min(i, self.n_states - 1)

    def to_dict(self) -> Dict[str, Any]:
        return {"states": list(self.states), "probabilities": list(self.probabilities),
                "good": sorted(self.good)}


# ----------------------------------------------------------------------
# 自旋构型

@dataclass(frozen=True)
class SpinConfig:
    """
    自旋构型

    状态下标按混合基数打包成一个整数 code = Σ s_x k^x；
    k = 2 时即每个顶点一位 (第 x 位为 1 表示占据)。
    """
    n: int
    code: int
    n_states: int = 2

    def __post_init__(self):
        if self.n_states == 2:
            invalid = self.code < 0 or self.code.bit_length() > self.n
        else:
            invalid = self.code < 0 or self.code >= self.n_states ** self.n
        if self.n < 0 or invalid:
            raise ValueError(f"非法构型编码 code={self.code} (n={self.n}, k={self.n_states})")

    @classmethod
    def from_values(cls, values: Sequence[int], n_states: int = 2) -> "SpinConfig":
        arr = np.asarray(values, dtype=np.int64).ravel()
        if arr.size and (arr.min() < 0 or arr.max() >= n_states):
            raise ValueError(f"状态下标超出范围 [0, {n_states})")
        if n_states == 2:
            packed = np.packbits(arr.astype(np.uint8), bitorder="little")
            return cls(int(arr.size), int.from_bytes(packed.tobytes(), "little"), 2)
        code = 0
        for v in arr[::-1]:
            code = code * n_states + int(v)
        return cls(int(arr.size), code, n_states)

    @classmethod
    def zeros(cls, n: int, n_states: int = 2) -> "SpinConfig":
        return cls(n, 0, n_states)

    @classmethod
    def ones(cls, n: int, n_states: int = 2) -> "SpinConfig":
        if n_states == 2:
            return cls(n, (1 << n) - 1, 2)
        return cls.from_values([1] * n, n_states)

    def values(self) -> Tuple[int, ...]:
        if self.n_states == 2:
            if self.n == 0:
                return ()
            raw = np.frombuffer(self.code.to_bytes((self.n + 7) // 8, "little"), dtype=np.uint8)
            return tuple(int(v) for v in np.unpackbits(raw, bitorder="little")[: self.n])
        out = []
        code = self.code
        for _ in range(self.n):
            code, r = divmod(code, self.n_states)
            out.append(r)
        return tuple(out)

    def to_array(self) -> np.ndarray:
        return np.asarray(self.values(), dtype=np.int64)

    def __len__(self) -> int:
        return self.n

    def __getitem__(self, x: int) -> int:
        if not 0 <= x < self.n:
            raise IndexError(x)
        if self.n_states == 2:
            return (self.code >> x) & 1
        return (self.code // self.n_states ** x) % self.n_states

    def with_value(self, x: int, s: int) -> "SpinConfig":
        old = self[x]
        return SpinConfig(self.n, self.code + (s - old) * self.n_states ** x, self.n_states)

    def good_flags(self, measure: SiteMeasure) -> List[bool]:
        mask = measure.good_mask
        return [mask[v] for v in self.values()]

    def is_below(self, other: "SpinConfig", measure: Optional[SiteMeasure] = None) -> bool:
        """
        偏序 η ≤ η': η_x 为好状态的每个 x 上 η'_x 也是好状态

        measure 为 None 时好状态为 {0}。二值情形下即 zeros(η) ⊆ zeros(η')。
        """
        if self.n != other.n or self.n_states != other.n_states:
            raise ValueError("构型的顶点数或状态数不同")
        if measure is None:
            good = tuple(s == 0 for s in range(self.n_states))
        else:
            if measure.n_states != self.n_states:
                raise ValueError("单点测度的状态数与构型不符")
            good = measure.good_mask
        return all(good[b] for a, b in zip(self.values(), other.values()) if good[a])

    def __str__(self) -> str:
        return "".join(str(v) for v in self.values())


# ----------------------------------------------------------------------
# 影响集族

@dataclass(frozen=True)
class InfluenceClass:
    """
    单个顶点的影响集族 C_x

    显式形式: sets 中任一集合全为好状态则约束满足。
    阈值形式 (threshold > 0): threshold_sites 中至少 threshold 个为好状态，
    等价于所有大小为 threshold 的子集构成的族。
    """
    sets: Tuple[FrozenSet[Site], ...] = ()
    threshold_sites: Tuple[Site, ...] = ()
    threshold: int = 0

    @property
    def is_threshold(self) -> bool:
        return self.threshold > 0

    def members(self) -> FrozenSet[Site]:
        if self.is_threshold:
            return frozenset(self.threshold_sites)
        return frozenset(itertools.chain.from_iterable(self.sets))

    def materialize(self) -> Tuple[FrozenSet[Site], ...]:
        """展开为显式集合族"""
        if self.is_threshold:
            return tuple(frozenset(c) for c in itertools.combinations(self.threshold_sites, self.threshold))
        return self.sets

    def mapped(self, fn: Callable[[Site], Site]) -> "InfluenceClass":
        if self.is_threshold:
            return InfluenceClass((), tuple(fn(s) for s in self.threshold_sites), self.threshold)
        return InfluenceClass(tuple(frozenset(fn(s) for s in a) for a in self.sets))


@dataclass(frozen=True)
class ConstraintFamily:
    """所有顶点的影响集族 𝓒 = (C_x)_x"""
    classes: Tuple[InfluenceClass, ...]
    label: str = ""

    def __len__(self) -> int:
        return len(self.classes)

    def boundary_sites(self) -> FrozenSet[Coord]:
        """出现在影响集中的图外格点"""
        return frozenset(s for c in self.classes for s in c.members() if not _is_internal(s))

    def normalized(self, graph: Graph) -> "ConstraintFamily":
        """把落在图内的坐标换成顶点下标"""
        def fix(site: Site) -> Site:
            if _is_internal(site):
                return int(site)
            site = tuple(int(v) for v in site)
            idx = graph.index_of(site) if graph.has_embedding else None
            return site if idx is None else idx
        return ConstraintFamily(tuple(c.mapped(fix) for c in self.classes), self.label)

    def range(self, graph: Graph) -> int:
        """作用范围 r = max_x max_{A∈C_x} max_{y∈A} d(x, y)"""
        r = 0
        for x, ic in enumerate(self.classes):
            members = ic.members()
            if not members:
                continue
            internal = [s for s in members if _is_internal(s)]
            if internal:
                dist = graph.distances_from(x)
                r = max(r, int(max(dist[y] for y in internal)))
            for s in members:
                if not _is_internal(s):
                    r = max(r, graph.lattice_distance(graph.coords[x], s))
        return r


# ----------------------------------------------------------------------
# 编译后的约束

class GoodTable:
    """
    对全部构型编码按需计算 "顶点 y 处于好状态" 的布尔列
    """

    def __init__(self, codes: np.ndarray, measure: SiteMeasure):
        self.codes = codes
        self.k = measure.n_states
        self._good = np.asarray(measure.good_mask, dtype=bool)
        self._cache: Dict[int, np.ndarray] = {}

    def digits(self, y: int) -> np.ndarray:
        if self.k == 2:
            return (self.codes >> y) & 1
        return (self.codes // (self.k ** y)) % self.k

    def __getitem__(self, y: int) -> np.ndarray:
        col = self._cache.get(y)
        if col is None:
            col = self._good[self.digits(y)]
            self._cache[y] = col
        return col


@dataclass(frozen=True)
class CompiledConstraints:
    """
    对给定好边界 M 预先化简的约束

    每个影响集的图外部分已按 M 判定：不在 M 中的虚拟格点使该集合永远不满足，
    只剩图内部分。free[x] 表示 c_x 恒为 1。
    """
    n: int
    free: Tuple[bool, ...]
    sets: Tuple[Tuple[Tuple[int, ...], ...], ...]
    thresholds: Tuple[Optional[Tuple[Tuple[int, ...], int]], ...]
    dependents: Tuple[Tuple[int, ...], ...]

    @classmethod
    def build(cls, family: ConstraintFamily, good_boundary: FrozenSet[Coord],
              unconstrained: FrozenSet[int]) -> "CompiledConstraints":
        n = len(family)
        free: List[bool] = [False] * n
        sets: List[Tuple[Tuple[int, ...], ...]] = [()] * n
        thresholds: List[Optional[Tuple[Tuple[int, ...], int]]] = [None] * n

        for x, ic in enumerate(family.classes):
            if x in unconstrained:
                free[x] = True
                continue
            if ic.is_threshold:
                internal = tuple(sorted(s for s in ic.threshold_sites if _is_internal(s)))
                helped = sum(1 for s in ic.threshold_sites if not _is_internal(s) and s in good_boundary)
                need = ic.threshold - helped
                if need <= 0:
                    free[x] = True
                elif need <= len(internal):
                    thresholds[x] = (internal, need)
                continue
            parts = []
            for a in ic.sets:
                external = [s for s in a if not _is_internal(s)]
                if any(s not in good_boundary for s in external):
                    continue
                internal = tuple(sorted(s for s in a if _is_internal(s)))
                if not internal:
                    free[x] = True
                    break
                if internal not in parts:
                    parts.append(internal)
            if not free[x]:
                sets[x] = tuple(parts)

        deps: List[set] = [set() for _ in range(n)]
        for x in range(n):
            if free[x]:
                continue
            members = thresholds[x][0] if thresholds[x] else itertools.chain.from_iterable(sets[x])
            for y in members:
                deps[y].add(x)

        return cls(n, tuple(free), tuple(sets), tuple(thresholds),
                   tuple(tuple(sorted(d)) for d in deps))

    def evaluate(self, x: int, good: Sequence[bool]) -> bool:
        """c_x 在 good 标记下的取值"""
        if self.free[x]:
            return True
        th = self.thresholds[x]
        if th is not None:
            nbrs, need = th
            count = 0
            for y in nbrs:
                if good[y]:
                    count += 1
                    if count >= need:
                        return True
            return False
        for a in self.sets[x]:
            for y in a:
                if not good[y]:
                    break
            else:
                return True
        return False

    def evaluate_vector(self, x: int, table: GoodTable) -> np.ndarray:
        """c_x 在全部构型上的布尔向量"""
        size = len(table.codes)
        if self.free[x]:
            return np.ones(size, dtype=bool)
        th = self.thresholds[x]
        if th is not None:
            nbrs, need = th
            count = np.zeros(size, dtype=np.int16)
            for y in nbrs:
                count += table[y]
            return count >= need
        result = np.zeros(size, dtype=bool)
        for a in self.sets[x]:
            term = table[a[0]].copy()
            for y in a[1:]:
                term &= table[y]
            result |= term
        return result


# ----------------------------------------------------------------------
# 模型规格

@dataclass(frozen=True)
class ModelSpec:
    """
    动力学约束自旋模型的完整规格

    Attributes:
        name: 模型名称
        graph: 有限连通图 (格点或一般图)
        constraints: 影响集族
        measure: 单点测度
        boundary: 边界模式
        good_boundary: 好边界格点集合 M ⊆ B
        unconstrained: 无约束顶点
        origin: 持续性等观测使用的原点
        params: 构造参数 (键值对)
    """
    name: str
    graph: Graph
    constraints: ConstraintFamily
    measure: SiteMeasure
    boundary: BoundaryMode = BoundaryMode.NONE
    good_boundary: FrozenSet[Coord] = frozenset()
    unconstrained: FrozenSet[int] = frozenset()
    origin: int = 0
    params: Tuple[Tuple[str, Any], ...] = field(default=(), compare=False)

    def __post_init__(self):
        n = self.graph.n_vertices
        family = self.constraints.normalized(self.graph)
        object.__setattr__(self, "constraints", family)
        if len(family) != n:
            raise ModelSpecError("影响集族的长度与顶点数不一致", self.name,
                                 details=f"{len(family)} != {n}")

        for x, ic in enumerate(family.classes):
            members = ic.members()
            if x in members:
                raise ModelSpecError(f"顶点 {x} 属于自身的影响集 (违反 Hp1)", self.name)
            for s in members:
                if _is_internal(s):
                    if not 0 <= s < n:
                        raise ModelSpecError(f"影响集中的顶点 {s} 越界", self.name)
                elif not self.graph.has_embedding or len(s) != self.graph.dim:
                    raise ModelSpecError(f"虚拟格点 {s} 需要维数匹配的格点嵌入", self.name)
            if ic.is_threshold and ic.threshold > len(ic.threshold_sites):
                raise ModelSpecError(f"顶点 {x} 的阈值大于邻居数", self.name)

        bset = family.boundary_sites()
        good = frozenset(tuple(int(v) for v in s) for s in self.good_boundary)
        mode = BoundaryMode(self.boundary)
        if mode is BoundaryMode.MAXIMAL:
            good = bset
        elif mode is BoundaryMode.NONE and good:
            raise ModelSpecError("边界模式为 none 时不能给出好边界格点", self.name)
        if not good <= bset:
            extra = sorted(good - bset)[:5]
            raise ModelSpecError("好边界集合 M 必须是边界集合 B 的子集", self.name,
                                 details=f"多余格点: {extra}")
        object.__setattr__(self, "boundary", mode)
        object.__setattr__(self, "good_boundary", good)

        unconstrained = frozenset(int(x) for x in self.unconstrained)
        if any(not 0 <= x < n for x in unconstrained):
            raise ModelSpecError("无约束顶点越界", self.name)
        object.__setattr__(self, "unconstrained", unconstrained)
        if not 0 <= self.origin < n:
            raise ModelSpecError(f"原点 {self.origin} 越界", self.name)
        object.__setattr__(self, "params", tuple(self.params))

    @property
    def n_vertices(self) -> int:
        return self.graph.n_vertices

    @cached_property
    def boundary_set(self) -> FrozenSet[Coord]:
        """边界集合 B"""
        return self.constraints.boundary_sites()

    @cached_property
    def compiled(self) -> CompiledConstraints:
        return CompiledConstraints.build(self.constraints, self.good_boundary, self.unconstrained)

    @cached_property
    def range(self) -> int:
        return self.constraints.range(self.graph)

    def param(self, key: str, default: Any = None) -> Any:
        return dict(self.params).get(key, default)

    def with_measure(self, measure: SiteMeasure) -> "ModelSpec":
        return replace(self, measure=measure)

    def with_q(self, q: float) -> "ModelSpec":
        """换成空位密度为 q 的 0-1 测度"""
        params = tuple((k, v) for k, v in self.params if k != "q") + (("q", float(q)),)
        return replace(self, measure=SiteMeasure.bernoulli(q), params=params)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "graph": self.graph.name,
            "n_vertices": self.n_vertices,
            "measure": self.measure.to_dict(),
            "boundary": self.boundary.value,
            "good_boundary": [list(s) for s in sorted(self.good_boundary)],
            "unconstrained": sorted(self.unconstrained),
            "origin": self.origin,
            "params": {k: v for k, v in self.params if _jsonable(v)},
        }


def _jsonable(value: Any) -> bool:
    return isinstance(value, (int, float, str, bool, list, tuple, type(None)))


def constraint(model: ModelSpec, config: SpinConfig, x: int) -> int:
    """
    约束函数 c_x(ω) ∈ {0, 1}

    Args:
        model: 模型规格
        config: 构型 (顶点数必须与模型一致)
        x: 顶点

    Returns:
        int: 1 当且仅当 C_x 中存在一个集合，其图内格点都处于好状态且图外格点都在 M 中
    """
    if config.n != model.n_vertices:
        raise ValueError(f"构型长度 {config.n} 与顶点数 {model.n_vertices} 不一致")
    return int(model.compiled.evaluate(x, config.good_flags(model.measure)))


def free_vertices(model: ModelSpec) -> Tuple[int, ...]:
    """约束恒为 1 的顶点"""
    return tuple(x for x, f in enumerate(model.compiled.free) if f)


def custom_model(graph: Graph, classes: Sequence[Iterable[Iterable[Site]]],
                 q: Optional[float] = None, measure: Optional[SiteMeasure] = None,
                 boundary: Union[str, BoundaryMode] = BoundaryMode.NONE,
                 good_boundary: Iterable[Coord] = (), unconstrained: Iterable[int] = (),
                 origin: int = 0, name: str = "custom") -> ModelSpec:
    """由显式影响集族构造模型"""
    if measure is None:
        measure = SiteMeasure.bernoulli(0.5 if q is None else q)
    family = ConstraintFamily(tuple(
        InfluenceClass(tuple(frozenset(a) for a in sets)) for sets in classes), name)
    boundary = BoundaryMode(boundary)
    if boundary is BoundaryMode.NONE and good_boundary:
        boundary = BoundaryMode.GOOD_SET
    return ModelSpec(name, graph, family, measure, boundary, frozenset(map(tuple, good_boundary)),
                     frozenset(unconstrained), origin, (("q", measure.q),))


# ----------------------------------------------------------------------
# 目标集合 (状态谓词)

@dataclass(frozen=True)
class VertexState:
    """事件 {η : η_x ∈ states} (states 为状态下标)"""
    vertex: int
    states: FrozenSet[int]

    @property
    def watch(self) -> Optional[FrozenSet[int]]:
        return frozenset({self.vertex})

    def holds(self, values: Sequence[int]) -> bool:
        return values[self.vertex] in self.states

    def __call__(self, config: SpinConfig) -> bool:
        return config[self.vertex] in self.states

    def mask(self, table: GoodTable) -> np.ndarray:
        digits = table.digits(self.vertex)
        return np.isin(digits, sorted(self.states))


def vacant(x: int) -> VertexState:
    """顶点 x 为空位 (状态 0)"""
    return VertexState(x, frozenset({0}))


@dataclass(frozen=True)
class ConstraintHolds:
    """事件 {η : c_x(η) = 1}，即 x 可以翻转"""
    model: ModelSpec
    vertex: int

    @property
    def watch(self) -> Optional[FrozenSet[int]]:
        compiled = self.model.compiled
        th = compiled.thresholds[self.vertex]
        members = th[0] if th else itertools.chain.from_iterable(compiled.sets[self.vertex])
        return frozenset(members)

    def holds(self, values: Sequence[int]) -> bool:
        mask = self.model.measure.good_mask
        return self.model.compiled.evaluate(self.vertex, [mask[v] for v in values])

    def __call__(self, config: SpinConfig) -> bool:
        return bool(constraint(self.model, config, self.vertex))

    def mask(self, table: GoodTable) -> np.ndarray:
        return self.model.compiled.evaluate_vector(self.vertex, table)


# ----------------------------------------------------------------------
# 支配关系

@dataclass
class DominationReport:
    """
    支配检查结果

    holds 为真表示 c_b ≤ c_a 逐点成立 (a 支配 b)。
    """
    holds: bool
    exhaustive: bool
    checked: int
    counterexample: Optional[Tuple[SpinConfig, int]] = None

    def __bool__(self) -> bool:
        return self.holds


def dominates(a: ModelSpec, b: ModelSpec, exhaustive_limit: int = 20,
              n_samples: int = 20000, seed: int = 0) -> DominationReport:
    """
    检查 a 是否支配 b，即 c_b(ω) ≤ c_a(ω) 对所有 ω 与 x 成立

    |V| ≤ exhaustive_limit 时枚举全部构型，否则随机抽取构型 (并总是包含全好与全坏构型)。

    Raises:
        PreconditionError: 两个模型的图或单点测度不同
    """
    if a.graph != b.graph:
        raise PreconditionError("dominates", "两个模型必须定义在同一个图上")
    if a.measure != b.measure:
        raise PreconditionError("dominates", "两个模型必须使用同一个单点测度")

    n = a.n_vertices
    k = a.measure.n_states
    if n <= exhaustive_limit:
        codes = np.arange(k ** n, dtype=np.int64)
        exhaustive = True
    else:
        rng = stream(seed, StreamTag.TEST_FUNCTION, n)
        codes = None
        exhaustive = False

    if exhaustive:
        table = GoodTable(codes, a.measure)
        for x in range(n):
            ca = a.compiled.evaluate_vector(x, table)
            cb = b.compiled.evaluate_vector(x, table)
            bad = np.flatnonzero(cb & ~ca)
            if bad.size:
                return DominationReport(False, True, len(codes),
                                        (SpinConfig(n, int(codes[bad[0]]), k), x))
        return DominationReport(True, True, len(codes))

    mask = a.measure.good_mask
    samples = [np.zeros(n, dtype=np.int64), np.full(n, k - 1, dtype=np.int64)]
    samples.extend(rng.integers(0, k, size=(n_samples, n)))
    for values in samples:
        good = [mask[int(v)] for v in values]
        for x in range(n):
            if b.compiled.evaluate(x, good) and not a.compiled.evaluate(x, good):
                return DominationReport(False, False, len(samples),
                                        (SpinConfig.from_values(values, k), x))
    return DominationReport(True, False, len(samples))


def product_weights(measure: SiteMeasure, n: int, codes: np.ndarray) -> np.ndarray:
    """乘积测度 μ = ⊗ν 在给定构型编码上的权重"""
    table = GoodTable(codes, measure)
    probs = np.asarray(measure.probabilities)
    weights = np.ones(len(codes), dtype=np.float64)
    for y in range(n):
        weights *= probs[table.digits(y)]
    return weights
