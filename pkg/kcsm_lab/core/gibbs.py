#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Gibbs Measures

有限程相互作用、带边界条件的有限体积 Gibbs 测度，
以及以单点条件 Gibbs 测度为热浴的相互作用约束生成元。

位点一律用格点坐标元组表示；体积 Λ 的第 i 个位点对应构型的第 i 个顶点。
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.special import logsumexp

from .exceptions import CollarError, ModelSpecError, PreconditionError, UnsupportedModelError
from .models import ModelSpec, SiteMeasure, SpinConfig
from .spectra import (
    MAX_VERTICES,
    Generator,
    SpectralReport,
    StateSpace,
    check_size,
    heat_bath_generator,
    spectral_gap,
)
from .topology import Coord, Graph, Rectangle
from ..utils.io import read_interaction_table, write_interaction_table
from ..utils.logger import get_logger
from ..utils.streams import StreamTag, stream

logger = get_logger("gibbs")

Volume = Union[Rectangle, Graph, Sequence[Coord]]
Boundary = Mapping[Coord, int]


def _l1(a: Coord, b: Coord) -> int:
    return sum(abs(u - v) for u, v in zip(a, b))


def _diameter(sites: Sequence[Coord]) -> int:
    return max((_l1(a, b) for a, b in itertools.combinations(sites, 2)), default=0)


def volume_sites(volume: Volume) -> Tuple[Coord, ...]:
    """体积的有序位点列表"""
    if isinstance(volume, Rectangle):
        return tuple(volume.coords())
    if isinstance(volume, Graph):
        if not volume.has_embedding:
            raise UnsupportedModelError("gibbs", "Gibbs 测度需要格点嵌入的图")
        return volume.coords
    return tuple(tuple(int(v) for v in c) for c in volume)


# ----------------------------------------------------------------------
# 相互作用

@dataclass(frozen=True)
class Interaction:
    """
    有限程相互作用 Φ = (Φ_A)

    Φ_A 存成 A 上构型的查找表，A 中位点按坐标升序，表按字典序排列
    (第一个位点为最高位)。Φ_A = 0 的集合不存储。

    Attributes:
        potentials: 位点元组 → 表
        range: 作用范围 r，所有 A 满足 diam(A) < r
        norm_bound: 范数上界 M
        n_states: 单点状态数
    """
    potentials: Mapping[Tuple[Coord, ...], Tuple[float, ...]]
    range: int
    norm_bound: float
    n_states: int = 2

    def __post_init__(self):
        cleaned: Dict[Tuple[Coord, ...], Tuple[float, ...]] = {}
        for sites, table in self.potentials.items():
            key = tuple(sorted(tuple(int(v) for v in s) for s in sites))
            values = tuple(float(v) for v in table)
            if len(set(key)) != len(key) or not key:
                raise ModelSpecError("相互作用的支撑集必须是非空且无重复的位点集合", details=str(sites))
            if len(values) != self.n_states ** len(key):
                raise ModelSpecError("相互作用表的长度必须是 |S|^|A|",
                                     details=f"A={key}, len={len(values)}")
            if _diameter(key) >= self.range:
                raise ModelSpecError("支撑集直径必须小于作用范围",
                                     details=f"A={key}, diam={_diameter(key)}, r={self.range}")
            if any(v != 0.0 for v in values):
                cleaned[key] = values
        object.__setattr__(self, "potentials", dict(sorted(cleaned.items())))
        if self.norm > self.norm_bound + 1e-12:
            raise ModelSpecError("相互作用范数超过上界",
                                 details=f"‖Φ‖ = {self.norm:.6g} > M = {self.norm_bound:.6g}")

    @property
    def norm(self) -> float:
        """‖Φ‖ = sup_x Σ_{A∋x} max|Φ_A|"""
        load: Dict[Coord, float] = {}
        for sites, table in self.potentials.items():
            m = max(abs(v) for v in table)
            for s in sites:
                load[s] = load.get(s, 0.0) + m
        return max(load.values(), default=0.0)

    @property
    def is_zero(self) -> bool:
        return not self.potentials

    def __len__(self) -> int:
        return len(self.potentials)

    def support(self) -> FrozenSet[Coord]:
        return frozenset(s for sites in self.potentials for s in sites)

    def scaled(self, factor: float) -> "Interaction":
        """s·Φ，范数上界同比缩放"""
        return Interaction({k: tuple(factor * v for v in t) for k, t in self.potentials.items()},
                           self.range, abs(factor) * self.norm_bound, self.n_states)

    def dump(self, path: Union[str, Path]) -> Path:
        header = {"range": self.range, "norm_bound": self.norm_bound, "n_states": self.n_states}
        return write_interaction_table(path, self.potentials.items(), header)

    @classmethod
    def load(cls, path: Union[str, Path]) -> "Interaction":
        header, entries = read_interaction_table(path)
        potentials = {tuple(s if isinstance(s, tuple) else (s,) for s in sites): tuple(table)
                      for sites, table in entries}
        return cls(potentials, int(header.get("range", 2)), float(header.get("norm_bound", math.inf)),
                   int(header.get("n_states", 2)))


def empty_interaction(interaction_range: int = 2, n_states: int = 2) -> Interaction:
    return Interaction({}, interaction_range, 0.0, n_states)


def _pairs(sites: Iterable[Coord]) -> List[Tuple[Coord, Coord]]:
    region = set(sites)
    out = []
    for c in sorted(region):
        for i in range(len(c)):
            y = c[:i] + (c[i] + 1,) + c[i + 1:]
            if y in region:
                out.append((c, y))
    return out


def nearest_neighbor_pair(region: Volume, beta: float, interaction_range: int = 2,
                          norm_bound: Optional[float] = None) -> Interaction:
    """
    最近邻对势 Φ_{x,y}(σ) = β·1[σ_x = σ_y = 1]，支撑在 region 内的所有最近邻对上
    """
    sites = volume_sites(region)
    potentials = {pair: (0.0, 0.0, 0.0, float(beta)) for pair in _pairs(sites)}
    dim = len(sites[0]) if sites else 1
    bound = 2 * dim * abs(beta) if norm_bound is None else norm_bound
    return Interaction(potentials, interaction_range, bound)


def uniform_field(region: Volume, h: float, interaction_range: int = 1,
                  n_states: int = 2) -> Interaction:
    """单点外场 Φ_{x}(σ) = h·σ_x (σ_x 为状态下标)"""
    table = tuple(float(h) * s for s in range(n_states))
    potentials = {(c,): table for c in volume_sites(region)}
    return Interaction(potentials, interaction_range, abs(h) * (n_states - 1), n_states)


def random_interaction(region: Volume, interaction_range: int, norm_bound: float, seed: int,
                       max_size: int = 2, n_states: int = 2, key: int = 0) -> Interaction:
    """
    随机相互作用: region 中所有直径 < r、大小 ≤ max_size 的位点集合上取 [-1, 1] 均匀随机表，
    再整体缩放使 ‖Φ‖ 恰为 norm_bound
    """
    sites = sorted(volume_sites(region))
    rng = stream(seed, StreamTag.INTERACTION, key)
    potentials: Dict[Tuple[Coord, ...], Tuple[float, ...]] = {}
    for size in range(1, max_size + 1):
        for subset in itertools.combinations(sites, size):
            if _diameter(subset) >= interaction_range:
                continue
            potentials[subset] = tuple(rng.uniform(-1.0, 1.0, n_states ** size))
    raw = Interaction(potentials, interaction_range, math.inf, n_states)
    if raw.norm == 0:
        return empty_interaction(interaction_range, n_states)
    factor = norm_bound / raw.norm
    return Interaction({k: tuple(factor * v for v in t) for k, t in raw.potentials.items()},
                       interaction_range, norm_bound, n_states)


# ----------------------------------------------------------------------
# 边界条件

def collar(volume: Volume, width: int) -> Tuple[Coord, ...]:
    """Λ 外与 Λ 的 L1 距离在 1..width 之间的位点 (升序)"""
    sites = set(volume_sites(volume))
    if not sites:
        return ()
    dim = len(next(iter(sites)))
    offsets = [o for o in itertools.product(range(-width, width + 1), repeat=dim)
               if 0 < sum(abs(v) for v in o) <= width]
    out = set()
    for c in sites:
        for o in offsets:
            y = tuple(u + v for u, v in zip(c, o))
            if y not in sites:
                out.add(y)
    return tuple(sorted(out))


def constant_boundary(volume: Volume, width: int, state: int = 1) -> Dict[Coord, int]:
    """宽度为 width 的常值边界条件"""
    return {c: int(state) for c in collar(volume, width)}


# ----------------------------------------------------------------------
# 能量与 Gibbs 测度

def _prepare(interaction: Interaction, sites: Sequence[Coord], tau: Boundary):
    """把与 Λ 相交的每个 Φ_A 拆成 (表, [(体积下标 或 None, 权重, 边界值)])"""
    position = {c: i for i, c in enumerate(sites)}
    k = interaction.n_states
    plan = []
    missing = set()
    for key, table in interaction.potentials.items():
        if not any(s in position for s in key):
            continue
        terms = []
        for j, s in enumerate(key):
            weight = k ** (len(key) - 1 - j)
            if s in position:
                terms.append((position[s], weight, 0))
            elif s in tau:
                terms.append((None, weight, int(tau[s])))
            else:
                missing.add(s)
        plan.append((np.asarray(table), terms))
    if missing:
        raise CollarError(sorted(missing), interaction.range)
    return plan


def energy(interaction: Interaction, volume: Volume, tau: Boundary, sigma: Sequence[int]) -> float:
    """
    H_Λ^τ(σ) = Σ_{A∩Λ≠∅} Φ_A(σ·τ)

    Raises:
        CollarError: τ 缺少某个与 Λ 相交的 A 所需的位点
    """
    sites = volume_sites(volume)
    values = list(sigma.values()) if isinstance(sigma, SpinConfig) else [int(v) for v in sigma]
    if len(values) != len(sites):
        raise PreconditionError("energy", "σ 的长度必须等于体积大小")
    total = 0.0
    for table, terms in _prepare(interaction, sites, tau):
        index = sum(weight * (values[i] if i is not None else b) for i, weight, b in terms)
        total += float(table[index])
    return total


def energy_vector(interaction: Interaction, volume: Volume, tau: Boundary,
                  codes: np.ndarray) -> np.ndarray:
    """全部构型编码上的能量 (向量化)"""
    sites = volume_sites(volume)
    k = interaction.n_states
    out = np.zeros(len(codes))
    for table, terms in _prepare(interaction, sites, tau):
        index = np.zeros(len(codes), dtype=np.int64)
        for i, weight, b in terms:
            digit = ((codes // k ** i) % k) if i is not None else b
            index += weight * digit
        out += table[index]
    return out


@dataclass
class GibbsMeasure:
    """
    有限体积 Gibbs 测度 μ_Λ^{Φ,τ}

    probabilities 按构型编码 Σ σ_i k^i 排列。
    """
    sites: Tuple[Coord, ...]
    tau: Dict[Coord, int]
    probabilities: np.ndarray
    log_partition: float
    measure: SiteMeasure
    interaction: Interaction = field(repr=False)

    @property
    def size(self) -> int:
        return len(self.sites)

    @property
    def n_states(self) -> int:
        return self.measure.n_states

    def digits(self, i: int) -> np.ndarray:
        codes = np.arange(len(self.probabilities), dtype=np.int64)
        return (codes // self.n_states ** i) % self.n_states

    def _sub_codes(self, subset: Sequence[int]) -> np.ndarray:
        k = self.n_states
        sub = np.zeros(len(self.probabilities), dtype=np.int64)
        for j, i in enumerate(subset):
            sub += self.digits(i) * k ** j
        return sub

    def marginal(self, subset: Sequence[int]) -> np.ndarray:
        """σ_Δ 的边缘分布，按 Σ σ_{Δ_j} k^j 排列"""
        return np.bincount(self._sub_codes(subset), weights=self.probabilities,
                           minlength=self.n_states ** len(subset))

    def conditional(self, subset: Sequence[int], xi: Mapping[int, int]) -> np.ndarray:
        """
        给定 Λ\\V 上的取值 ξ 时 σ_V 的条件分布

        Args:
            subset: V 的体积下标
            xi: 其余每个体积下标的状态
        """
        keep = np.ones(len(self.probabilities), dtype=bool)
        for i, s in xi.items():
            keep &= self.digits(i) == s
        weights = np.where(keep, self.probabilities, 0.0)
        total = weights.sum()
        if total <= 0:
            raise PreconditionError("conditional", "条件事件的概率为零")
        return np.bincount(self._sub_codes(subset), weights=weights,
                           minlength=self.n_states ** len(subset)) / total


def gibbs_measure(interaction: Interaction, volume: Volume, tau: Boundary, measure: SiteMeasure,
                  max_vertices: int = MAX_VERTICES) -> GibbsMeasure:
    """
    μ_Λ^{Φ,τ}(σ) ∝ e^{-H_Λ^τ(σ)} Π ν(σ_x)

    Raises:
        SizeCapError: |Λ| 超过上限
        CollarError: 边界条件不够宽
    """
    sites = volume_sites(volume)
    if interaction.n_states != measure.n_states:
        raise PreconditionError("gibbs_measure", "相互作用与单点测度的状态数不一致")
    check_size(len(sites), measure.n_states, max_vertices)
    k = measure.n_states
    codes = np.arange(k ** len(sites), dtype=np.int64)
    log_nu = np.log(np.asarray(measure.probabilities))
    log_w = -energy_vector(interaction, sites, tau, codes)
    for i in range(len(sites)):
        log_w += log_nu[(codes // k ** i) % k]
    log_z = float(logsumexp(log_w))
    probs = np.exp(log_w - log_z)
    return GibbsMeasure(sites, dict(tau), probs, log_z, measure, interaction)


def dlr_residual(interaction: Interaction, volume: Volume, subset: Sequence[int], tau: Boundary,
                 measure: SiteMeasure) -> float:
    """
    DLR 相容性的最大偏差

    对 Λ\\V 上的每个 ξ，比较 μ_Λ^{Φ,τ}(· | σ_{Λ\\V} = ξ) 与 μ_V^{Φ, τ·ξ}。
    """
    sites = volume_sites(volume)
    subset = list(subset)
    rest = [i for i in range(len(sites)) if i not in subset]
    full = gibbs_measure(interaction, sites, tau, measure)
    sub_sites = [sites[i] for i in subset]
    worst = 0.0
    for xi_values in itertools.product(range(measure.n_states), repeat=len(rest)):
        xi = dict(zip(rest, xi_values))
        glued = dict(tau)
        glued.update({sites[i]: s for i, s in xi.items()})
        expected = gibbs_measure(interaction, sub_sites, glued, measure).probabilities
        worst = max(worst, float(np.abs(full.conditional(subset, xi) - expected).max()))
    return worst


# ----------------------------------------------------------------------
# 相互作用生成元

def default_boundary_state(measure: SiteMeasure) -> int:
    """第一个坏状态的下标 (0-1 模型即占据态 1)"""
    for i, good in enumerate(measure.good_mask):
        if not good:
            return i
    return 0


def build_interacting_generator(model: ModelSpec, interaction: Interaction,
                                tau: Optional[Boundary] = None,
                                max_vertices: int = MAX_VERTICES) -> Generator:
    """
    相互作用约束生成元

    速率 L(η → η^{x,s}) = c_x(η)·μ^Φ(s | η 在 x 以外的取值, τ)，对 Gibbs 测度可逆。
    τ 缺省时取宽度为 r 的常值坏状态边界。
    """
    sites = volume_sites(model.graph)
    if tau is None:
        tau = constant_boundary(sites, interaction.range, default_boundary_state(model.measure))
    space = StateSpace.for_model(model, max_vertices)
    mu = gibbs_measure(interaction, sites, tau, model.measure, max_vertices).probabilities
    k = space.n_states

    def conditional(x: int, src: np.ndarray, s: int) -> np.ndarray:
        stride = k ** x
        base = src - ((src // stride) % k) * stride
        denom = np.zeros(src.size)
        for t in range(k):
            denom += mu[base + t * stride]
        return mu[base + s * stride] / denom

    gen = heat_bath_generator(model, space, mu, conditional, label=f"{model.name}+Φ")
    logger.debug(f"{model.name}: 相互作用生成元, ‖Φ‖ = {interaction.norm:.4g}, {gen.nnz} 个非零元")
    return gen


def interacting_gap(model: ModelSpec, interaction: Interaction, tau: Optional[Boundary] = None,
                    **kwargs: Any) -> SpectralReport:
    max_vertices = kwargs.pop("max_vertices", MAX_VERTICES)
    return spectral_gap(build_interacting_generator(model, interaction, tau, max_vertices), **kwargs)


# ----------------------------------------------------------------------
# 强混合

@dataclass
class StrongMixingResult:
    """
    强混合诊断

    Attributes:
        value: max_{σ_Δ} |μ^{τ'}(σ_Δ)/μ^{τ}(σ_Δ) − 1|
        disagreement: τ 与 τ' 不同的位点
        coupled: Λ 中与不同位点距离不超过 r 的位点 D_r(τ, τ')
        distance: d(Δ, D_r)，D_r 为空时为 inf
    """
    value: float
    disagreement: Tuple[Coord, ...]
    coupled: Tuple[Coord, ...]
    distance: float


def strong_mixing_ratio(interaction: Interaction, volume: Volume, delta: Sequence[int],
                        tau: Boundary, tau_prime: Boundary, measure: SiteMeasure) -> StrongMixingResult:
    """比较两个边界条件下 σ_Δ 的精确边缘分布"""
    sites = volume_sites(volume)
    keys = set(tau) | set(tau_prime)
    disagreement = tuple(sorted(c for c in keys if tau.get(c) != tau_prime.get(c)))
    coupled = tuple(c for c in sites
                    if any(_l1(c, d) <= interaction.range for d in disagreement))
    distance = min((_l1(sites[i], c) for i in delta for c in coupled), default=math.inf)

    first = gibbs_measure(interaction, sites, tau, measure).marginal(delta)
    second = gibbs_measure(interaction, sites, tau_prime, measure).marginal(delta)
    value = float(np.abs(second / first - 1.0).max())
    return StrongMixingResult(value, disagreement, coupled, float(distance))
