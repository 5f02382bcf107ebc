#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Spectra

有限体积上的精确分析：生成元组装、遍历分支、谱隙、Dirichlet 特征值，
以及基于生成元的持续性、击中时间与方差衰减的精确计算。

生成元 L 在 L²(μ) 中自伴，但在平直内积下不对称，因此所有特征值计算都在
对称化矩阵 H = -D^{1/2} L D^{-1/2} (D = diag μ) 上进行。
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg, sparse
from scipy.sparse import csgraph
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigsh, expm_multiply, spsolve

from .bootstrap import require_binary
from .dynamics import PersistenceCurve
from .exceptions import PreconditionError, SizeCapError, SolverError
from .models import DominationReport, GoodTable, ModelSpec, SpinConfig, dominates, product_weights
from ..utils.helpers import available_memory_bytes
from ..utils.logger import get_logger
from ..utils.streams import StreamTag, stream

logger = get_logger("spectra")

MAX_VERTICES = 24
DENSE_LIMIT = 4096
TOLERANCE = 1e-10

# 单条非零元在 COO、CSR 与中间数组中的大致字节数
_BYTES_PER_ENTRY = 48


# ----------------------------------------------------------------------
# 状态空间与生成元

@dataclass
class StateSpace:
    """
    全部构型 Ω = S^V 的枚举

    下标即构型编码 (SpinConfig.code)，因此下标与构型的对应是平凡的双射。
    """
    model: ModelSpec
    codes: np.ndarray
    weights: np.ndarray

    @classmethod
    def for_model(cls, model: ModelSpec, max_vertices: int = MAX_VERTICES) -> "StateSpace":
        n = model.n_vertices
        k = model.measure.n_states
        check_size(n, k, max_vertices)
        codes = np.arange(k ** n, dtype=np.int64)
        return cls(model, codes, product_weights(model.measure, n, codes))

    @property
    def size(self) -> int:
        return len(self.codes)

    @property
    def n_states(self) -> int:
        return self.model.measure.n_states

    @cached_property
    def table(self) -> GoodTable:
        return GoodTable(self.codes, self.model.measure)

    def config(self, index: int) -> SpinConfig:
        return SpinConfig(self.model.n_vertices, int(self.codes[index]), self.n_states)

    def index(self, config: SpinConfig) -> int:
        if config.n != self.model.n_vertices or config.n_states != self.n_states:
            raise PreconditionError("StateSpace.index", "构型与状态空间不匹配")
        return config.code

    def mask(self, target) -> np.ndarray:
        """把目标集合 (谓词对象、SpinConfig 上的函数或布尔数组) 转成布尔掩码"""
        if isinstance(target, np.ndarray):
            if target.shape != (self.size,):
                raise PreconditionError("StateSpace.mask", "布尔数组长度必须等于状态数")
            return target.astype(bool)
        if hasattr(target, "mask"):
            return np.asarray(target.mask(self.table), dtype=bool)
        if callable(target):
            return np.fromiter((bool(target(self.config(i))) for i in range(self.size)),
                               dtype=bool, count=self.size)
        raise TypeError(f"无法识别的目标集合: {target!r}")


def check_size(n_vertices: int, n_states: int = 2, max_vertices: int = MAX_VERTICES) -> None:
    """
    检查精确分析的规模上限

    Raises:
        SizeCapError: 顶点数超过上限，或生成元的估计内存超过可用内存
    """
    cap = min(int(max_vertices), MAX_VERTICES)
    if n_vertices > cap:
        raise SizeCapError(n_vertices, cap)
    size = n_states ** n_vertices
    needed = size * (n_vertices * (n_states - 1) + 1) * _BYTES_PER_ENTRY
    available = available_memory_bytes()
    if needed > available:
        raise SizeCapError(n_vertices, cap,
                           details=f"估计需要 {needed / 2 ** 30:.1f} GiB，可用 {available / 2 ** 30:.1f} GiB")


@dataclass
class Generator:
    """
    热浴生成元

    matrix 为 CSR 稀疏矩阵，非对角元 L(η, η') 是单点更新速率，对角元为负的行和。
    mu 是可逆测度 (乘积测度或 Gibbs 测度)，和为 1。
    """
    space: StateSpace
    matrix: sparse.csr_matrix
    mu: np.ndarray
    label: str = ""

    @property
    def model(self) -> ModelSpec:
        return self.space.model

    @property
    def size(self) -> int:
        return self.space.size

    @property
    def nnz(self) -> int:
        return int(self.matrix.nnz)

    def row_sum_residual(self) -> float:
        return float(np.abs(np.asarray(self.matrix.sum(axis=1)).ravel()).max())

    def detailed_balance_residual(self) -> float:
        """max |μ(η)L(η,η') - μ(η')L(η',η)|"""
        flow = sparse.diags(self.mu) @ self.matrix
        diff = abs(flow - flow.T)
        return float(diff.max()) if diff.nnz else 0.0

    @cached_property
    def symmetrized(self) -> sparse.csr_matrix:
        """H = -D^{1/2} L D^{-1/2}，半正定"""
        root = np.sqrt(self.mu)
        h = -(sparse.diags(root) @ self.matrix @ sparse.diags(1.0 / root))
        # 消除舍入造成的微小不对称
        return ((h + h.T) * 0.5).tocsr()

    @cached_property
    def components(self) -> List[np.ndarray]:
        return ergodic_components(self)

    def restricted(self, indices: np.ndarray) -> sparse.csr_matrix:
        return self.matrix[indices][:, indices].tocsr()


def heat_bath_generator(model: ModelSpec, space: StateSpace, mu: np.ndarray,
                        conditional: Optional[Callable[[int, np.ndarray, int], np.ndarray]] = None,
                        label: str = "") -> Generator:
    """
    组装热浴生成元

    Args:
        model: 模型规格 (提供约束)
        space: 状态空间
        mu: 可逆测度
        conditional: conditional(x, targets, s) 给出把 x 更新为 s 的条件概率；
            默认使用单点测度 ν(s)

    Returns:
        Generator: L(η → η^{x,s}) = c_x(η)·P(s | η 在 x 以外的取值)
    """
    n = model.n_vertices
    k = space.n_states
    codes = space.codes
    table = space.table
    probs = model.measure.probabilities
    compiled = model.compiled

    rows: List[np.ndarray] = []
    cols: List[np.ndarray] = []
    data: List[np.ndarray] = []
    for x in range(n):
        legal = compiled.evaluate_vector(x, table)
        if not legal.any():
            continue
        digits = table.digits(x)
        stride = k ** x
        for s in range(k):
            mask = legal & (digits != s)
            src = codes[mask]
            if src.size == 0:
                continue
            dst = src + (s - digits[mask]) * stride
            if conditional is None:
                rate = np.full(src.size, probs[s])
            else:
                rate = conditional(x, src, s)
            rows.append(src)
            cols.append(dst)
            data.append(rate)

    size = space.size
    if rows:
        off = sparse.coo_matrix((np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
                                shape=(size, size)).tocsr()
    else:
        off = sparse.csr_matrix((size, size))
    diag = -np.asarray(off.sum(axis=1)).ravel()
    matrix = (off + sparse.diags(diag)).tocsr()
    matrix.eliminate_zeros()
    return Generator(space, matrix, np.asarray(mu, dtype=np.float64), label or model.name)


def build_generator(model: ModelSpec, max_vertices: int = MAX_VERTICES) -> Generator:
    """
    组装模型在 Ω = S^V 上的生成元

    Raises:
        SizeCapError: |V| 超过上限 (至多 24) 或内存不足
    """
    space = StateSpace.for_model(model, max_vertices)
    gen = heat_bath_generator(model, space, space.weights)
    logger.debug(f"{model.name}: 生成元 {gen.size} 个状态, {gen.nnz} 个非零元")
    return gen


def ergodic_components(gen: Generator) -> List[np.ndarray]:
    """
    移动图的连通分支

    细致平衡保证速率的正性是对称的，因此用无向连通分支即可。
    分支按最小下标排序，每个分支内部的下标升序。
    """
    n_comp, labels = csgraph.connected_components(gen.matrix, directed=False)
    order = np.argsort(labels, kind="stable")
    bounds = np.flatnonzero(np.diff(labels[order])) + 1
    parts = np.split(order, bounds)
    parts.sort(key=lambda c: int(c[0]))
    return parts


# ----------------------------------------------------------------------
# 谱隙

@dataclass
class SpectralReport:
    """
    谱分析结果

    Attributes:
        gap: 谱隙 (可约链为 0，单状态分支为 inf)
        zero_multiplicity: 零特征值重数
        component_sizes: 各遍历分支大小
        residual: 相对残差 ‖Hv − λv‖ / ‖H‖₁
        converged: 求解器是否收敛且残差达到容差
        method: dense / lanczos / reducible / trivial
    """
    gap: float
    zero_multiplicity: int
    component_sizes: Tuple[int, ...]
    residual: float = 0.0
    converged: bool = True
    method: str = "dense"
    n_states: int = 0
    extras: Dict[str, Any] = field(default_factory=dict)

    @property
    def relaxation_time(self) -> float:
        if self.gap == 0:
            return math.inf
        return 1.0 / self.gap

    def to_dict(self) -> Dict[str, Any]:
        out = {"gap": self.gap, "relaxation_time": self.relaxation_time,
               "zero_multiplicity": self.zero_multiplicity, "components": len(self.component_sizes),
               "residual": self.residual, "converged": self.converged, "method": self.method,
               "n_states": self.n_states}
        out.update({k: v for k, v in self.extras.items() if isinstance(v, (int, float, str, bool))})
        return out

    def to_text(self) -> str:
        return "\n".join(f"{k}={v}" for k, v in self.to_dict().items())


def _norm_inf(h: sparse.csr_matrix) -> float:
    return float(abs(h).sum(axis=1).max()) if h.nnz else 0.0


def _residual(h, value: float, vector: np.ndarray, norm: float) -> float:
    if norm == 0:
        return 0.0
    r = h @ vector - value * vector
    return float(np.linalg.norm(r) / (norm * max(np.linalg.norm(vector), 1e-300)))


def _smallest_eigenpair(h: sparse.csr_matrix, dense_limit: int, tol: float, seed: int,
                        deflate: Optional[np.ndarray] = None) -> Tuple[float, np.ndarray, str, bool]:
    """对称半正定矩阵 h 的最小特征对；deflate 给出时先把该方向移到谱的上方"""
    dim = h.shape[0]
    if dim <= dense_limit:
        dense = h.toarray()
        if deflate is None:
            w, v = linalg.eigh(dense, subset_by_index=[0, 0])
            return float(w[0]), v[:, 0], "dense", True
        w, v = linalg.eigh(dense, subset_by_index=[0, 1])
        return float(w[1]), v[:, 1], "dense", True

    sigma = 2.0 * _norm_inf(h) + 1.0
    if deflate is None:
        op: Any = h
    else:
        u = deflate

        def matvec(v):
            v = np.ravel(v)
            return h @ v + sigma * u * (u @ v)
        op = LinearOperator((dim, dim), matvec=matvec, dtype=np.float64)

    v0 = stream(seed, StreamTag.SOLVER, dim).random(dim) + 0.5
    try:
        w, v = eigsh(op, k=1, which="SA", v0=v0, tol=tol * 0.1, maxiter=10 * dim)
        return float(w[0]), v[:, 0], "lanczos", True
    except ArpackNoConvergence as e:
        if len(e.eigenvalues):
            return float(e.eigenvalues[0]), e.eigenvectors[:, 0], "lanczos", False
        return math.nan, v0 / np.linalg.norm(v0), "lanczos", False


def spectral_gap(gen: Generator, component: Optional[Sequence[int]] = None,
                 tolerance: float = TOLERANCE, dense_limit: int = DENSE_LIMIT,
                 seed: int = 0) -> SpectralReport:
    """
    谱隙: -L 限制在一个遍历分支上的最小非零特征值

    Args:
        gen: 生成元
        component: 状态下标集合 (必须是一个遍历分支)；默认整个状态空间
        tolerance: 相对残差容差
        dense_limit: 维数不超过该值时使用稠密求解器
        seed: Lanczos 初始向量的种子

    Returns:
        SpectralReport: 整个可约链的谱隙记为 0 并给出零特征值重数
    """
    sizes = tuple(len(c) for c in gen.components)
    if component is None:
        if len(sizes) > 1:
            logger.info(f"{gen.label}: 链可约 ({len(sizes)} 个分支)，谱隙记为 0")
            return SpectralReport(0.0, len(sizes), sizes, method="reducible", n_states=gen.size)
        idx = np.arange(gen.size)
    else:
        idx = np.unique(np.asarray(component, dtype=np.int64))
        if idx.size == 0:
            raise PreconditionError("spectral_gap", "分支不能为空")

    if idx.size == 1:
        return SpectralReport(math.inf, 1, sizes, method="trivial", n_states=1)

    if idx.size < gen.size:
        # 分支内闭合才有意义
        labels = np.full(gen.size, -1)
        for i, c in enumerate(gen.components):
            labels[c] = i
        if np.unique(labels[idx]).size != 1 or sizes[labels[idx[0]]] != idx.size:
            raise PreconditionError("spectral_gap", "给定状态集合不是单个遍历分支",
                                    f"涉及分支: {sorted(set(int(v) for v in labels[idx]))[:10]}")
        h = gen.symmetrized[idx][:, idx].tocsr()
    else:
        h = gen.symmetrized

    root = np.sqrt(gen.mu[idx])
    u = root / np.linalg.norm(root)
    value, vector, method, ok = _smallest_eigenpair(h, dense_limit, tolerance, seed, deflate=u)
    norm = float(abs(h).sum(axis=0).max())
    residual = _residual(h, value, vector, norm)
    converged = ok and residual <= tolerance and np.isfinite(value)
    if not converged:
        logger.warning(f"{gen.label}: 谱隙求解未达到容差 (残差 {residual:.3e}, 方法 {method})")
    logger.debug(f"{gen.label}: 谱隙 {value:.12g} ({method}, 维数 {idx.size})")
    return SpectralReport(max(value, 0.0), 1, sizes, residual, bool(converged), method, int(idx.size))


def model_gap(model: ModelSpec, **kwargs: Any) -> SpectralReport:
    """构造生成元并计算谱隙"""
    max_vertices = kwargs.pop("max_vertices", MAX_VERTICES)
    return spectral_gap(build_generator(model, max_vertices), **kwargs)


def spectrum(gen: Generator, component: Optional[Sequence[int]] = None,
             dense_limit: int = DENSE_LIMIT) -> np.ndarray:
    """-L 的全部特征值 (升序)，只用于稠密规模"""
    idx = np.arange(gen.size) if component is None else np.unique(np.asarray(component))
    if idx.size > dense_limit:
        raise SizeCapError(gen.model.n_vertices, MAX_VERTICES,
                           details=f"全谱只支持不超过 {dense_limit} 个状态")
    h = gen.symmetrized[idx][:, idx].toarray()
    return linalg.eigvalsh(h)


def zero_multiplicity(eigenvalues: np.ndarray, tol: float = 1e-9) -> int:
    scale = max(1.0, float(np.abs(eigenvalues).max())) if eigenvalues.size else 1.0
    return int(np.count_nonzero(np.abs(eigenvalues) <= tol * scale))


def dirichlet_eigenvalue(gen: Generator, target, tolerance: float = TOLERANCE,
                         dense_limit: int = DENSE_LIMIT, seed: int = 0) -> float:
    """
    Dirichlet 特征值 λ_A = inf { D(f) : μ(f²) = 1, f ≡ 0 在 A 上 }

    即对称化 -L 删去 A 的行列后的最小特征值。

    Raises:
        PreconditionError: A 为空或覆盖整个状态空间
    """
    in_a = gen.space.mask(target)
    if not in_a.any():
        raise PreconditionError("dirichlet_eigenvalue", "目标集合 A 为空")
    rest = np.flatnonzero(~in_a)
    if rest.size == 0:
        raise PreconditionError("dirichlet_eigenvalue", "A 覆盖整个状态空间，λ_A 无定义")
    h = gen.symmetrized[rest][:, rest].tocsr()
    value, vector, method, ok = _smallest_eigenpair(h, dense_limit, tolerance, seed)
    if not ok:
        raise SolverError("eigsh", "Dirichlet 特征值求解未收敛")
    return max(value, 0.0)


# ----------------------------------------------------------------------
# Ω⁺ 与支配

def gap_plus(model: ModelSpec, max_vertices: int = MAX_VERTICES, **kwargs: Any) -> SpectralReport:
    """
    限制在 Ω⁺ = {至少一个空位} 上的谱隙，测度为 μ⁺ = μ(· | Ω⁺)

    Raises:
        UnsupportedModelError: 非 0-1 模型
        PreconditionError: Ω⁺ 不是单个遍历分支
    """
    require_binary(model, "gap_plus")
    gen = build_generator(model, max_vertices)
    full = (1 << model.n_vertices) - 1
    plus = np.flatnonzero(gen.space.codes != full)
    labels = np.full(gen.size, -1)
    for i, c in enumerate(gen.components):
        labels[c] = i
    touched = sorted(set(int(v) for v in labels[plus]))
    if len(touched) != 1 or len(gen.components[touched[0]]) != plus.size:
        sizes = [len(gen.components[i]) for i in touched]
        raise PreconditionError("gap_plus", "Ω⁺ 不是单个遍历分支",
                                f"Ω⁺ 分成 {len(touched)} 个分支, 大小 {sizes[:10]}")
    report = spectral_gap(gen, plus, **kwargs)
    report.extras["mu_plus"] = float(gen.mu[plus].sum())
    return report


@dataclass
class DominationGapReport:
    """支配关系下的谱隙比较: a 支配 b 时应有 gap(b) ≤ gap(a)"""
    gap_a: float
    gap_b: float
    holds: bool
    tolerance: float
    domination: DominationReport

    def __bool__(self) -> bool:
        return self.holds


def check_domination_gap(a: ModelSpec, b: ModelSpec, tolerance: float = 1e-9,
                         max_vertices: int = MAX_VERTICES, **kwargs: Any) -> DominationGapReport:
    """
    检查 a 支配 b 时 gap(b) ≤ gap(a) + tolerance

    Raises:
        PreconditionError: a 不支配 b，或任一模型可约
        SolverError: 任一谱隙未收敛
    """
    dom = dominates(a, b)
    if not dom:
        raise PreconditionError("check_domination_gap", "a 不支配 b",
                                f"反例: 构型 {dom.counterexample[0]} 顶点 {dom.counterexample[1]}")
    gaps = []
    for model in (a, b):
        gen = build_generator(model, max_vertices)
        if len(gen.components) != 1:
            raise PreconditionError("check_domination_gap", f"模型 {model.name} 可约",
                                    f"{len(gen.components)} 个遍历分支")
        report = spectral_gap(gen, **kwargs)
        if not report.converged:
            raise SolverError(report.method, f"{model.name}: 谱隙未收敛", report.residual)
        gaps.append(report.gap)
    return DominationGapReport(gaps[0], gaps[1], gaps[1] <= gaps[0] + tolerance, tolerance, dom)


# ----------------------------------------------------------------------
# 精确的持续性、击中时间与方差衰减

def exact_persistence(gen: Generator, t_grid: Sequence[float],
                      origin: Optional[int] = None) -> PersistenceCurve:
    """
    有限体积上的精确持续性函数

    对原点的每个状态 s，把生成元限制在 {η_0 = s} 上得到杀死半群，
    F_s(t) = Σ_{η_0 = s} μ(η)·(e^{tL_s} 1)(η)。
    """
    model = gen.model
    origin = model.origin if origin is None else origin
    t = np.asarray(sorted(float(v) for v in t_grid))
    digits = gen.space.table.digits(origin)
    good = model.measure.good_mask
    parts = np.zeros((model.measure.n_states, t.size))
    for s in range(model.measure.n_states):
        idx = np.flatnonzero(digits == s)
        block = gen.restricted(idx)
        ones = np.ones(idx.size)
        weights = gen.mu[idx]
        for j, tj in enumerate(t):
            parts[s, j] = weights @ (ones if tj == 0 else expm_multiply(block * tj, ones))
    F0 = sum(parts[s] for s in range(len(good)) if good[s])
    F1 = sum(parts[s] for s in range(len(good)) if not good[s])
    F = F0 + F1
    return PersistenceCurve(t, F, F0, F1, np.zeros_like(F), 0, True, model.name, model.measure.q)


def expected_hitting_times(gen: Generator, target) -> np.ndarray:
    """
    每个起点的 E_η[T_A]

    在 A 的补集上解 (-L_CC) h = 1；无法到达 A 的状态记为 inf。

    Raises:
        PreconditionError: A 为空
        SolverError: 线性求解失败
    """
    in_a = gen.space.mask(target)
    if not in_a.any():
        raise PreconditionError("expected_hitting_times", "目标集合 A 为空")
    h = np.zeros(gen.size)
    reach = np.zeros(gen.size, dtype=bool)
    for comp in gen.components:
        if in_a[comp].any():
            reach[comp] = True
    h[~reach] = math.inf
    rest = np.flatnonzero(reach & ~in_a)
    if rest.size:
        block = -gen.restricted(rest)
        sol = np.atleast_1d(spsolve(block.tocsc(), np.ones(rest.size)))
        if not np.all(np.isfinite(sol)):
            raise SolverError("spsolve", "击中时间方程奇异")
        res = np.abs(block @ sol - 1.0).max()
        if res > 1e-6:
            raise SolverError("spsolve", "击中时间方程残差过大", float(res))
        h[rest] = sol
    return h


def variance(gen: Generator, f: np.ndarray) -> float:
    f = np.asarray(f, dtype=np.float64)
    mean = gen.mu @ f
    return float(gen.mu @ (f - mean) ** 2)


def dirichlet_form(gen: Generator, f: np.ndarray) -> float:
    """D(f) = -μ(f·Lf) = Σ_x μ(c_x Var_x f)"""
    f = np.asarray(f, dtype=np.float64)
    return float(-(gen.mu * f) @ (gen.matrix @ f))


def variational_ratio(gen: Generator, f: np.ndarray) -> float:
    """D(f) / Var(f)，不小于谱隙"""
    var = variance(gen, f)
    if var <= 0:
        raise PreconditionError("variational_ratio", "f 在 μ 下是常数")
    return dirichlet_form(gen, f) / var


def variance_decay(gen: Generator, f: np.ndarray, t_grid: Sequence[float]) -> np.ndarray:
    """Var(P_t f)，满足 Var(P_t f) ≤ e^{-2t·gap} Var(f)"""
    f = np.asarray(f, dtype=np.float64)
    out = []
    for t in t_grid:
        ft = f if t == 0 else expm_multiply(gen.matrix * float(t), f)
        out.append(variance(gen, ft))
    return np.asarray(out)


# ----------------------------------------------------------------------
# 渐近趋势 (只报告)

def fit_gap_exponent(qs: Sequence[float], gaps: Sequence[float]) -> Tuple[float, float]:
    """
    拟合 gap ≈ C·q^a，返回 (a, C)

    用于 FA-1f 在 q → 0 时的 q³ 行为的定性对比。
    """
    qs = np.asarray(qs, dtype=float)
    gaps = np.asarray(gaps, dtype=float)
    keep = (qs > 0) & (gaps > 0) & np.isfinite(gaps)
    if keep.sum() < 2:
        raise PreconditionError("fit_gap_exponent", "至少需要两个正的 (q, gap) 点")
    slope, intercept = np.polyfit(np.log(qs[keep]), np.log(gaps[keep]), 1)
    return float(slope), float(math.exp(intercept))


def east_scaling_ratio(q: float, gap: float) -> float:
    """log(1/gap) / log(1/q)²，East 模型在 q → 0 时趋于常数"""
    return math.log(1.0 / gap) / math.log(1.0 / q) ** 2


def random_test_functions(size: int, count: int, seed: int) -> np.ndarray:
    """变分一致性检查使用的随机函数 (每行一个)"""
    return stream(seed, StreamTag.TEST_FUNCTION, size).standard_normal((count, size))
