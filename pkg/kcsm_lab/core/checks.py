#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Check Suite

不等式与性质检查套件：在可精确求解的规模上逐条验证生成元、遍历性、
持续性上界、Dirichlet 特征值、支配关系、Ω⁺ 谱隙、击中时间下界、
自举阈值、Gibbs 相互作用等结论，并报告渐近趋势 (不判定通过与否)。
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np
from scipy import stats

from .bootstrap import closure, estimate_qbp, oriented_percolation_oracle
from .catalog import catalog, east_interval_for
from .dynamics import (
    FLAG_CHANGED,
    hitting_time,
    persistence,
    persistence_upper_bound,
    sample_equilibrium,
    simulate,
    two_state_persistence,
)
from .exceptions import ConfigError, KcsmLabError, SolverError
from .gibbs import (
    build_interacting_generator,
    collar,
    constant_boundary,
    dlr_residual,
    empty_interaction,
    nearest_neighbor_pair,
    random_interaction,
    strong_mixing_ratio,
)
from .models import SpinConfig, vacant
from .spectra import (
    SpectralReport,
    build_generator,
    check_domination_gap,
    dirichlet_eigenvalue,
    east_scaling_ratio,
    expected_hitting_times,
    fit_gap_exponent,
    gap_plus,
    model_gap,
    random_test_functions,
    spectral_gap,
    spectrum,
    variational_ratio,
    zero_multiplicity,
)
from .topology import random_connected_graph, random_tree, spanning_tree, split_tree
from ..utils.logger import get_logger
from ..utils.streams import StreamTag, stream

logger = get_logger("checks")

TOL = 1e-9


@dataclass
class CheckResult:
    """
    单条检查的结果

    passed 为 None 表示只报告、不判定。
    """
    name: str
    passed: Optional[bool]
    value: float = math.nan
    bound: float = math.nan
    detail: str = ""
    runtime: float = 0.0

    def to_row(self) -> Dict[str, Any]:
        status = "report" if self.passed is None else ("pass" if self.passed else "FAIL")
        return {"check": self.name, "status": status, "value": self.value, "bound": self.bound,
                "runtime": round(self.runtime, 3), "detail": self.detail}


@dataclass
class CheckReport:
    profile: str
    seed: int
    results: List[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed is not False for r in self.results)

    @property
    def failures(self) -> List[CheckResult]:
        return [r for r in self.results if r.passed is False]

    def rows(self) -> List[Dict[str, Any]]:
        return [r.to_row() for r in self.results]

    def to_text(self) -> str:
        width = max((len(r.name) for r in self.results), default=10)
        lines = []
        for r in self.results:
            row = r.to_row()
            lines.append(f"{r.name:<{width}}  {row['status']:<6}  value={r.value:.6g}  "
                         f"bound={r.bound:.6g}  {r.runtime:6.2f}s  {r.detail}")
        total = len(self.results)
        lines.append(f"{total - len(self.failures)}/{total} 通过 (profile={self.profile})")
        return "\n".join(lines)


PROFILES: Dict[str, Dict[str, Any]] = {
    "quick": {
        "generator_models": [("east", {"n": 6}), ("fa-1f", {"n": 6}), ("fa-2f", {"shape": (2, 3)}),
                             ("north-east", {"shape": (2, 3)})],
        "n_functions": 20,
        "component_models": 10,
        "persistence_n": 6, "persistence_q": [0.5], "persistence_samples": 2000,
        "single_spin_samples": 4000,
        "dirichlet_n": [4, 6], "dirichlet_q": [0.3, 0.5],
        "graphs": 5, "graph_n": 7,
        "east_monotone_n": 8, "east_monotone_q": [0.5],
        "plus_graphs": 4,
        "hitting_q": [0.5], "hitting_samples": 300,
        "closure_graphs": 10,
        "qbp_sizes": [8, 16], "qbp_q": [round(0.1 + 0.05 * i, 4) for i in range(11)],
        "qbp_samples": 40, "qbp_coupled": True,
        "gibbs_random": 3,
        "law_samples": 300,
        "asymptotic_n": 8,
    },
    "full": {
        "generator_models": [("east", {"n": 12}), ("fa-1f", {"n": 12}), ("fa-2f", {"shape": (3, 4)}),
                             ("north-east", {"shape": (3, 4)})],
        "n_functions": 100,
        "component_models": 30,
        "persistence_n": 8, "persistence_q": [0.3, 0.5, 0.7], "persistence_samples": 10000,
        "single_spin_samples": 10000,
        "dirichlet_n": [4, 6, 8, 10], "dirichlet_q": [0.3, 0.5],
        "graphs": 20, "graph_n": 10,
        "east_monotone_n": 12, "east_monotone_q": [0.3, 0.5, 0.7],
        "plus_graphs": 10,
        "hitting_q": [0.3, 0.5], "hitting_samples": 1000,
        "closure_graphs": 50,
        "qbp_sizes": [32, 64], "qbp_q": [round(0.2 + 0.005 * i, 4) for i in range(41)],
        "qbp_samples": 200, "qbp_coupled": False,
        "gibbs_random": 10,
        "law_samples": 1000,
        "asymptotic_n": 14,
    },
}


def _require_converged(report: SpectralReport, label: str) -> SpectralReport:
    """未收敛的谱隙不参与比较"""
    if not report.converged:
        raise SolverError(report.method, f"{label}: 谱隙未收敛", report.residual)
    return report


def _converged_gap(gen, **kwargs: Any) -> SpectralReport:
    return _require_converged(spectral_gap(gen, **kwargs), gen.label)


def _converged_model_gap(model, **kwargs: Any) -> SpectralReport:
    return _require_converged(model_gap(model, **kwargs), model.name)


def _converged_gap_plus(model, **kwargs: Any) -> SpectralReport:
    return _require_converged(gap_plus(model, **kwargs), f"{model.name} (Ω⁺)")


def _graph_size(rng: np.random.Generator, limit: int) -> int:
    return int(rng.integers(3, limit + 1))


# ----------------------------------------------------------------------
# 各项检查

def check_generator(cfg: Dict[str, Any], seed: int) -> CheckResult:
    """行和为零、细致平衡、变分不等式 D(f)/Var(f) ≥ gap"""
    worst_row, worst_db, worst_gap = 0.0, 0.0, math.inf
    for name, params in cfg["generator_models"]:
        gen = build_generator(catalog(name, q=0.4, **params))
        worst_row = max(worst_row, gen.row_sum_residual())
        worst_db = max(worst_db, gen.detailed_balance_residual())
        gap = _converged_gap(gen).gap
        for f in random_test_functions(gen.size, cfg["n_functions"], seed):
            worst_gap = min(worst_gap, variational_ratio(gen, f) - gap)
    passed = worst_row <= 1e-12 and worst_db <= 1e-12 and worst_gap >= -1e-8
    return CheckResult("generator", passed, worst_gap, -1e-8,
                       f"row_sum={worst_row:.2e} detailed_balance={worst_db:.2e}")


def _random_small_model(i: int, seed: int):
    rng = stream(seed, StreamTag.TEST_FUNCTION, 1000 + i)
    q = float(rng.uniform(0.3, 0.7))
    n = int(rng.integers(3, 8))
    kind = i % 3
    if kind == 0:
        return catalog("fa-1f", graph=random_connected_graph(n, 0.5, seed + i), q=q)
    if kind == 1:
        return catalog("fa-2f", graph=random_connected_graph(n, 0.6, seed + i), q=q)
    return catalog("east", n=n, periodic=True, q=q)


def check_components(cfg: Dict[str, Any], seed: int) -> CheckResult:
    """遍历分支数 = 零特征值重数"""
    mismatches = 0
    for i in range(cfg["component_models"]):
        gen = build_generator(_random_small_model(i, seed))
        if zero_multiplicity(spectrum(gen)) != len(gen.components):
            mismatches += 1
    return CheckResult("components", mismatches == 0, float(mismatches), 0.0,
                       f"{cfg['component_models']} 个随机模型")


def check_persistence(cfg: Dict[str, Any], seed: int) -> CheckResult:
    """F̂(t) ≤ e^{-q·gap·t} + e^{-p·gap·t} + 3·stderr"""
    worst = -math.inf
    for q in cfg["persistence_q"]:
        model = catalog("east", n=cfg["persistence_n"], q=q)
        gap = _converged_model_gap(model).gap
        t_grid = np.linspace(0.0, 2.0 / gap, 9)
        curve = persistence(model, t_grid, cfg["persistence_samples"], seed)
        bound = persistence_upper_bound(q, gap, curve.t)
        worst = max(worst, float(np.max(curve.F - bound - 3 * curve.stderr)))
    return CheckResult("persistence_bound", worst <= 0.0, worst, 0.0,
                       f"East n={cfg['persistence_n']}, q={cfg['persistence_q']}")


def check_single_spin(cfg: Dict[str, Any], seed: int) -> CheckResult:
    """单自旋持续性与 p·e^{-qt} + q·e^{-pt} 吻合 (3 倍真实二项标准差)"""
    q = 0.3
    n = cfg["single_spin_samples"]
    model = catalog("east", n=1, q=q)
    t_grid = [0.0, 0.5, 1.0, 2.0, 3.0]
    curve = persistence(model, t_grid, n, seed)
    exact = two_state_persistence(q, curve.t)
    sigma = np.sqrt(exact * (1.0 - exact) / n)
    excess = float(np.max(np.abs(curve.F - exact) - 3 * sigma))
    return CheckResult("single_spin_persistence", excess <= 0.0, excess, 0.0, f"q={q}, {n} 个样本")


def check_dirichlet(cfg: Dict[str, Any], seed: int) -> CheckResult:
    """λ_A ≥ q·gap，单自旋时取等号"""
    q = 0.4
    single = build_generator(catalog("east", n=1, q=q))
    exact_gap = abs(dirichlet_eigenvalue(single, vacant(0)) - q * _converged_gap(single).gap)
    worst = math.inf
    for name in ("east", "fa-1f"):
        for n in cfg["dirichlet_n"]:
            for q in cfg["dirichlet_q"]:
                gen = build_generator(catalog(name, n=n, q=q))
                lam = dirichlet_eigenvalue(gen, vacant(0))
                worst = min(worst, lam - q * _converged_gap(gen).gap)
    passed = exact_gap <= 1e-12 and worst >= -TOL
    return CheckResult("dirichlet_eigenvalue", passed, worst, -TOL, f"single_spin_error={exact_gap:.2e}")


def _random_graphs(cfg: Dict[str, Any], seed: int, count: int):
    rng = stream(seed, StreamTag.GRAPH, 999)
    for i in range(count):
        yield random_connected_graph(_graph_size(rng, cfg["graph_n"]), 0.4, seed + i)


def check_domination(cfg: Dict[str, Any], seed: int) -> CheckResult:
    """gap(树上 East) ≤ gap(FA-1f, 根无约束)，以及 gap(FA-1f) ≥ gap(East 路径)"""
    worst_dom, worst_path = math.inf, math.inf
    q = 0.5
    for graph in _random_graphs(cfg, seed, cfg["graphs"]):
        fa = catalog("fa-1f", graph=graph, root=0, q=q)
        tree = catalog("tree-east", graph=graph, root=0, q=q)
        report = check_domination_gap(fa, tree)
        worst_dom = min(worst_dom, report.gap_a - report.gap_b)
        east = _converged_model_gap(catalog("east", n=graph.n_vertices, q=q)).gap
        worst_path = min(worst_path, report.gap_a - east)
    passed = worst_dom >= -TOL and worst_path >= -TOL
    return CheckResult("domination_gap", passed, min(worst_dom, worst_path), -TOL,
                       f"{cfg['graphs']} 个随机图, 支配 {worst_dom:.3g}, 路径 {worst_path:.3g}")


def check_east_monotone(cfg: Dict[str, Any], seed: int) -> CheckResult:
    """East 区间谱隙对 n 单调不增"""
    worst = math.inf
    for q in cfg["east_monotone_q"]:
        gaps = [_converged_model_gap(catalog("east", n=n, q=q)).gap
                for n in range(1, cfg["east_monotone_n"] + 1)]
        worst = min(worst, float(np.min(np.array(gaps[:-1]) - np.array(gaps[1:]))))
    return CheckResult("east_gap_monotone", worst >= -TOL, worst, -TOL,
                       f"n=1..{cfg['east_monotone_n']}")


def check_tree_split(cfg: Dict[str, Any], seed: int) -> CheckResult:
    """树在分支点拆分后 gap(T) ≥ min(gap(A), gap(B))"""
    worst = math.inf
    checked = 0
    rng = stream(seed, StreamTag.GRAPH, 998)
    for i in range(cfg["graphs"]):
        tree = spanning_tree(random_tree(_graph_size(rng, cfg["graph_n"]), seed + i), 0)
        split = split_tree(tree)
        if split is None:
            continue
        part_a, part_b = split.subtrees(tree)
        whole = _converged_model_gap(catalog("tree-east", tree=tree)).gap
        sides = [_converged_model_gap(catalog("tree-east", tree=t)).gap for t in (part_a, part_b)]
        worst = min(worst, whole - min(sides))
        checked += 1
    return CheckResult("tree_split", worst >= -TOL, worst, -TOL, f"{checked} 棵可拆分的树")


def check_gap_plus(cfg: Dict[str, Any], seed: int) -> CheckResult:
    """gap(L⁺) ≥ ½·gap(East 路径 n)·μ(Ω⁺)"""
    q = 0.5
    worst = math.inf
    rng = stream(seed, StreamTag.GRAPH, 997)
    for i in range(cfg["plus_graphs"]):
        n = _graph_size(rng, cfg["graph_n"])
        graph = random_tree(n, seed + i) if i % 2 == 0 else random_connected_graph(n, 0.4, seed + i)
        report = _converged_gap_plus(catalog("fa-1f", graph=graph, q=q))
        east = _converged_model_gap(catalog("east", n=n, q=q)).gap
        worst = min(worst, report.gap - 0.5 * east * report.extras["mu_plus"])
    return CheckResult("gap_plus", worst >= -TOL, worst, -TOL, f"{cfg['plus_graphs']} 个随机树/图")


def check_hitting(cfg: Dict[str, Any], seed: int) -> CheckResult:
    """E(T) ≥ e^{-1}/gap，并与线性方程的精确值对照"""
    worst_bound, worst_exact = math.inf, -math.inf
    for q in cfg["hitting_q"]:
        model = east_interval_for(q)
        gen = build_generator(model)
        gap = _converged_gap(gen).gap
        start = SpinConfig.ones(model.n_vertices)
        sample = hitting_time(model, start, vacant(0), cfg["hitting_samples"], seed)
        exact = expected_hitting_times(gen, vacant(0))[start.code]
        lower = math.exp(-1.0) / gap
        worst_bound = min(worst_bound, sample.mean + 3 * sample.stderr - lower, exact - lower)
        worst_exact = max(worst_exact, abs(sample.mean - exact) - 4 * sample.stderr)
    passed = worst_bound >= 0.0 and worst_exact <= 0.0
    return CheckResult("hitting_lower_bound", passed, worst_bound, 0.0,
                       f"q={cfg['hitting_q']}, 与精确值偏差余量 {worst_exact:.3g}")


def check_bootstrap(cfg: Dict[str, Any], seed: int, workers: Optional[int] = None) -> CheckResult:
    """FA-1f 闭包清空任何含空位的构型；North-East 阈值与有向渗流对照一致"""
    rng = stream(seed, StreamTag.BOOTSTRAP, 997)
    failures = 0
    for i in range(cfg["closure_graphs"]):
        graph = random_connected_graph(int(rng.integers(3, 13)), 0.3, seed + i)
        model = catalog("fa-1f", graph=graph, q=0.5)
        values = rng.integers(0, 2, graph.n_vertices)
        values[int(rng.integers(0, graph.n_vertices))] = 0
        if closure(model, SpinConfig.from_values(values)).code != 0:
            failures += 1

    sizes, q_grid, samples = cfg["qbp_sizes"], cfg["qbp_q"], cfg["qbp_samples"]
    estimate = estimate_qbp("north-east", sizes, q_grid, samples, seed, workers)
    oracle = oriented_percolation_oracle(sizes, q_grid, samples, seed, coupled=cfg["qbp_coupled"])
    monotone = all(np.all(np.diff(estimate.frequencies(s)) >= 0) for s in sizes)
    diff = abs(estimate.q_hat - oracle.q_hat)
    passed = failures == 0 and monotone and diff <= 0.03
    return CheckResult("bootstrap_threshold", passed, diff, 0.03,
                       f"q̂={estimate.q_hat:.4f} oracle={oracle.q_hat:.4f} closure_failures={failures}")


def check_gibbs(cfg: Dict[str, Any], seed: int) -> CheckResult:
    """DLR 相容、Φ=0 退化、相互作用谱隙为正、s → 0 连续、强混合衰减"""
    details = []

    # DLR: 2×3 体积，随机 Φ (r = 2, M = 0.2)
    ne = catalog("north-east", shape=(2, 3), q=0.5)
    sites = ne.graph.coords
    region = list(sites) + list(collar(sites, 2))
    tau = constant_boundary(sites, 2, 1)
    dlr = max(dlr_residual(random_interaction(region, 2, 0.2, seed, key=i), sites, [0, 1, 2], tau,
                           ne.measure) for i in range(cfg["gibbs_random"]))
    details.append(f"dlr={dlr:.1e}")

    # Φ = 0 与无相互作用生成元逐项相同
    plain = build_generator(ne).matrix
    zero = build_interacting_generator(ne, empty_interaction(2)).matrix
    zero_diff = float(abs(plain - zero).max())
    details.append(f"zero_phi={zero_diff:.1e}")

    # 3×3 North-East, q = 0.9, M = 0.1
    ne3 = catalog("north-east", shape=(3, 3), q=0.9)
    sites3 = ne3.graph.coords
    region3 = list(sites3) + list(collar(sites3, 2))
    min_gap = min(_converged_gap(build_interacting_generator(
        ne3, random_interaction(region3, 2, 0.1, seed, key=100 + i))).gap for i in range(cfg["gibbs_random"]))
    details.append(f"min_gap={min_gap:.3g}")

    # s → 0 时谱隙连续
    phi = random_interaction(region, 2, 0.2, seed, key=200)
    base = _converged_gap(build_generator(ne)).gap
    deviations = [abs(_converged_gap(build_interacting_generator(ne, phi.scaled(s))).gap - base)
                  for s in (0.2, 0.1, 0.05)]
    continuity = all(a > b for a, b in zip(deviations, deviations[1:]))
    details.append(f"continuity={[round(d, 6) for d in deviations]}")

    # 一维条带上的强混合: 左端边界翻转，Δ 右移时偏差递减
    strip = [(x, 0) for x in range(5)]
    pair = nearest_neighbor_pair(strip + list(collar(strip, 2)), 0.5)
    tau0 = constant_boundary(strip, 2, 1)
    tau1 = dict(tau0)
    tau1[(-1, 0)] = 0
    ratios = [strong_mixing_ratio(pair, strip, [i], tau0, tau1, ne.measure).value for i in range(4)]
    mixing = all(a > b for a, b in zip(ratios, ratios[1:]))
    details.append(f"mixing={[round(r, 6) for r in ratios]}")

    passed = dlr <= 1e-12 and zero_diff <= 1e-12 and min_gap > 1e-6 and continuity and mixing
    return CheckResult("gibbs", passed, min_gap, 1e-6, " ".join(details))


def vacancy_time_average(trajectory, t_max: float) -> float:
    """[0, t_max] 上空位比例的时间平均 (二值构型，0 为空位)"""
    n = trajectory.initial.n
    values = list(trajectory.initial.values())
    vacant_now = n - sum(values)
    area, last = 0.0, 0.0
    for time, vertex, state, flags in trajectory.events:
        if time > t_max:
            break
        if not flags & FLAG_CHANGED:
            continue
        area += vacant_now * (time - last)
        last = float(time)
        x = int(vertex)
        vacant_now += (values[x] != 0) - (int(state) != 0)
        values[x] = int(state)
    area += vacant_now * (t_max - last)
    return area / (n * t_max)


def check_stationarity(cfg: Dict[str, Any], seed: int) -> CheckResult:
    """从 μ 出发时空位比例 (终止时刻与整段时间平均) 保持在 q 附近，且两种时钟的持续时间同分布"""
    q, n, t_max = 0.5, 10, 5.0
    model = catalog("east", n=n, q=q)
    replicas = cfg["law_samples"]
    final_vacancies, averages = 0, []
    for r in range(replicas):
        start = sample_equilibrium(model.measure, n, seed, r)
        trajectory = simulate(model, start, t_max, seed, r, record_illegal=False)
        final_vacancies += n - sum(trajectory.final.values())
        averages.append(vacancy_time_average(trajectory, t_max))
    frac = final_vacancies / (n * replicas)
    mean_frac = float(np.mean(averages))
    # 时间平均的方差不超过单一时刻的方差
    sigma = math.sqrt(q * (1 - q) / (n * replicas))

    small = catalog("east", n=5, q=q)
    times = []
    for name in ("event-queue", "uniformization"):
        curve = persistence(small, [50.0], replicas, seed, scheduler=name)
        times.append(np.minimum(curve.extras["persistence_times"], 50.0))
    p_value = float(stats.ks_2samp(times[0], times[1]).pvalue)
    passed = abs(frac - q) <= 3 * sigma and abs(mean_frac - q) <= 3 * sigma and p_value >= 0.01
    return CheckResult("law_invariance", passed, p_value, 0.01,
                       f"vacancy={frac:.4f} time_average={mean_frac:.4f}±{sigma:.4f}")


def report_asymptotics(cfg: Dict[str, Any], seed: int) -> CheckResult:
    """FA-1f 谱隙对 q 的拟合指数 (对照 q³) 与 East 的 log(1/gap)/log(1/q)² (对照 1/(2 log 2))"""
    qs = [0.2, 0.3, 0.4, 0.5, 0.6]
    n = cfg["asymptotic_n"]
    fa_gaps = [_converged_model_gap(catalog("fa-1f", n=n, q=q)).gap for q in qs]
    exponent, _ = fit_gap_exponent(qs, fa_gaps)
    ratios = [east_scaling_ratio(q, _converged_model_gap(catalog("east", n=n, q=q)).gap) for q in (0.2, 0.3)]
    return CheckResult("asymptotics", None, exponent, 3.0,
                       f"east_ratio={[round(r, 4) for r in ratios]} reference={1 / (2 * math.log(2)):.4f}")


CHECKS: List[Callable[..., CheckResult]] = [
    check_generator,
    check_components,
    check_persistence,
    check_single_spin,
    check_dirichlet,
    check_domination,
    check_east_monotone,
    check_tree_split,
    check_gap_plus,
    check_hitting,
    check_bootstrap,
    check_gibbs,
    check_stationarity,
    report_asymptotics,
]


def run_check_suite(profile: str = "quick", seed: int = 0, workers: Optional[int] = None,
                    only: Optional[Sequence[str]] = None) -> CheckReport:
    """
    运行检查套件

    Args:
        profile: quick 或 full
        seed: 随机种子
        workers: 工作进程数 (只影响速度)
        only: 只运行名称中包含这些子串的检查

    Returns:
        CheckReport: 每条检查的结果；求解器失败时抛出 SolverError
    """
    if profile not in PROFILES:
        raise ConfigError(None, f"未知的检查配置: {profile}")
    cfg = PROFILES[profile]
    report = CheckReport(profile, seed)
    for check in CHECKS:
        if only and not any(key in check.__name__ for key in only):
            continue
        start = time.perf_counter()
        try:
            if check is check_bootstrap:
                result = check(cfg, seed, workers)
            else:
                result = check(cfg, seed)
        except SolverError:
            raise
        except KcsmLabError as e:
            result = CheckResult(check.__name__.replace("check_", ""), False, detail=str(e).splitlines()[0])
        result.runtime = time.perf_counter() - start
        status = "报告" if result.passed is None else ("通过" if result.passed else "失败")
        logger.info(f"{result.name}: {status} ({result.runtime:.2f}s) {result.detail}")
        report.results.append(result)
    return report
