#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Experiment Runner

实验运行器：按配置执行 gap / persistence / bootstrap-scan / hitting / gibbs-gap / check
子命令，输出带清单头的 CSV 与 JSON 运行清单。
"""

import math
import time
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .. import __version__
from .bootstrap import estimate_qbp, oriented_percolation_oracle
from .catalog import east_interval_for, model_from_descriptor
from .checks import run_check_suite
from .config import ConfigManager, ExperimentConfig
from .dynamics import hitting_time, persistence, persistence_upper_bound, two_state_persistence
from .exceptions import ConfigError, SizeCapError, SolverError
from .gibbs import collar, empty_interaction, interacting_gap, random_interaction, volume_sites
from .models import ModelSpec, SpinConfig, vacant
from .spectra import SpectralReport, build_generator, expected_hitting_times, spectral_gap
from ..utils.helpers import parse_float_list
from ..utils.io import read_mapping, write_csv, write_mapping
from ..utils.logger import LoggerMixin

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INVALID = 2
EXIT_SOLVER = 3

_SQUARE_MODELS = ("north-east", "ne", "northeast", "spiral")


def build_model(descriptor: Mapping[str, Any], size: Optional[int], q: float,
                base_dir: Optional[Path] = None) -> ModelSpec:
    """
    由模型描述与网格点 (size, q) 构造模型

    size 的含义随模型而定: 一维模型为链长，North-East / Spiral 为正方形边长，
    binary-tree 为深度，FA 模型为边长 (维数由描述中的 d 给出，默认 1)，
    随机图描述为顶点数。描述中显式给出的体积参数优先。
    """
    data = dict(descriptor)
    data["q"] = q
    if "file" in data:
        path = Path(data.pop("file"))
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        loaded = read_mapping(path)
        loaded.update({k: v for k, v in data.items() if k != "name"})
        data = loaded
        base_dir = path.parent
    name = str(data.get("name", "")).strip().lower()

    explicit = any(k in data for k in ("n", "shape", "L", "depth", "rect", "tree"))
    if size is not None and not explicit:
        graph = data.get("graph")
        if isinstance(graph, Mapping):
            if "random" in graph and "n" not in graph["random"]:
                data["graph"] = dict(graph, random=dict(graph["random"], n=int(size)))
        elif name == "binary-tree":
            data["depth"] = int(size)
        elif name in _SQUARE_MODELS:
            data["shape"] = (int(size), int(size))
        elif name.startswith("fa"):
            data["shape"] = (int(size),) * int(data.pop("d", 1))
        else:
            data["n"] = int(size)
    return model_from_descriptor(data, base_dir)


@dataclass
class RunResult:
    """一次运行的结果"""
    subcommand: str
    exit_code: int
    columns: List[str]
    rows: List[Dict[str, Any]]
    csv_path: Optional[Path] = None
    manifest_path: Optional[Path] = None
    text: str = ""
    summary: Dict[str, Any] = field(default_factory=dict)
    timings: Dict[str, float] = field(default_factory=dict)


class ExperimentRunner(LoggerMixin):
    """
    实验运行器

    结果表只依赖于决定结果的配置部分与种子；工作进程数只影响速度。
    运行时间与时间戳写入旁路的 JSON 清单，不进入 CSV。
    """

    def __init__(self, config_manager: ConfigManager, out_path: Optional[Union[str, Path]] = None):
        """
        初始化实验运行器

        Args:
            config_manager: 已加载的配置管理器
            out_path: 输出 CSV 路径，None 表示使用配置中的 output.csv
        """
        self.config_manager = config_manager
        self.experiment: ExperimentConfig = config_manager.experiment()
        self.base_dir = config_manager.config_path.parent if config_manager.config_path else None
        self.out_path = Path(out_path) if out_path else Path(self.experiment.csv_path)
        self._timings: Dict[str, float] = {}

    # ------------------------------------------------------------------

    def run(self) -> RunResult:
        """
        执行配置中的子命令

        Returns:
            RunResult: exit_code 0 成功，1 检查未通过

        Raises:
            ConfigError: 未知子命令
            SolverError: 求解器未收敛
        """
        handlers: Dict[str, Callable[[], RunResult]] = {
            "gap": self.run_gap,
            "persistence": self.run_persistence,
            "bootstrap-scan": self.run_bootstrap_scan,
            "hitting": self.run_hitting,
            "gibbs-gap": self.run_gibbs_gap,
            "check": self.run_check,
        }
        handler = handlers.get(self.experiment.subcommand)
        if handler is None:
            raise ConfigError(None, f"未知的子命令: {self.experiment.subcommand}")

        self.logger.info(f"开始运行 {self.experiment.subcommand} (配置哈希 {self.config_manager.config_hash()[:12]})")
        start = time.perf_counter()
        result = handler()
        result.timings = dict(self._timings, total=time.perf_counter() - start)
        self._write(result)
        self.logger.info(f"{result.subcommand} 完成, {len(result.rows)} 行, 用时 {result.timings['total']:.2f}s")
        return result

    # ------------------------------------------------------------------
    # 共用

    def _grid(self) -> List[Tuple[Optional[int], float]]:
        sizes: Sequence[Optional[int]] = self.experiment.sizes or [None]
        return [(size, q) for size in sizes for q in self.experiment.q_values]

    def _model(self, size: Optional[int], q: float) -> ModelSpec:
        return build_model(self.experiment.model, size, q, self.base_dir)

    def _require_converged(self, report: SpectralReport, label: str) -> SpectralReport:
        if not report.converged:
            raise SolverError(report.method, f"{label}: 谱隙求解未收敛", report.residual)
        return report

    def _gap(self, model: ModelSpec) -> SpectralReport:
        exp = self.experiment
        gen = build_generator(model, exp.max_vertices)
        report = spectral_gap(gen, tolerance=exp.tolerance, dense_limit=exp.dense_limit, seed=exp.seed)
        return self._require_converged(report, model.name)

    def _tick(self, key: str, start: float) -> None:
        self._timings[key] = self._timings.get(key, 0.0) + time.perf_counter() - start

    # ------------------------------------------------------------------
    # 子命令

    def run_gap(self) -> RunResult:
        """谱隙扫描: 每个 (size, q) 一行"""
        rows = []
        for size, q in self._grid():
            start = time.perf_counter()
            model = self._model(size, q)
            report = self._gap(model)
            rows.append({
                "model": model.name, "size": size, "q": q, "n_vertices": model.n_vertices,
                "gap": report.gap, "relaxation_time": report.relaxation_time,
                "zero_multiplicity": report.zero_multiplicity,
                "components": len(report.component_sizes), "residual": report.residual,
                "method": report.method,
            })
            self._tick(f"size={size},q={q}", start)
        columns = ["model", "size", "q", "n_vertices", "gap", "relaxation_time",
                   "zero_multiplicity", "components", "residual", "method"]
        return RunResult("gap", EXIT_OK, columns, rows)

    def run_persistence(self) -> RunResult:
        """持续性曲线 F̂(t) 与上界 e^{-q·gap·t} + e^{-p·gap·t}"""
        exp = self.experiment
        rows = []
        for size, q in self._grid():
            start = time.perf_counter()
            model = self._model(size, q)
            try:
                gap = self._gap(model).gap
            except SizeCapError:
                self.logger.warning(f"{model.name}: |V| = {model.n_vertices} 超过精确谱上限，bound 列留空")
                gap = math.nan
            curve = persistence(model, exp.t_grid, exp.n_samples, exp.seed,
                                scheduler=exp.scheduler, workers=exp.workers)
            bound = persistence_upper_bound(q, gap, curve.t) if math.isfinite(gap) else np.full(curve.t.size, math.nan)
            single = two_state_persistence(q, curve.t)
            for i, t in enumerate(curve.t):
                rows.append({
                    "model": model.name, "size": size, "q": q, "t": float(t),
                    "F_hat": float(curve.F[i]), "F0": float(curve.F0[i]), "F1": float(curve.F1[i]),
                    "stderr": float(curve.stderr[i]), "bound": float(bound[i]),
                    "single_spin": float(single[i]), "gap": gap, "samples": curve.n_samples,
                })
            self._tick(f"size={size},q={q}", start)
        columns = ["model", "size", "q", "t", "F_hat", "F0", "F1", "stderr", "bound",
                   "single_spin", "gap", "samples"]
        return RunResult("persistence", EXIT_OK, columns, rows)

    def run_bootstrap_scan(self) -> RunResult:
        """自举阈值扫描，可附带有向渗流对照"""
        exp = self.experiment
        family = exp.bootstrap.get("family") or exp.model.get("name")
        q_grid = parse_float_list(exp.bootstrap.get("q_grid", exp.q_values))
        sizes = exp.sizes
        if not sizes:
            raise ConfigError(None, "bootstrap-scan 需要 grid.sizes")

        start = time.perf_counter()
        estimate = estimate_qbp(family, sizes, q_grid, exp.n_samples, exp.seed, exp.workers)
        self._tick("estimate", start)
        rows = estimate.rows()
        for row in rows:
            row["family"] = estimate.family
        summary: Dict[str, Any] = {"q_hat": estimate.q_hat, "interval": list(estimate.interval),
                                   "crossed": estimate.crossed}
        columns = ["family", "size", "q", "samples", "emptied_fraction", "stderr"]

        if exp.bootstrap.get("oracle") and estimate.family in ("north-east", "ne", "northeast"):
            start = time.perf_counter()
            oracle = oriented_percolation_oracle(sizes, q_grid, exp.n_samples, exp.seed)
            self._tick("oracle", start)
            for row in rows:
                frac, err = oracle.table[(row["size"], row["q"])]
                row["oracle_fraction"] = frac
                row["oracle_stderr"] = err
            columns += ["oracle_fraction", "oracle_stderr"]
            summary["oracle_q_hat"] = oracle.q_hat
            summary["oracle_interval"] = list(oracle.interval)
        text = f"q̂_bp = {estimate.q_hat:.4f}  区间 [{estimate.interval[0]:.4f}, {estimate.interval[1]:.4f}]"
        if "oracle_q_hat" in summary:
            text += f"  对照 {summary['oracle_q_hat']:.4f}"
        return RunResult("bootstrap-scan", EXIT_OK, columns, rows, text=text, summary=summary)

    def _hitting_model(self, size: Optional[int], q: float) -> ModelSpec:
        if size is None and str(self.experiment.model.get("name", "")).lower() == "east" \
                and len(self.experiment.model) == 1:
            return east_interval_for(q)
        return self._model(size, q)

    def run_hitting(self) -> RunResult:
        """
        击中时间实验: 原点第一次变为空位的时刻

        未给出 grid.sizes 的 East 模型使用区间 [0, ⌈1/q⌉]。可精确求解时同时给出线性方程的
        精确期望与下界 e^{-1}/gap。
        """
        exp = self.experiment
        rows = []
        for size, q in self._grid():
            start = time.perf_counter()
            model = self._hitting_model(size, q)
            target = vacant(model.origin)
            if exp.start == "equilibrium":
                initial: Union[SpinConfig, str] = "equilibrium"
            else:
                initial = SpinConfig.ones(model.n_vertices, model.measure.n_states)
            sample = hitting_time(model, initial, target, exp.n_samples, exp.seed, exp.t_cap,
                                  exp.scheduler, exp.workers)
            exact, gap = math.nan, math.nan
            try:
                gen = build_generator(model, exp.max_vertices)
                gap = self._require_converged(
                    spectral_gap(gen, tolerance=exp.tolerance, dense_limit=exp.dense_limit, seed=exp.seed),
                    model.name).gap
                h = expected_hitting_times(gen, target)
                if isinstance(initial, SpinConfig):
                    exact = float(h[initial.code])
                else:
                    exact = float(gen.mu @ h) if np.all(np.isfinite(h)) else math.inf
            except SizeCapError:
                self.logger.warning(f"{model.name}: 超过精确分析上限，exact 与 lower_bound 列留空")
            lower = math.exp(-1.0) / gap if 0 < gap < math.inf else math.nan
            rows.append({
                "model": model.name, "size": size, "q": q, "n_vertices": model.n_vertices,
                "start": exp.start, "samples": exp.n_samples, "mean": sample.mean,
                "stderr": sample.stderr, "censored_fraction": sample.censored_fraction,
                "reliable": sample.reliable, "t_cap": sample.t_cap, "exact": exact,
                "lower_bound": lower, "gap": gap,
            })
            self._tick(f"size={size},q={q}", start)
        columns = ["model", "size", "q", "n_vertices", "start", "samples", "mean", "stderr",
                   "censored_fraction", "reliable", "t_cap", "exact", "lower_bound", "gap"]
        return RunResult("hitting", EXIT_OK, columns, rows)

    def run_gibbs_gap(self) -> RunResult:
        """相互作用谱隙扫描: 每个范数上界 M 取若干随机 Φ，M = 0 行为无相互作用基准"""
        exp = self.experiment
        r = int(exp.gibbs.get("range", 2))
        bounds = parse_float_list(exp.gibbs.get("norm_bounds", [0.1]))
        count = int(exp.gibbs.get("n_interactions", 5))
        rows = []
        for size, q in self._grid():
            start = time.perf_counter()
            model = self._model(size, q)
            sites = volume_sites(model.graph)
            region = list(sites) + list(collar(sites, r))
            cases = [(0.0, 0, empty_interaction(r))]
            for k, m in enumerate(bounds):
                cases += [(m, i, random_interaction(region, r, m, exp.seed, key=1000 * k + i))
                          for i in range(count)]
            for m, i, phi in cases:
                report = self._require_converged(
                    interacting_gap(model, phi, tolerance=exp.tolerance, dense_limit=exp.dense_limit,
                                    seed=exp.seed, max_vertices=exp.max_vertices),
                    f"{model.name}+Φ")
                rows.append({
                    "model": model.name, "size": size, "q": q, "range": r, "norm_bound": m,
                    "interaction": i, "norm": phi.norm, "gap": report.gap,
                    "residual": report.residual, "method": report.method,
                })
            self._tick(f"size={size},q={q}", start)
        columns = ["model", "size", "q", "range", "norm_bound", "interaction", "norm", "gap",
                   "residual", "method"]
        return RunResult("gibbs-gap", EXIT_OK, columns, rows)

    def run_check(self) -> RunResult:
        """不等式检查套件；任一检查失败时退出码为 1"""
        exp = self.experiment
        report = run_check_suite(exp.profile, exp.seed, exp.workers)
        rows = []
        for result in report.results:
            row = result.to_row()
            self._timings[result.name] = row.pop("runtime")
            rows.append(row)
        code = EXIT_OK if report.passed else EXIT_CHECK_FAILED
        if code:
            self.logger.error(f"{len(report.failures)} 项检查未通过: "
                              f"{', '.join(r.name for r in report.failures)}")
        return RunResult("check", code, ["check", "status", "value", "bound", "detail"], rows,
                         text=report.to_text(), summary={"passed": report.passed})

    # ------------------------------------------------------------------
    # 输出

    def manifest(self, result: RunResult) -> Dict[str, Any]:
        """CSV 清单头: 只含决定结果的内容"""
        manifest = {
            "version": __version__,
            "config_hash": self.config_manager.config_hash(),
            "config": self.config_manager.result_config(),
            "subcommand": result.subcommand,
        }
        if result.summary:
            manifest["summary"] = result.summary
        return manifest

    def _write(self, result: RunResult) -> None:
        manifest = self.manifest(result)
        result.csv_path = write_csv(self.out_path, result.columns, result.rows, manifest)
        self.logger.info(f"结果已写入: {result.csv_path}")
        if self.experiment.write_manifest:
            sidecar = dict(manifest, exit_code=result.exit_code, timings=result.timings,
                           created=datetime.now().isoformat(timespec="seconds"),
                           workers=self.experiment.workers)
            result.manifest_path = write_mapping(Path(str(self.out_path) + ".json"), sidecar)
