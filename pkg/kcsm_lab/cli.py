#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
KCSM Lab Command Line

命令行入口 `kcsm-lab`：读取实验配置，命令行参数覆盖配置字段，运行子命令。

退出码: 0 成功；1 检查未通过；2 配置、模型或规模校验失败；3 求解器失败。

示例:
    kcsm-lab gap --model east --n 2..10 --q 0.5
    kcsm-lab persistence --model east --n 8 --q 0.5 --seed 1 --out persistence.csv
    kcsm-lab check --profile quick
    kcsm-lab --config experiments/east_gap.yaml
"""

import argparse
import sys
from typing import Any, Dict, List, Optional

from . import __version__
from .core.config import PROFILES, SUBCOMMANDS, ConfigManager
from .core.exceptions import KcsmLabError, SolverError
from .core.manager import EXIT_INVALID, EXIT_SOLVER, ExperimentRunner
from .utils.logger import get_logger, setup_logging

logger = get_logger("cli")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kcsm-lab",
        description="动力学约束自旋模型实验室: 精确谱隙、蒙特卡罗动力学、自举渗流与不等式检查",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("command", nargs="?", choices=SUBCOMMANDS,
                        help="子命令 (缺省时使用配置文件中的 experiment.subcommand)")
    parser.add_argument("--config", help="实验配置文件 (JSON 或 YAML)")
    parser.add_argument("--model", help="目录中的模型名称，如 east, fa-1f, north-east")
    parser.add_argument("--n", dest="sizes", help="体积大小，支持 '2..10' 与 '4,6,8'")
    parser.add_argument("--q", help="空位密度，支持 '0.3,0.5' 与 '0.1:0.6:26'")
    parser.add_argument("--samples", type=int, help="样本数")
    parser.add_argument("--seed", type=int, help="随机种子 (随机子命令必需)")
    parser.add_argument("--t-grid", help="时间网格，如 '0:20:11'")
    parser.add_argument("--t-cap", type=float, help="击中时间的截断时刻")
    parser.add_argument("--start", choices=("ones", "equilibrium"), help="击中时间的初始构型")
    parser.add_argument("--scheduler", help="时钟后端: event-queue 或 uniformization")
    parser.add_argument("--tolerance", type=float, help="谱求解的相对残差容差")
    parser.add_argument("--max-vertices", type=int, help="精确分析的顶点上限 (≤ 24)")
    parser.add_argument("--profile", choices=PROFILES, help="check 子命令的规模")
    parser.add_argument("--out", help="输出 CSV 路径")
    parser.add_argument("--workers", help="工作进程数 ('auto' 使用物理核心数)，不影响结果")
    parser.add_argument("--log-level", default=None, help="日志级别 (DEBUG, INFO, WARNING, ERROR)")
    parser.add_argument("--log-file", help="日志文件")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return parser


def overrides_from_args(args: argparse.Namespace) -> Dict[str, Any]:
    """把命令行参数映射为点号键的配置覆盖"""
    overrides: Dict[str, Any] = {
        "experiment.subcommand": args.command,
        "grid.sizes": args.sizes,
        "grid.q": args.q,
        "sampling.n_samples": args.samples,
        "sampling.seed": args.seed,
        "sampling.t_grid": args.t_grid,
        "sampling.t_cap": args.t_cap,
        "sampling.start": args.start,
        "sampling.scheduler": args.scheduler,
        "solver.tolerance": args.tolerance,
        "solver.max_vertices": args.max_vertices,
        "check.profile": args.profile,
        "output.csv": args.out,
        "parallel.workers": args.workers,
    }
    if args.model:
        overrides["model"] = {"name": args.model}
    if args.command == "bootstrap-scan":
        # 阈值扫描读取 bootstrap 节
        overrides["bootstrap.family"] = args.model
        overrides["bootstrap.q_grid"] = args.q
    return overrides


def main(argv: Optional[List[str]] = None) -> int:
    """
    命令行主函数

    Args:
        argv: 参数列表，None 表示 sys.argv[1:]

    Returns:
        int: 退出码
    """
    args = build_parser().parse_args(argv)
    try:
        manager = ConfigManager(args.config)
        manager.load_config()
        setup_logging(
            level=args.log_level or manager.get("logging.level", "INFO"),
            log_file=args.log_file or manager.get("logging.log_file"),
            enable_color=bool(manager.get("logging.enable_color", True)),
        )
        manager.apply_overrides(overrides_from_args(args))
        result = ExperimentRunner(manager).run()
    except SolverError as e:
        logger.error(str(e))
        print(f"求解器失败: {e}", file=sys.stderr)
        return EXIT_SOLVER
    except KcsmLabError as e:
        logger.error(str(e))
        print(f"错误: {e}", file=sys.stderr)
        return EXIT_INVALID

    if result.text:
        print(result.text)
    print(f"结果: {result.csv_path}")
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
