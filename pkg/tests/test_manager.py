#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Experiment Runner 测试脚本

测试模型描述到模型的构造、各子命令的结果表与输出清单。
"""

import json

import pytest

from kcsm_lab.core.config import ConfigManager
from kcsm_lab.core.exceptions import ConfigError
from kcsm_lab.core.manager import EXIT_OK, ExperimentRunner, build_model
from kcsm_lab.core.catalog import catalog
from kcsm_lab.core.spectra import model_gap
from kcsm_lab.utils.io import read_csv


def _runner(tmp_path, overrides, name="out.csv"):
    manager = ConfigManager()
    manager.apply_overrides(overrides)
    return manager, ExperimentRunner(manager, out_path=tmp_path / name)


def test_build_model_sizes():
    """测试网格大小在不同模型上的含义"""
    assert build_model({"name": "east"}, 5, 0.5).n_vertices == 5
    assert build_model({"name": "north-east"}, 3, 0.5).n_vertices == 9
    assert build_model({"name": "fa-1f", "d": 2}, 3, 0.5).n_vertices == 9
    assert build_model({"name": "binary-tree"}, 2, 0.5).n_vertices == 7
    random_graph = build_model({"name": "fa-1f", "graph": {"random": {"p": 0.5, "seed": 1}}}, 6, 0.4)
    assert random_graph.n_vertices == 6
    # 描述中显式的体积优先
    assert build_model({"name": "east", "n": 4}, 9, 0.5).n_vertices == 4
    assert build_model({"name": "east"}, 5, 0.3).measure.q == pytest.approx(0.3)


def test_build_model_from_file(tmp_path):
    """测试引用模型描述文件"""
    (tmp_path / "model.json").write_text(json.dumps({"name": "fa-2f", "boundary": "maximal"}),
                                         encoding="utf-8")
    model = build_model({"file": "model.json"}, 2, 0.5, base_dir=tmp_path)
    assert model.name == "fa-2f"
    assert model.n_vertices == 2


def test_gap_run_and_manifest(tmp_path):
    """测试 gap 运行与清单"""
    manager, runner = _runner(tmp_path, {
        "experiment.subcommand": "gap", "model": {"name": "east"},
        "grid.sizes": "3,4", "grid.q": [0.3, 0.5],
    })
    result = runner.run()
    assert result.exit_code == EXIT_OK
    assert len(result.rows) == 4
    assert result.rows[0]["gap"] == pytest.approx(model_gap(catalog("east", n=3, q=0.3)).gap)

    manifest, rows = read_csv(result.csv_path)
    assert manifest["config_hash"] == manager.config_hash()
    assert manifest["config"]["model"] == {"name": "east"}
    assert "output" not in manifest["config"]
    assert [r["size"] for r in rows] == ["3", "3", "4", "4"]
    assert result.manifest_path.exists()


def test_bootstrap_scan_with_oracle(tmp_path):
    """测试阈值扫描与有向渗流对照列"""
    _, runner = _runner(tmp_path, {
        "experiment.subcommand": "bootstrap-scan", "sampling.seed": 2, "sampling.n_samples": 20,
        "grid.sizes": [6], "bootstrap.q_grid": "0.2:0.5:4",
    })
    result = runner.run()
    assert "oracle_fraction" in result.columns
    assert len(result.rows) == 4
    assert 0.2 <= result.summary["q_hat"] <= 1.0
    assert result.text.startswith("q̂_bp")

    _, empty = _runner(tmp_path, {
        "experiment.subcommand": "bootstrap-scan", "sampling.seed": 2, "grid.sizes": [],
    })
    with pytest.raises(ConfigError):
        empty.run()


def test_hitting_on_east_interval(tmp_path):
    """测试未给出大小时 East 使用区间 [0, ⌈1/q⌉]"""
    _, runner = _runner(tmp_path, {
        "experiment.subcommand": "hitting", "model": {"name": "east"}, "sampling.seed": 5,
        "sampling.n_samples": 200, "grid.sizes": [], "grid.q": [0.5],
    })
    result = runner.run()
    row = result.rows[0]
    assert row["n_vertices"] == 3
    assert row["exact"] >= row["lower_bound"]
    assert row["mean"] == pytest.approx(row["exact"], abs=4 * row["stderr"])


def test_gibbs_gap_run(tmp_path):
    """测试相互作用谱隙扫描: M = 0 行等于无相互作用谱隙"""
    _, runner = _runner(tmp_path, {
        "experiment.subcommand": "gibbs-gap", "model": {"name": "north-east"}, "sampling.seed": 1,
        "grid.sizes": [2], "grid.q": [0.5], "gibbs.norm_bounds": [0.1], "gibbs.n_interactions": 2,
    })
    result = runner.run()
    assert len(result.rows) == 3
    baseline = result.rows[0]
    assert baseline["norm_bound"] == 0.0
    assert baseline["gap"] == pytest.approx(model_gap(catalog("north-east", shape=(2, 2), q=0.5)).gap)
    assert all(r["norm"] <= 0.1 + 1e-12 for r in result.rows)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
