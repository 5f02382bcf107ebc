#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Dynamics 测试脚本

测试热浴动力学模拟、平衡态抽样、持续性函数与击中时间。
"""

import numpy as np
import pytest

from kcsm_lab.core.catalog import catalog
from kcsm_lab.core.dynamics import (
    FLAG_CHANGED,
    FLAG_LEGAL,
    Trajectory,
    hitting_time,
    persistence,
    persistence_upper_bound,
    sample_equilibrium,
    simulate,
    two_state_persistence,
)
from kcsm_lab.core.exceptions import PreconditionError, SchedulerNotSupportedError
from kcsm_lab.core.models import SiteMeasure, SpinConfig, custom_model, vacant
from kcsm_lab.core.spectra import model_gap
from kcsm_lab.core.topology import path_graph


def test_all_constrained_model_is_frozen():
    """测试约束恒为 0 时构型不变"""
    model = custom_model(path_graph(3), [[], [], []], q=0.5)
    start = SpinConfig.from_values([1, 0, 1])
    traj = simulate(model, start, 20.0, seed=1)
    assert traj.final == start
    assert traj.n_events > 0
    assert traj.n_applied == 0
    assert np.all(traj.events["flags"] == 0)


def test_single_spin_clock_rate():
    """测试单个无约束自旋的响铃间隔均值为 1"""
    model = catalog("east", n=1, q=0.4)
    for scheduler in ("event-queue", "uniformization"):
        traj = simulate(model, SpinConfig.ones(1), 2000.0, seed=5, scheduler=scheduler)
        assert np.all(traj.events["flags"] & FLAG_LEGAL)
        gaps = np.diff(np.concatenate([[0.0], traj.events["time"]]))
        assert gaps.mean() == pytest.approx(1.0, abs=4 / np.sqrt(len(gaps)))
        changed = traj.events["flags"] & FLAG_CHANGED
        assert len(traj.events) == traj.n_events
        assert traj.n_applied == int(np.count_nonzero(changed))


def test_east_two_sites_respects_constraint():
    """测试 East 两点: 顶点 0 只有在顶点 1 变空之后才可能被更新"""
    model = catalog("east", n=2, q=0.5)
    traj = simulate(model, SpinConfig.ones(2), 50.0, seed=3)
    events = traj.events
    first_change = events[(events["vertex"] == 1) & (events["flags"] & FLAG_CHANGED > 0)]
    assert len(first_change) > 0
    t1 = first_change["time"][0]
    legal_at_0 = events[(events["vertex"] == 0) & (events["flags"] & FLAG_LEGAL > 0)]
    assert np.all(legal_at_0["time"] > t1)


def test_trajectory_replay_and_reproducibility(tmp_path):
    """测试轨迹重放、落盘与种子可复现"""
    model = catalog("fa-1f", n=6, q=0.4)
    start = sample_equilibrium(model.measure, 6, seed=2)
    traj = simulate(model, start, 30.0, seed=7, replica=1)
    assert traj.replay() == traj.final
    assert traj.config_at(0.0) == start

    again = simulate(model, start, 30.0, seed=7, replica=1)
    assert np.array_equal(traj.events, again.events)
    other = simulate(model, start, 30.0, seed=7, replica=2)
    assert not np.array_equal(traj.events["time"][:5], other.events["time"][:5])

    path = traj.dump(tmp_path / "run.events")
    loaded = Trajectory.load(path)
    assert loaded.final == traj.final
    assert np.array_equal(loaded.events, traj.events)
    assert loaded.seed == 7 and loaded.replica == 1


def test_simulate_validation():
    """测试模拟参数校验"""
    model = catalog("east", n=3)
    with pytest.raises(PreconditionError):
        simulate(model, SpinConfig.ones(3), -1.0, seed=0)
    with pytest.raises(PreconditionError):
        simulate(model, SpinConfig.ones(4), 1.0, seed=0)
    with pytest.raises(SchedulerNotSupportedError):
        simulate(model, SpinConfig.ones(3), 1.0, seed=0, scheduler="gillespie")


def test_simulate_stops_at_target():
    """测试到达目标集合时提前停止"""
    model = catalog("east", n=1, q=0.5)
    traj = simulate(model, SpinConfig.ones(1), 1000.0, seed=4, target=vacant(0))
    assert traj.stopped_at is not None
    assert traj.final == SpinConfig.zeros(1)


def test_sample_equilibrium():
    """测试乘积测度抽样，包括退化密度"""
    assert sample_equilibrium(1.0, 50, seed=0) == SpinConfig.zeros(50)
    assert sample_equilibrium(0.0, 50, seed=0) == SpinConfig.ones(50)

    n = 10_000
    for q, source in ((0.5, 0.5), (0.3, SiteMeasure.bernoulli(0.3))):
        cfg = sample_equilibrium(source, n, seed=9)
        vacancy = 1.0 - np.mean(cfg.values())
        assert vacancy == pytest.approx(q, abs=4 * np.sqrt(q * (1 - q) / n))

    with pytest.raises(PreconditionError):
        sample_equilibrium(1.5, 10, seed=0)


def test_persistence_shape():
    """测试持续性曲线: F(0) = 1、单调不增、F = F0 + F1"""
    model = catalog("fa-1f", n=5, q=0.5)
    curve = persistence(model, [0.0, 0.5, 1.0, 2.0, 5.0], n_samples=300, seed=1, workers=1)
    assert curve.F[0] == 1.0
    assert np.all(np.diff(curve.F) <= 0)
    assert np.allclose(curve.F0 + curve.F1, curve.F)
    assert len(curve.rows()) == 5


def test_persistence_single_spin_matches_formula():
    """测试单个自旋的持续性与 p e^{-qt} + q e^{-pt} 一致"""
    q = 0.3
    model = catalog("east", n=1, q=q)
    t = [0.0, 0.5, 1.0, 2.0, 4.0]
    curve = persistence(model, t, n_samples=4000, seed=2, workers=1)
    exact = two_state_persistence(q, t)
    tolerance = 4 * np.maximum(curve.stderr, 1 / 4000)
    assert np.all(np.abs(curve.F - exact) <= tolerance)


def test_persistence_below_gap_bound():
    """测试 East 持续性不超过由谱隙给出的上界"""
    q = 0.5
    model = catalog("east", n=8, q=q)
    gap = model_gap(model).gap
    t = np.array([0.0, 1.0, 2.0, 4.0, 8.0])
    curve = persistence(model, t, n_samples=800, seed=3, workers=1)
    bound = persistence_upper_bound(q, gap, t)
    assert np.all(curve.F <= bound + 3 * curve.stderr + 1e-12)


def test_persistence_validation():
    """测试持续性参数校验"""
    model = catalog("east", n=3)
    with pytest.raises(PreconditionError):
        persistence(model, [], n_samples=10, seed=0)
    with pytest.raises(PreconditionError):
        persistence(model, [-1.0, 1.0], n_samples=10, seed=0)
    with pytest.raises(PreconditionError):
        persistence(model, [1.0], n_samples=0, seed=0)


def test_hitting_time_start_in_target():
    """测试起点已在目标集合中时击中时间为 0"""
    model = catalog("east", n=3, q=0.5)
    sample = hitting_time(model, SpinConfig.zeros(3), vacant(0), n_samples=5, seed=0, workers=1)
    assert sample.mean == 0.0
    assert sample.censored_fraction == 0.0


def test_hitting_time_single_spin():
    """测试单个自旋的击中时间均值为 1/q"""
    q = 0.5
    model = catalog("east", n=1, q=q)
    sample = hitting_time(model, SpinConfig.ones(1), vacant(0), n_samples=2000, seed=6, workers=1)
    assert sample.reliable
    assert sample.mean == pytest.approx(1 / q, abs=4 * sample.stderr)


def test_hitting_time_censoring():
    """测试全部截断时样本不可靠"""
    model = custom_model(path_graph(2), [[], []], q=0.5)
    sample = hitting_time(model, SpinConfig.ones(2), vacant(0), n_samples=10, seed=0,
                          t_cap=1.0, workers=1)
    assert not sample.reliable
    assert sample.censored_fraction == 1.0
    assert sample.mean == 1.0
    assert sample.to_dict()["t_cap"] == 1.0


def test_hitting_time_predicate_target():
    """测试以任意谓词为目标"""
    model = catalog("east", n=3, q=0.5)
    sample = hitting_time(model, "equilibrium", lambda cfg: cfg.code == 0,
                          n_samples=20, seed=1, t_cap=500.0, workers=2)
    assert sample.n_samples == 20
    assert sample.reliable

    with pytest.raises(PreconditionError):
        hitting_time(model, "stationary", vacant(0), n_samples=1, seed=0)
    with pytest.raises(PreconditionError):
        hitting_time(model, SpinConfig.ones(3), vacant(0), n_samples=0, seed=0)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
