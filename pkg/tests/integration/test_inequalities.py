#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
单项不等式检查的集成测试 (quick 规模)
"""

import numpy as np
import pytest

from kcsm_lab.core import checks
from kcsm_lab.core.dynamics import FLAG_CHANGED, FLAG_LEGAL, Trajectory
from kcsm_lab.core.exceptions import SolverError
from kcsm_lab.core.models import SpinConfig
from kcsm_lab.core.spectra import SpectralReport
from kcsm_lab.utils.io import EVENT_DTYPE

QUICK = checks.PROFILES["quick"]


@pytest.mark.parametrize("check", [
    checks.check_generator,
    checks.check_components,
    checks.check_dirichlet,
    checks.check_domination,
    checks.check_east_monotone,
    checks.check_tree_split,
    checks.check_gap_plus,
])
def test_exact_inequalities(check):
    """测试精确谱计算上的不等式"""
    result = check(QUICK, 0)
    assert result.passed, result.detail


@pytest.mark.slow
@pytest.mark.parametrize("check", [
    checks.check_persistence,
    checks.check_single_spin,
    checks.check_hitting,
    checks.check_stationarity,
])
def test_sampled_inequalities(check):
    """测试基于模拟的检查"""
    result = check(QUICK, 1)
    assert result.passed, result.detail


@pytest.mark.slow
def test_bootstrap_threshold():
    """测试 North-East 阈值估计与有向渗流对照一致"""
    result = checks.check_bootstrap(QUICK, 0, workers=1)
    assert result.passed, result.detail
    assert result.value <= 0.03


@pytest.mark.slow
def test_gibbs_checks():
    """测试相互作用模型的各项性质"""
    result = checks.check_gibbs(QUICK, 0)
    assert result.passed, result.detail


def test_asymptotics_is_report_only():
    """测试渐近拟合只报告不判定"""
    result = checks.report_asymptotics(QUICK, 0)
    assert result.passed is None
    assert result.bound == 3.0


def test_vacancy_time_average():
    """测试空位比例的时间平均只计入状态改变的事件"""
    changed = FLAG_LEGAL | FLAG_CHANGED
    events = np.array([(1.0, 0, 0, changed), (2.0, 0, 0, FLAG_LEGAL), (3.0, 1, 1, changed),
                       (4.5, 0, 1, changed)], dtype=EVENT_DTYPE)
    trajectory = Trajectory("east", SpinConfig.from_values([1, 0]), events,
                            SpinConfig.from_values([1, 1]), 5.0, 0, 0, "event-queue")
    # [0,1): 1 个空位, [1,3): 2 个, [3,4): 1 个
    assert checks.vacancy_time_average(trajectory, 4.0) == pytest.approx(6.0 / 8.0)


def test_unconverged_gap_is_not_compared(monkeypatch):
    """测试谱隙未收敛时检查以求解器错误终止"""
    def unconverged(model, **kwargs):
        return SpectralReport(0.1, 1, (2,), residual=1.0, converged=False, method="lanczos")

    monkeypatch.setattr("kcsm_lab.core.checks.model_gap", unconverged)
    with pytest.raises(SolverError):
        checks.check_east_monotone(QUICK, 0)
    with pytest.raises(SolverError):
        checks.run_check_suite("quick", 0, only=["east_monotone"])


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
