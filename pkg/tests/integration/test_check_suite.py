#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
检查套件集成测试

运行 quick 规模的不等式检查，以及 check 子命令的退出码与结果表。
"""

import pytest

from kcsm_lab.cli import main
from kcsm_lab.core.checks import CHECKS, PROFILES, CheckResult, CheckReport, run_check_suite
from kcsm_lab.core.exceptions import ConfigError
from kcsm_lab.utils.io import read_csv


def test_profiles_share_keys():
    """测试 quick 与 full 两种规模提供相同的参数"""
    assert set(PROFILES) == {"quick", "full"}
    assert set(PROFILES["quick"]) == set(PROFILES["full"])


def test_unknown_profile():
    """测试未知的检查规模"""
    with pytest.raises(ConfigError):
        run_check_suite("medium", 0)


def test_only_filter():
    """测试只运行部分检查"""
    report = run_check_suite("quick", 0, only=["east_monotone", "dirichlet"])
    assert [r.name for r in report.results] == ["dirichlet_eigenvalue", "east_gap_monotone"]
    assert report.passed
    assert all(r.runtime >= 0.0 for r in report.results)
    assert report.to_text().splitlines()[-1].startswith("2/2")


def test_report_status():
    """测试报告项不计入失败"""
    report = CheckReport("quick", 0, [CheckResult("a", True), CheckResult("b", None),
                                       CheckResult("c", False, detail="x")])
    assert not report.passed
    assert [r.name for r in report.failures] == ["c"]
    assert [row["status"] for row in report.rows()] == ["pass", "report", "FAIL"]


@pytest.mark.slow
def test_quick_suite_passes():
    """测试 quick 规模的全部检查通过"""
    report = run_check_suite("quick", 0)
    assert len(report.results) == len(CHECKS)
    assert report.passed, report.to_text()


@pytest.mark.slow
def test_check_command(tmp_path):
    """测试 check 子命令不需要种子，通过时退出码为 0"""
    out = tmp_path / "check.csv"
    assert main(["check", "--profile", "quick", "--out", str(out)]) == 0
    manifest, rows = read_csv(out)
    assert manifest["subcommand"] == "check"
    assert len(rows) == len(CHECKS)
    assert all(r["status"] in ("pass", "report") for r in rows)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
