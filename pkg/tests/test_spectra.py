#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Spectra 测试脚本

测试生成元组装、遍历分支、谱隙、Dirichlet 特征值与精确观测量。
"""

import math

import numpy as np
import pytest

from kcsm_lab.core.catalog import catalog
from kcsm_lab.core.dynamics import two_state_persistence
from kcsm_lab.core.exceptions import PreconditionError, SizeCapError, SolverError
from kcsm_lab.core.models import SpinConfig, custom_model, vacant
from kcsm_lab.core.spectra import (
    SpectralReport,
    build_generator,
    check_domination_gap,
    check_size,
    dirichlet_eigenvalue,
    east_scaling_ratio,
    exact_persistence,
    expected_hitting_times,
    fit_gap_exponent,
    gap_plus,
    model_gap,
    random_test_functions,
    spectral_gap,
    spectrum,
    variance,
    variance_decay,
    variational_ratio,
    zero_multiplicity,
)
from kcsm_lab.core.topology import path_graph


def test_single_spin_generator():
    """测试单个无约束自旋的生成元"""
    q = 0.3
    gen = build_generator(catalog("east", n=1, q=q))
    dense = gen.matrix.toarray()
    assert dense[1, 0] == pytest.approx(q)
    assert dense[0, 1] == pytest.approx(1 - q)
    assert gen.mu == pytest.approx([q, 1 - q])

    report = spectral_gap(gen)
    assert report.gap == pytest.approx(1.0)
    assert report.converged
    assert report.relaxation_time == pytest.approx(1.0)

    assert dirichlet_eigenvalue(gen, vacant(0)) == pytest.approx(q)
    hit = expected_hitting_times(gen, vacant(0))
    assert hit[0] == 0.0
    assert hit[1] == pytest.approx(1 / q)

    t = [0.0, 0.5, 1.0, 3.0]
    curve = exact_persistence(gen, t)
    assert curve.exact
    assert curve.F == pytest.approx(two_state_persistence(q, t))


def test_east_two_sites_transitions():
    """测试 East 两点: 全占据构型只能由最右端翻转离开"""
    gen = build_generator(catalog("east", n=2, q=0.5))
    row = gen.matrix.getrow(SpinConfig.ones(2).code)
    assert set(row.indices) == {1, 3}
    assert gen.row_sum_residual() <= 1e-12
    assert gen.detailed_balance_residual() <= 1e-12


def test_reducible_chain():
    """测试无边界 FA-1f: 全占据构型是孤立分支"""
    gen = build_generator(catalog("fa-1f", n=4, q=0.5, boundary="none"))
    assert len(gen.components) == 2
    assert [len(c) for c in gen.components] == [15, 1]

    report = spectral_gap(gen)
    assert report.gap == 0.0
    assert report.zero_multiplicity == 2
    assert report.method == "reducible"
    assert math.isinf(report.relaxation_time)
    assert zero_multiplicity(spectrum(gen)) == 2

    assert math.isinf(spectral_gap(gen, component=[15]).gap)
    inner = spectral_gap(gen, component=gen.components[0])
    assert inner.gap > 0
    with pytest.raises(PreconditionError):
        spectral_gap(gen, component=[0, 15])

    hit = expected_hitting_times(gen, vacant(0))
    assert math.isinf(hit[15])
    assert np.all(np.isfinite(hit[:15]))


def test_all_constrained_generator_is_zero():
    """测试约束恒为 0 时生成元为零矩阵"""
    gen = build_generator(custom_model(path_graph(3), [[], [], []], q=0.5))
    assert gen.nnz == 0
    assert len(gen.components) == 8


def test_gap_plus_small_example():
    """测试 Ω⁺ 上的谱隙"""
    report = gap_plus(catalog("fa-1f", n=2, q=0.5, boundary="none"))
    assert report.gap == pytest.approx(0.5)
    assert report.n_states == 3
    assert report.extras["mu_plus"] == pytest.approx(0.75)

    with pytest.raises(PreconditionError):
        gap_plus(catalog("north-east", shape=(2, 2), boundary="none"))


def test_east_gap_nonincreasing_in_length():
    """测试 East 谱隙随长度不增"""
    gaps = [model_gap(catalog("east", n=n, q=0.5)).gap for n in range(1, 8)]
    assert all(g > 0 for g in gaps)
    assert all(b <= a + 1e-10 for a, b in zip(gaps, gaps[1:]))


def test_size_cap():
    """测试精确分析的规模上限"""
    with pytest.raises(SizeCapError):
        build_generator(catalog("east", n=25))
    with pytest.raises(SizeCapError):
        check_size(5, max_vertices=4)
    check_size(5)


def test_lanczos_matches_dense():
    """测试 Lanczos 求解器与稠密求解器给出相同谱隙"""
    model = catalog("east", n=6, q=0.4)
    dense = model_gap(model)
    sparse_report = model_gap(model, dense_limit=8)
    assert dense.method == "dense"
    assert sparse_report.method == "lanczos"
    assert sparse_report.gap == pytest.approx(dense.gap, abs=1e-6)


def test_variational_consistency():
    """测试 D(f)/Var(f) 不小于谱隙，方差按谱隙指数衰减"""
    gen = build_generator(catalog("fa-1f", shape=(2, 2), q=0.4))
    gap = spectral_gap(gen).gap
    t = [0.0, 0.5, 1.0, 2.0]
    for f in random_test_functions(gen.size, 5, seed=3):
        assert variational_ratio(gen, f) >= gap - 1e-9
        decay = variance_decay(gen, f, t)
        assert decay[0] == pytest.approx(variance(gen, f))
        bound = np.exp(-2 * gap * np.asarray(t)) * variance(gen, f)
        assert np.all(decay <= bound + 1e-9)

    with pytest.raises(PreconditionError):
        variational_ratio(gen, np.ones(gen.size))


def test_dirichlet_eigenvalue_validation():
    """测试 Dirichlet 特征值的目标集合校验"""
    gen = build_generator(catalog("east", n=3, q=0.5))
    with pytest.raises(PreconditionError):
        dirichlet_eigenvalue(gen, np.zeros(gen.size, dtype=bool))
    with pytest.raises(PreconditionError):
        dirichlet_eigenvalue(gen, np.ones(gen.size, dtype=bool))
    by_callable = dirichlet_eigenvalue(gen, lambda cfg: cfg[0] == 0)
    assert by_callable == pytest.approx(dirichlet_eigenvalue(gen, vacant(0)))


def test_exact_persistence_decomposition():
    """测试精确持续性的分解与单调性"""
    gen = build_generator(catalog("east", n=4, q=0.3))
    curve = exact_persistence(gen, [0.0, 1.0, 2.0, 5.0, 10.0])
    assert curve.F[0] == pytest.approx(1.0)
    assert curve.F0[0] == pytest.approx(0.3)
    assert np.all(np.diff(curve.F) <= 1e-12)
    assert np.allclose(curve.F0 + curve.F1, curve.F)


def test_domination_gap_comparison():
    """测试支配关系下的谱隙比较"""
    fa = catalog("fa-1f", n=5, q=0.4)
    east = catalog("east", n=5, q=0.4)
    report = check_domination_gap(fa, east)
    assert report
    assert report.gap_b <= report.gap_a + 1e-9

    with pytest.raises(PreconditionError):
        check_domination_gap(east, fa)


def test_domination_gap_requires_converged(monkeypatch):
    """测试谱隙未收敛时不做支配比较"""
    def unconverged(gen, **kwargs):
        return SpectralReport(0.1, 1, (gen.size,), residual=1.0, converged=False,
                              method="lanczos", n_states=gen.size)

    monkeypatch.setattr("kcsm_lab.core.spectra.spectral_gap", unconverged)
    with pytest.raises(SolverError):
        check_domination_gap(catalog("fa-1f", n=4, q=0.4), catalog("east", n=4, q=0.4))


def test_trend_helpers():
    """测试渐近趋势的拟合工具"""
    qs = [0.1, 0.2, 0.3, 0.4]
    exponent, constant = fit_gap_exponent(qs, [2.0 * q ** 3 for q in qs])
    assert exponent == pytest.approx(3.0)
    assert constant == pytest.approx(2.0)
    assert east_scaling_ratio(0.5, 0.25) == pytest.approx(2 / math.log(2))

    with pytest.raises(PreconditionError):
        fit_gap_exponent([0.1], [0.5])


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
