#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Models 测试脚本

测试单点测度、自旋构型、约束函数求值与支配关系。
"""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kcsm_lab.core.catalog import catalog
from kcsm_lab.core.exceptions import ModelSpecError, PreconditionError
from kcsm_lab.core.models import (
    BoundaryMode,
    ConstraintHolds,
    GoodTable,
    SiteMeasure,
    SpinConfig,
    constraint,
    custom_model,
    dominates,
    free_vertices,
    vacant,
)
from kcsm_lab.core.topology import Rectangle, lattice, path_graph


def test_site_measure_bernoulli():
    """测试 0-1 单点测度"""
    nu = SiteMeasure.bernoulli(0.3)
    assert nu.states == (0, 1)
    assert nu.probabilities == pytest.approx((0.3, 0.7))
    assert nu.q == pytest.approx(0.3)
    assert nu.p == pytest.approx(0.7)
    assert nu.is_binary
    assert nu.good_mask == (True, False)
    assert nu.state_from_uniform(0.1) == 0
    assert nu.state_from_uniform(0.5) == 1

    for q in (0.0, 1.0, -0.2, 1.5):
        with pytest.raises(ModelSpecError):
            SiteMeasure.bernoulli(q)


def test_site_measure_validation():
    """测试一般单点测度的校验"""
    nu = SiteMeasure((0, 1, 2), (0.2, 0.3, 0.5), frozenset({0, 1}))
    assert nu.n_states == 3
    assert nu.q == pytest.approx(0.5)
    assert not nu.is_binary

    with pytest.raises(ModelSpecError):
        SiteMeasure((0, 1), (0.5, 0.6), frozenset({0}))
    with pytest.raises(ModelSpecError):
        SiteMeasure((0, 1), (1.0, 0.0), frozenset({0}))
    with pytest.raises(ModelSpecError):
        SiteMeasure((0, 1), (0.5, 0.5), frozenset())


def test_spin_config_packing():
    """测试构型编码: 第 x 位为 1 表示占据"""
    cfg = SpinConfig.from_values([1, 0, 1, 1])
    assert cfg.code == 0b1101
    assert cfg.values() == (1, 0, 1, 1)
    assert cfg[1] == 0
    assert str(cfg) == "1011"
    assert cfg.with_value(1, 1) == SpinConfig.ones(4)

    ternary = SpinConfig.from_values([2, 0, 1], n_states=3)
    assert ternary.code == 2 + 0 * 3 + 1 * 9
    assert ternary.values() == (2, 0, 1)
    assert ternary.with_value(0, 0).values() == (0, 0, 1)

    with pytest.raises(ValueError):
        SpinConfig(3, 8)
    with pytest.raises(ValueError):
        SpinConfig.from_values([0, 2])
    with pytest.raises(IndexError):
        cfg[4]


def test_partial_order_through_good_set():
    """测试偏序 η ≤ η': η 的好位置在 η' 中仍是好状态"""
    zeros, ones = SpinConfig.zeros(4), SpinConfig.ones(4)
    cfg = SpinConfig.from_values([1, 0, 1, 1])
    assert ones.is_below(cfg)
    assert cfg.is_below(zeros)
    assert not zeros.is_below(ones)
    assert not zeros.is_below(cfg)
    assert cfg.is_below(cfg)
    assert not cfg.is_below(SpinConfig.from_values([0, 1, 1, 1]))

    # 三状态，好集合 {0, 2}: 状态 0 与 2 可以互换
    measure = SiteMeasure((0, 1, 2), (0.2, 0.5, 0.3), frozenset({0, 2}))
    a = SpinConfig.from_values([0, 1, 2], n_states=3)
    b = SpinConfig.from_values([2, 1, 0], n_states=3)
    c = SpinConfig.from_values([1, 1, 2], n_states=3)
    assert a.is_below(b, measure) and b.is_below(a, measure)
    assert not a.is_below(c, measure)
    assert c.is_below(a, measure)
    # 默认好集合 {0}
    assert not a.is_below(b)

    with pytest.raises(ValueError):
        zeros.is_below(SpinConfig.zeros(3))
    with pytest.raises(ValueError):
        a.is_below(b, SiteMeasure.bernoulli(0.5))


def test_east_constraint_example():
    """测试 East 的约束: 右邻为空位，最右端无约束"""
    model = catalog("east", n=4, q=0.5)
    omega = SpinConfig.from_values([1, 1, 0, 1])
    assert [constraint(model, omega, x) for x in range(4)] == [0, 1, 0, 1]
    assert free_vertices(model) == (3,)


def test_fa1f_all_occupied():
    """测试 FA-1f 在全占据构型下内部顶点不可翻转"""
    model = catalog("fa-1f", n=5, q=0.5)
    ones = SpinConfig.ones(5)
    assert all(constraint(model, ones, x) == 0 for x in range(1, 4))


def test_spiral_constraint_example():
    """测试 Spiral: NE 与 NW 同时为空位时约束满足"""
    model = catalog("spiral", shape=(3, 3), q=0.5)
    rect = Rectangle.from_shape((3, 3))
    center = rect.index_of((1, 1))
    vacant_sites = {(1, 2), (2, 2), (0, 1), (0, 2)}
    values = [0 if c in vacant_sites else 1 for c in rect.coords()]
    assert constraint(model, SpinConfig.from_values(values), center) == 1

    only_ne = {(1, 2), (2, 2)}
    values = [0 if c in only_ne else 1 for c in rect.coords()]
    assert constraint(model, SpinConfig.from_values(values), center) == 0


def test_hp1_rejected():
    """测试顶点属于自身影响集时报错"""
    with pytest.raises(ModelSpecError):
        custom_model(path_graph(2), [[[0]], [[0]]])


def test_good_boundary_subset_of_boundary():
    """测试好边界必须是边界集合的子集"""
    g = lattice(Rectangle.from_shape((3,)))
    classes = [[[1]], [[2]], [[(3,)]]]
    model = custom_model(g, classes, q=0.4, good_boundary=[(3,)])
    assert model.boundary is BoundaryMode.GOOD_SET
    assert free_vertices(model) == (2,)

    with pytest.raises(ModelSpecError):
        custom_model(g, classes, q=0.4, good_boundary=[(7,)])


def test_all_constrained_model():
    """测试空影响集族: 约束恒为 0"""
    model = custom_model(path_graph(3), [[], [], []], q=0.5)
    for code in range(8):
        cfg = SpinConfig(3, code)
        assert all(constraint(model, cfg, x) == 0 for x in range(3))


def test_vectorized_constraint_matches_pointwise():
    """测试向量化约束与逐点约束一致"""
    model = catalog("fa-2f", shape=(2, 3), q=0.5)
    n = model.n_vertices
    codes = np.arange(2 ** n, dtype=np.int64)
    table = GoodTable(codes, model.measure)
    for x in range(n):
        vector = model.compiled.evaluate_vector(x, table)
        pointwise = [constraint(model, SpinConfig(n, int(c)), x) for c in codes]
        assert list(vector.astype(int)) == pointwise


def test_target_predicates():
    """测试目标集合谓词"""
    model = catalog("east", n=3, q=0.5)
    cfg = SpinConfig.from_values([1, 0, 1])
    assert not vacant(0)(cfg)
    assert vacant(1)(cfg)
    assert ConstraintHolds(model, 0)(cfg)
    assert not ConstraintHolds(model, 1)(cfg)
    assert ConstraintHolds(model, 0).watch == {1}


def test_domination_examples():
    """测试支配关系"""
    east = catalog("east", n=6, q=0.5)
    fa = catalog("fa-1f", n=6, q=0.5)
    assert dominates(fa, east)
    assert dominates(east, east)
    report = dominates(east, fa)
    assert not report
    assert report.counterexample is not None

    fa1 = catalog("fa-1f", shape=(3, 3), q=0.5, boundary="maximal")
    fa2 = catalog("fa-2f", shape=(3, 3), q=0.5, boundary="maximal")
    report = dominates(fa1, fa2)
    assert report.holds and report.exhaustive and report.checked == 2 ** 9


def test_domination_sampled_mode():
    """测试大体积上的抽样支配检查"""
    east = catalog("east", n=30, q=0.5)
    fa = catalog("fa-1f", n=30, q=0.5)
    report = dominates(fa, east, n_samples=200, seed=1)
    assert report.holds
    assert not report.exhaustive


def test_domination_requires_same_graph():
    """测试不同图上的模型不能比较"""
    with pytest.raises(PreconditionError):
        dominates(catalog("east", n=4), catalog("east", n=5))
    with pytest.raises(PreconditionError):
        dominates(catalog("east", n=4, q=0.3), catalog("east", n=4, q=0.5))


@settings(max_examples=50, deadline=None)
@given(st.integers(min_value=0, max_value=2 ** 9 - 1), st.integers(min_value=0, max_value=8))
def test_constraint_monotone_in_vacancies(code, x):
    """测试约束对空位单调: 多一个空位不会破坏约束"""
    model = catalog("north-east", shape=(3, 3), q=0.5)
    cfg = SpinConfig(9, code)
    before = constraint(model, cfg, x)
    for y in range(9):
        if cfg[y] == 1 and y != x:
            assert constraint(model, cfg.with_value(y, 0), x) >= before


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
