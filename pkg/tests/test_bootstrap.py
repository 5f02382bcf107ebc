#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Bootstrap 测试脚本

测试自举映射、闭包、内部张成、阈值扫描与穿越路径。
"""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kcsm_lab.core.bootstrap import (
    CrossingDirection,
    bootstrap_step,
    closure,
    estimate_qbp,
    find_crossing,
    internally_spanned,
    iterate_bootstrap,
    noncooperative_witness,
    oriented_percolation_oracle,
    restrict_config,
    threshold_family,
)
from kcsm_lab.core.catalog import catalog
from kcsm_lab.core.exceptions import PreconditionError, UnsupportedModelError
from kcsm_lab.core.models import SiteMeasure, SpinConfig
from kcsm_lab.core.topology import Rectangle, random_connected_graph


def _zeros_of(cfg: SpinConfig) -> set:
    return {x for x, v in enumerate(cfg.values()) if v == 0}


def test_bootstrap_step_examples():
    """测试同步自举映射"""
    fa = catalog("fa-1f", n=3, q=0.5, boundary="none")
    assert bootstrap_step(fa, SpinConfig.from_values([1, 0, 1])) == SpinConfig.zeros(3)
    assert bootstrap_step(fa, SpinConfig.zeros(3)) == SpinConfig.zeros(3)

    east = catalog("east", n=3, q=0.5)
    history = iterate_bootstrap(east, SpinConfig.ones(3))
    assert [str(c) for c in history] == ["111", "110", "100", "000"]


def test_closure_examples():
    """测试闭包"""
    ne = catalog("north-east", shape=(2, 2))
    assert closure(ne, SpinConfig.ones(4)) == SpinConfig.zeros(4)

    blocked = catalog("north-east", shape=(2, 2), boundary="none")
    assert closure(blocked, SpinConfig.ones(4)) == SpinConfig.ones(4)

    fa2 = catalog("fa-2f", shape=(2, 2), boundary="none")
    diagonal = SpinConfig.from_values([0, 1, 1, 0])
    assert closure(fa2, diagonal) == SpinConfig.zeros(4)


def test_closure_matches_synchronous_iteration():
    """测试工作队列闭包与同步迭代的极限一致"""
    model = catalog("fa-2f", shape=(3, 3), boundary="none")
    rng = np.random.default_rng(7)
    for _ in range(30):
        cfg = SpinConfig.from_values(rng.integers(0, 2, 9))
        history = iterate_bootstrap(model, cfg)
        assert len(history) <= model.n_vertices + 1
        assert closure(model, cfg) == history[-1]


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=2 ** 9 - 1), st.integers(min_value=0, max_value=2 ** 9 - 1))
def test_bootstrap_monotone_and_idempotent(code_a, code_b):
    """测试 T 单调、闭包幂等"""
    model = catalog("fa-2f", shape=(3, 3), boundary="none")
    a = SpinConfig(9, code_a)
    b = SpinConfig(9, code_a & code_b)  # b 的空位包含 a 的空位
    ta, tb = bootstrap_step(model, a), bootstrap_step(model, b)
    assert _zeros_of(a) <= _zeros_of(ta)
    assert _zeros_of(ta) <= _zeros_of(tb)
    once = closure(model, a)
    assert closure(model, once) == once
    assert _zeros_of(once) <= _zeros_of(closure(model, b))


def test_internally_spanned_examples():
    """测试内部张成"""
    east = catalog("east", n=3, q=0.5)
    assert internally_spanned(east, [2], SpinConfig.ones(3))

    fa2 = catalog("fa-2f", shape=(2, 2), boundary="none")
    everything = range(4)
    assert not internally_spanned(fa2, everything, SpinConfig.ones(4))
    assert internally_spanned(fa2, everything, SpinConfig.from_values([0, 1, 1, 0]))

    # Γ 外的空位不参与
    fa1 = catalog("fa-1f", n=4, q=0.5, boundary="none")
    assert not internally_spanned(fa1, [0, 1], SpinConfig.from_values([1, 1, 0, 1]))
    assert internally_spanned(fa1, [1, 2], SpinConfig.from_values([1, 1, 0, 1]))


def test_noncooperative_witness():
    """测试非合作模型: 单个空位即可清空全部"""
    g = random_connected_graph(8, 0.3, seed=4)
    fa1 = catalog("fa-1f", graph=g, q=0.5)
    assert noncooperative_witness(fa1, [5])

    ne = catalog("north-east", shape=(3, 3), boundary="none")
    assert not noncooperative_witness(ne, [4])


def test_non_binary_model_rejected():
    """测试非 0-1 模型没有自举映射"""
    model = catalog("east", n=3, measure=SiteMeasure((0, 1, 2), (0.2, 0.3, 0.5), frozenset({0})))
    with pytest.raises(UnsupportedModelError):
        closure(model, SpinConfig.zeros(3, n_states=3))


def test_threshold_family_geometry():
    """测试阈值扫描的周期体积"""
    ring = threshold_family("fa-1f")(6)
    assert ring.n_vertices == 6 and ring.graph.periodic
    torus = threshold_family("north-east")(4)
    assert torus.n_vertices == 16 and torus.graph.periodic


def test_fa1f_threshold_scan():
    """测试 FA-1f 的清空频率趋于 1"""
    estimate = estimate_qbp("fa-1f", [8], [0.3, 0.5, 0.7], samples=60, seed=3, workers=1)
    freqs = estimate.frequencies(8)
    assert np.all(np.diff(freqs) >= 0)
    assert freqs[-1] > 0.95
    assert len(estimate.rows()) == 3
    assert estimate.rows()[0]["samples"] == 60


def test_north_east_scan_monotone_and_oracle():
    """测试 North-East 清空频率单调，且与耦合的有向渗流对照逐样本一致"""
    q_grid = [round(0.1 + 0.1 * i, 2) for i in range(8)]
    estimate = estimate_qbp("north-east", [6, 8], q_grid, samples=30, seed=11, workers=1)
    for size in (6, 8):
        assert np.all(np.diff(estimate.frequencies(size)) >= 0)
    assert q_grid[0] <= estimate.interval[0] <= estimate.q_hat <= estimate.interval[1]

    oracle = oriented_percolation_oracle([6, 8], q_grid, samples=30, seed=11, coupled=True)
    assert oracle.table == estimate.table
    assert oracle.q_hat == pytest.approx(estimate.q_hat)

    independent = oriented_percolation_oracle([8], q_grid, samples=30, seed=11)
    assert np.all(np.diff(independent.frequencies(8)) >= 0)


def test_scan_without_crossing():
    """测试网格上没有穿越 1/2 时的标记"""
    estimate = estimate_qbp("north-east", [6], [0.05, 0.1], samples=10, seed=0, workers=1)
    assert not estimate.crossed
    assert estimate.q_hat == 0.1

    with pytest.raises(PreconditionError):
        estimate_qbp("north-east", [6], [0.5], samples=0, seed=0)


def test_find_crossing_examples():
    """测试极端穿越路径"""
    rect = Rectangle.from_shape((3, 3))
    crossing = find_crossing(SpinConfig.zeros(9), rect)
    assert crossing.coords == ((2, 2), (2, 1), (2, 0))
    assert crossing.extremality == "rightmost"

    assert find_crossing(SpinConfig.ones(9), rect) is None

    column = [0 if c[0] == 1 else 1 for c in rect.coords()]
    crossing = find_crossing(SpinConfig.from_values(column), rect)
    assert crossing.coords == ((1, 2), (1, 1), (1, 0))
    assert len(crossing) == 3

    lowest = find_crossing(SpinConfig.zeros(9), rect, CrossingDirection.LEFT_RIGHT)
    assert lowest.coords == ((0, 0), (1, 0), (2, 0))
    assert lowest.extremality == "lowermost"


def test_find_crossing_winding_path():
    """测试需要绕行的穿越"""
    rect = Rectangle.from_shape((3, 4))
    vacant = {(0, 3), (0, 2), (1, 2), (2, 2), (2, 1), (2, 0)}
    values = [0 if c in vacant else 1 for c in rect.coords()]
    crossing = find_crossing(SpinConfig.from_values(values), rect)
    assert crossing.coords[0] == (0, 3)
    assert crossing.coords[-1][1] == 0
    assert set(crossing.coords) <= vacant

    with pytest.raises(PreconditionError):
        find_crossing(SpinConfig.zeros(3), Rectangle.from_shape((3,)))


def test_restrict_config():
    """测试构型限制到子矩形"""
    rect = Rectangle.from_shape((3, 3))
    cfg = SpinConfig.from_values([c[0] % 2 for c in rect.coords()])
    sub = restrict_config(cfg, rect, Rectangle((1, 1), (2, 2)))
    assert sub.values() == (1, 0, 1, 0)

    with pytest.raises(PreconditionError):
        restrict_config(cfg, rect, Rectangle((1, 1), (3, 3)))


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
