#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Catalog 测试脚本

测试模型目录、最小边界与模型描述文件。
"""

import json
import tempfile
from pathlib import Path

import pytest
import yaml

from kcsm_lab.core.catalog import (
    catalog,
    east_interval_for,
    known_models,
    load_model_description,
    model_from_descriptor,
)
from kcsm_lab.core.exceptions import ModelSpecError, UnknownModelError
from kcsm_lab.core.models import BoundaryMode, free_vertices
from kcsm_lab.core.topology import random_connected_graph, spanning_tree, star_graph
from kcsm_lab.utils.io import write_edge_list


def test_known_models():
    """测试目录中的模型名称与别名"""
    names = known_models()
    for name in ("east", "fa-jf", "fa-1f", "fa-2f", "north-east", "spiral", "binary-tree", "tree-east"):
        assert name in names
    assert catalog("NE", shape=(2, 2)).name == "north-east"
    assert catalog("fa_1f", n=3).name == "fa-1f"

    with pytest.raises(UnknownModelError):
        catalog("west", n=3)


def test_east_minimal_boundary():
    """测试 East: 作用范围 1，最右端无约束"""
    model = catalog("east", n=5, q=0.4)
    assert model.n_vertices == 5
    assert model.range == 1
    assert model.boundary is BoundaryMode.MINIMAL
    assert model.good_boundary == {(5,)}
    assert free_vertices(model) == (4,)
    for x in range(4):
        assert model.compiled.sets[x] == ((x + 1,),)
    assert model.param("q") == pytest.approx(0.4)

    periodic = catalog("east", n=5, periodic=True)
    assert periodic.boundary is BoundaryMode.NONE
    assert free_vertices(periodic) == ()
    assert periodic.compiled.sets[4] == ((0,),)


def test_fa_jf_threshold_classes():
    """测试 FA-2f 的影响集族为邻居的全部 2 元子集"""
    model = catalog("fa-jf", j=2, shape=(3, 3), q=0.5)
    assert model.name == "fa-2f"
    center = 4
    materialized = model.constraints.classes[center].materialize()
    assert len(materialized) == 6
    assert all(len(a) == 2 for a in materialized)
    assert set().union(*materialized) == {1, 3, 5, 7}

    with pytest.raises(ModelSpecError):
        catalog("fa-jf", j=5, shape=(3, 3))
    with pytest.raises(ModelSpecError):
        catalog("fa-jf", j=0, n=4)


def test_fa_on_general_graph():
    """测试一般图上的 FA-1f 与无约束的根"""
    g = random_connected_graph(7, 0.4, seed=3)
    model = catalog("fa-1f", graph=g, root=2, q=0.5)
    assert model.n_vertices == 7
    assert free_vertices(model) == (2,)
    assert model.boundary is BoundaryMode.NONE

    with pytest.raises(ModelSpecError):
        catalog("fa-1f", graph=g, boundary="maximal")


def test_north_east_and_spiral_boundaries():
    """测试 North-East 与 Spiral 的默认最大边界"""
    ne = catalog("north-east", shape=(2, 3))
    assert ne.boundary is BoundaryMode.MAXIMAL
    assert ne.good_boundary == ne.boundary_set
    assert ne.range == 1

    spiral = catalog("spiral", shape=(3, 3), boundary="minimal")
    assert spiral.boundary is BoundaryMode.MINIMAL
    assert spiral.good_boundary <= spiral.boundary_set
    assert spiral.range == 2

    with pytest.raises(ModelSpecError):
        catalog("north-east", n=4)


def test_binary_tree_leaves_unconstrained():
    """测试满二叉树上的两孩子模型"""
    model = catalog("binary-tree", depth=3, q=0.5)
    assert model.n_vertices == 15
    assert free_vertices(model) == tuple(range(7, 15))
    for x in range(7):
        assert model.compiled.sets[x] == ((2 * x + 1, 2 * x + 2),)


def test_tree_east_root_unconstrained():
    """测试树上 East: 根无约束，原点为根"""
    tree = spanning_tree(star_graph(3), 0)
    model = catalog("tree-east", tree=tree, q=0.5)
    assert free_vertices(model) == (0,)
    assert model.origin == 0
    assert model.compiled.sets[2] == ((0,),)

    with pytest.raises(ModelSpecError):
        catalog("tree-east", q=0.5)


def test_unknown_parameter_rejected():
    """测试未知参数"""
    with pytest.raises(ModelSpecError):
        catalog("east", n=4, colour="red")
    with pytest.raises(ModelSpecError):
        catalog("east", q=0.5)


def test_east_interval_for():
    """测试 East 区间 [0, ⌈1/q⌉]"""
    assert east_interval_for(0.3).n_vertices == 5
    assert east_interval_for(0.5).n_vertices == 3


def test_model_from_descriptor():
    """测试由描述字典构造模型"""
    model = model_from_descriptor({
        "name": "fa-1f",
        "graph": {"random": {"n": 6, "p": 0.5, "seed": 3}},
        "root": 0,
        "q": 0.4,
    })
    assert model.n_vertices == 6
    assert free_vertices(model) == (0,)

    extra = model_from_descriptor({"name": "east", "n": 4, "unconstrained": [1]})
    assert set(free_vertices(extra)) == {1, 3}

    with pytest.raises(ModelSpecError):
        model_from_descriptor({"n": 4})
    with pytest.raises(ModelSpecError):
        model_from_descriptor({"name": "east", "n": 4, "schema_version": 9})


def test_unrecognized_graph_description():
    """测试无法识别的 graph 描述抛出模型定义错误"""
    with pytest.raises(ModelSpecError) as excinfo:
        model_from_descriptor({"name": "fa-1f", "params": {"j": 1}, "graph": {"foo": 1}})
    assert "foo" in str(excinfo.value)


def test_load_model_description_files():
    """测试 YAML 模型描述与边列表文件"""
    with tempfile.TemporaryDirectory() as temp_dir:
        temp = Path(temp_dir)
        write_edge_list(star_graph(4), temp / "star.edges")
        with open(temp / "model.yaml", "w", encoding="utf-8") as f:
            yaml.safe_dump({"schema_version": 1, "name": "fa-1f", "q": 0.5,
                            "graph": {"edge_list": "star.edges"}}, f)
        model = load_model_description(temp / "model.yaml")
        assert model.n_vertices == 5
        assert model.graph.max_degree == 4

        with open(temp / "custom.json", "w", encoding="utf-8") as f:
            json.dump({"name": "custom", "q": 0.5, "graph": {"edge_list": "star.edges"},
                       "classes": [[[1]], [[0]], [[0]], [[0]], [[0]]], "unconstrained": [0]}, f)
        custom = load_model_description(temp / "custom.json")
        assert custom.name == "custom"
        assert free_vertices(custom) == (0,)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
