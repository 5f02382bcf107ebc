#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Test file formats: edge lists, CSV with manifest header, interaction tables, event logs
"""

import numpy as np
import pytest

from kcsm_lab.core.topology import random_connected_graph
from kcsm_lab.utils.io import (
    EVENT_DTYPE,
    read_csv,
    read_edge_list,
    read_events,
    read_interaction_table,
    read_mapping,
    render_csv,
    write_csv,
    write_edge_list,
    write_events,
    write_interaction_table,
    write_mapping,
)


def test_edge_list(tmp_path):
    """测试边列表的注释、逗号分隔与顶点数声明"""
    path = tmp_path / "g.edges"
    path.write_text("# 三角形加一个悬挂点\nn 4\n0 1\n1,2\n2 0  # 闭合\n\n2 3\n", encoding="utf-8")
    graph = read_edge_list(path)
    assert graph.n_vertices == 4
    assert graph.edges() == [(0, 1), (0, 2), (1, 2), (2, 3)]
    assert graph.name == "g"

    bad = tmp_path / "bad.edges"
    bad.write_text("0 1 2\n", encoding="utf-8")
    with pytest.raises(ValueError):
        read_edge_list(bad)


def test_edge_list_written_graph(tmp_path):
    """测试写出后读回的图具有相同的边"""
    graph = random_connected_graph(8, 0.4, seed=6)
    loaded = read_edge_list(write_edge_list(graph, tmp_path / "random.edges"))
    assert loaded.edges() == graph.edges()


def test_mapping_formats(tmp_path):
    """测试 JSON 与 YAML 映射"""
    data = {"name": "east", "grid": {"q": [0.5]}}
    for suffix in (".json", ".yaml"):
        path = write_mapping(tmp_path / f"m{suffix}", data)
        assert read_mapping(path) == data

    listing = tmp_path / "list.json"
    listing.write_text("[1, 2]", encoding="utf-8")
    with pytest.raises(ValueError):
        read_mapping(listing)


def test_csv_manifest_header(tmp_path):
    """测试带清单头的 CSV"""
    manifest = {"version": "1.0.0", "config": {"b": 2, "a": 1}}
    rows = [{"q": 0.1, "gap": 1 / 3, "method": "dense"}, {"q": 0.2, "gap": None, "method": "dense"}]
    text = render_csv(["q", "gap", "method"], rows, manifest)
    lines = text.splitlines()
    assert lines[0] == '# config: {"a":1,"b":2}'
    assert lines[2] == "q,gap,method"
    assert lines[3] == "0.1,0.333333333333,dense"
    assert lines[4] == "0.2,,dense"

    path = write_csv(tmp_path / "out.csv", ["q", "gap", "method"], rows, manifest)
    loaded_manifest, loaded_rows = read_csv(path)
    assert loaded_manifest == manifest
    assert loaded_rows[1]["gap"] == ""


def test_interaction_table(tmp_path):
    """测试相互作用表的格式"""
    entries = [(((0, 0), (1, 0)), [0.0, 0.0, 0.0, 0.25]), (((-1, 2),), [0.1, -0.1])]
    path = write_interaction_table(tmp_path / "phi.txt", entries, {"range": 2})
    assert "A: 0:0,1:0; table: 0.0,0.0,0.0,0.25" in path.read_text(encoding="utf-8")
    header, loaded = read_interaction_table(path)
    assert header == {"range": 2}
    assert loaded[0] == (((0, 0), (1, 0)), [0.0, 0.0, 0.0, 0.25])
    assert loaded[1] == (((-1, 2),), [0.1, -0.1])

    bad = tmp_path / "bad.txt"
    bad.write_text("A: 0:0 table 1.0\n", encoding="utf-8")
    with pytest.raises(ValueError):
        read_interaction_table(bad)


def test_event_log(tmp_path):
    """测试二进制事件日志的记录布局"""
    events = np.array([(0.5, 3, 1, 3), (1.25, 0, 0, 0)], dtype=EVENT_DTYPE)
    path = write_events(tmp_path / "run.events", events)
    assert path.stat().st_size == 2 * 14
    assert np.array_equal(read_events(path), events)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
