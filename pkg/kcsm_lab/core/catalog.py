#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Model Catalog

标准模型目录: East、FA-jf、North-East、Spiral、二叉树两孩子模型、树上 East，
以及模型描述文件 (JSON/YAML) 的读取。
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from .exceptions import ModelSpecError, UnknownModelError
from .models import (
    BoundaryMode,
    ConstraintFamily,
    InfluenceClass,
    ModelSpec,
    SiteMeasure,
    custom_model,
)
from .topology import (
    BoundaryKind,
    Coord,
    Graph,
    NeighborhoodKind,
    Rectangle,
    RootedTree,
    boundary,
    complete_binary_tree,
    lattice,
    neighborhood,
    random_connected_graph,
    random_tree,
    spanning_tree,
)
from ..utils.logger import get_logger

logger = get_logger("catalog")


def _shift(c: Coord, *offset: int) -> Coord:
    return tuple(u + a for u, a in zip(c, offset))


def _resolve_rectangle(params: Dict[str, Any], dim: Optional[int] = None) -> Rectangle:
    """由 shape / n / L+d 参数确定矩形"""
    if "rect" in params:
        rect = params.pop("rect")
        if not isinstance(rect, Rectangle):
            rect = Rectangle(*rect)
        return rect
    if "shape" in params:
        shape = params.pop("shape")
        shape = (int(shape),) if isinstance(shape, int) else tuple(int(s) for s in shape)
    elif "n" in params:
        shape = (int(params.pop("n")),)
    elif "L" in params:
        d = int(params.pop("d", dim or 2))
        shape = (int(params.pop("L")),) * d
    else:
        raise ModelSpecError("缺少体积参数 (shape, n 或 L)")
    params.pop("d", None)
    if dim is not None and len(shape) != dim:
        raise ModelSpecError(f"该模型只定义在 {dim} 维格点上", details=f"shape={shape}")
    return Rectangle.from_shape(shape)


def _measure(params: Dict[str, Any]) -> SiteMeasure:
    measure = params.pop("measure", None)
    q = params.pop("q", 0.5)
    if measure is not None:
        return measure
    return SiteMeasure.bernoulli(q)


def _finish(name: str, graph: Graph, classes: Sequence[InfluenceClass], measure: SiteMeasure,
            mode: BoundaryMode, good: Iterable[Coord], unconstrained: Iterable[int],
            params: Dict[str, Any], record: Dict[str, Any]) -> ModelSpec:
    origin = int(params.pop("origin", 0))
    if params:
        raise ModelSpecError(f"未知参数: {', '.join(sorted(params))}", name)
    family = ConstraintFamily(tuple(classes), name)
    record = dict(record, q=measure.q)
    model = ModelSpec(name, graph, family, measure, mode, frozenset(good),
                      frozenset(unconstrained), origin, tuple(sorted(record.items())))
    logger.debug(f"模型 {name} 构造完成: |V| = {graph.n_vertices}, 边界 {mode.value}")
    return model


def _boundary_mode(params: Dict[str, Any], default: str) -> Tuple[BoundaryMode, Optional[List[Coord]]]:
    value = params.pop("boundary", default)
    good = params.pop("good_boundary", None)
    if good is not None:
        return BoundaryMode.GOOD_SET, [tuple(g) for g in good]
    try:
        return BoundaryMode(value), None
    except ValueError:
        raise ModelSpecError(f"未知的边界模式: {value}",
                             suggestions=["可选: none, maximal, minimal, good-set"])


def _lattice_good_set(mode: BoundaryMode, explicit: Optional[List[Coord]],
                      minimal: Iterable[Coord]) -> List[Coord]:
    if mode is BoundaryMode.GOOD_SET:
        return explicit or []
    if mode is BoundaryMode.MINIMAL:
        return list(minimal)
    return []


# ----------------------------------------------------------------------
# 各模型

def _east(params: Dict[str, Any]) -> ModelSpec:
    """East: C_x = {{x+1}}，最小边界使最右端无约束"""
    periodic = bool(params.pop("periodic", False))
    rect = _resolve_rectangle(params, dim=1)
    measure = _measure(params)
    mode, explicit = _boundary_mode(params, "none" if periodic else "minimal")
    g = lattice(rect, periodic)
    classes = [InfluenceClass((frozenset({_shift(c, 1)}),)) for c in g.coords]
    good = _lattice_good_set(mode, explicit, [(rect.upper[0] + 1,)])
    return _finish("east", g, classes, measure, mode, good, (), params,
                   {"n": rect.size, "periodic": periodic})


def _fa(params: Dict[str, Any], j: Optional[int] = None) -> ModelSpec:
    """
    FA-jf: 至少 j 个最近邻为空位

    在格点上使用 N_x (含虚拟格点)，最小边界为 ∂₊R 全空；
    给定 graph 时定义在一般图上，可指定无约束的根 root。
    """
    if j is None:
        j = int(params.pop("j", 1))
    else:
        params.pop("j", None)
    if j < 1:
        raise ModelSpecError("FA-jf 的阈值 j 必须至少为 1")
    measure = _measure(params)
    name = f"fa-{j}f"

    graph = params.pop("graph", None)
    root = params.pop("root", None)
    if graph is not None:
        mode, explicit = _boundary_mode(params, "none")
        if mode not in (BoundaryMode.NONE,):
            raise ModelSpecError("一般图上没有边界格点，boundary 只能为 none", name)
        if j > graph.max_degree and root is None:
            raise ModelSpecError(f"阈值 j = {j} 大于最大度数 {graph.max_degree}", name)
        classes = [InfluenceClass((), tuple(graph.neighbors(x)), j) if graph.degree(x) >= j
                   else InfluenceClass() for x in range(graph.n_vertices)]
        free = () if root is None else (int(root),)
        return _finish(name, graph, classes, measure, mode, (), free, params,
                       {"j": j, "root": root, "graph": graph.name})

    periodic = bool(params.pop("periodic", False))
    rect = _resolve_rectangle(params)
    mode, explicit = _boundary_mode(params, "none" if periodic else "minimal")
    g = lattice(rect, periodic)
    if j > 2 * rect.dim:
        raise ModelSpecError(f"阈值 j = {j} 大于格点度数 {2 * rect.dim}", name)
    classes = [InfluenceClass((), tuple(sorted(neighborhood(g, x, NeighborhoodKind.N, extended=True))), j)
               for x in range(g.n_vertices)]
    good = _lattice_good_set(mode, explicit, boundary(rect, BoundaryKind.FORWARD))
    free = () if root is None else (int(root),)
    return _finish(name, g, classes, measure, mode, good, free, params,
                   {"j": j, "shape": list(rect.shape), "periodic": periodic})


def _north_east(params: Dict[str, Any]) -> ModelSpec:
    """North-East: 北邻与东邻必须同时为空位"""
    periodic = bool(params.pop("periodic", False))
    rect = _resolve_rectangle(params, dim=2)
    measure = _measure(params)
    mode, explicit = _boundary_mode(params, "none" if periodic else "maximal")
    g = lattice(rect, periodic)
    classes = [InfluenceClass((frozenset({_shift(c, 1, 0), _shift(c, 0, 1)}),)) for c in g.coords]
    good = _lattice_good_set(mode, explicit, boundary(rect, BoundaryKind.FORWARD))
    return _finish("north-east", g, classes, measure, mode, good, (), params,
                   {"shape": list(rect.shape), "periodic": periodic})


def spiral_quadrants(c: Coord) -> Dict[str, frozenset]:
    """Spiral 模型的四个象限对 NE, SE, SW, NW"""
    return {
        "NE": frozenset({_shift(c, 0, 1), _shift(c, 1, 1)}),
        "SE": frozenset({_shift(c, 1, 0), _shift(c, 1, -1)}),
        "SW": frozenset({_shift(c, 0, -1), _shift(c, -1, -1)}),
        "NW": frozenset({_shift(c, -1, 0), _shift(c, -1, 1)}),
    }


def _spiral(params: Dict[str, Any]) -> ModelSpec:
    """Spiral: C_x = {NE∪SE, SE∪SW, SW∪NW, NW∪NE}"""
    periodic = bool(params.pop("periodic", False))
    rect = _resolve_rectangle(params, dim=2)
    measure = _measure(params)
    mode, explicit = _boundary_mode(params, "none" if periodic else "maximal")
    g = lattice(rect, periodic)
    classes = []
    for c in g.coords:
        qd = spiral_quadrants(c)
        classes.append(InfluenceClass((
            qd["NE"] | qd["SE"], qd["SE"] | qd["SW"], qd["SW"] | qd["NW"], qd["NW"] | qd["NE"],
        )))
    sector = set()
    for c in rect.coords():
        for off in ((1, 0), (1, -1), (0, -1)):
            y = _shift(c, *off)
            if not rect.contains(y):
                sector.add(y)
    good = _lattice_good_set(mode, explicit, sector)
    return _finish("spiral", g, classes, measure, mode, good, (), params,
                   {"shape": list(rect.shape), "periodic": periodic})


def _binary_tree(params: Dict[str, Any]) -> ModelSpec:
    """满二叉树上的两孩子模型: 两个孩子都为空位，叶子无约束"""
    depth = int(params.pop("depth", 3))
    measure = _measure(params)
    params.pop("boundary", None)
    g = complete_binary_tree(depth)
    n = g.n_vertices
    classes = []
    leaves = []
    for x in range(n):
        kids = [c for c in (2 * x + 1, 2 * x + 2) if c < n]
        if kids:
            classes.append(InfluenceClass((frozenset(kids),)))
        else:
            classes.append(InfluenceClass())
            leaves.append(x)
    return _finish("binary-tree", g, classes, measure, BoundaryMode.NONE, (), leaves, params,
                   {"depth": depth})


def _tree_east(params: Dict[str, Any]) -> ModelSpec:
    """树上 East: 非根顶点要求父亲为空位，根无约束"""
    measure = _measure(params)
    params.pop("boundary", None)
    tree = params.pop("tree", None)
    if tree is None:
        graph = params.pop("graph", None)
        if graph is None:
            raise ModelSpecError("tree-east 需要 tree 或 graph 参数", "tree-east")
        tree = spanning_tree(graph, int(params.pop("root", 0)))
    elif not isinstance(tree, RootedTree):
        raise ModelSpecError("tree 参数必须是 RootedTree", "tree-east")
    params.pop("root", None)
    classes = [InfluenceClass() if x == tree.root else InfluenceClass((frozenset({tree.parents[x]}),))
               for x in range(tree.n_vertices)]
    params.setdefault("origin", tree.root)
    return _finish("tree-east", tree.graph, classes, measure, BoundaryMode.NONE, (), (tree.root,),
                   params, {"root": tree.root, "graph": tree.graph.name})


_CATALOG: Dict[str, Callable[[Dict[str, Any]], ModelSpec]] = {
    "east": _east,
    "fa-jf": _fa,
    "fa-1f": lambda p: _fa(p, 1),
    "fa-2f": lambda p: _fa(p, 2),
    "north-east": _north_east,
    "spiral": _spiral,
    "binary-tree": _binary_tree,
    "tree-east": _tree_east,
}

_ALIASES = {
    "ne": "north-east",
    "northeast": "north-east",
    "fa": "fa-jf",
    "fajf": "fa-jf",
    "fa1f": "fa-1f",
    "fa2f": "fa-2f",
    "two-children": "binary-tree",
    "east-tree": "tree-east",
}


def known_models() -> List[str]:
    return sorted(_CATALOG)


def catalog(name: str, **params: Any) -> ModelSpec:
    """
    按名称构造目录中的模型

    Args:
        name: 模型名称 (east, fa-jf, fa-1f, fa-2f, north-east, spiral, binary-tree, tree-east)
        **params: 模型参数，例如 n / shape / L, q, j, boundary, periodic, graph, root, depth

    Returns:
        ModelSpec: 带有该模型记录的最小边界 (或显式指定边界) 的模型

    Raises:
        UnknownModelError: 名称不在目录中
        ModelSpecError: 参数无效
    """
    key = name.strip().lower().replace("_", "-")
    key = _ALIASES.get(key, key)
    builder = _CATALOG.get(key)
    if builder is None:
        raise UnknownModelError(name, known_models())
    return builder(dict(params))


# ----------------------------------------------------------------------
# 模型描述文件

MODEL_SCHEMA_VERSION = 1


def _graph_from_descriptor(graph_desc: Mapping[str, Any], base_dir: Optional[Path]) -> Graph:
    from ..utils.io import read_edge_list

    if "edge_list" in graph_desc:
        path = Path(graph_desc["edge_list"])
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        return read_edge_list(path)
    if "random" in graph_desc:
        cfg = graph_desc["random"]
        if cfg.get("kind", "erdos-renyi") == "tree":
            return random_tree(int(cfg["n"]), int(cfg["seed"]))
        return random_connected_graph(int(cfg["n"]), float(cfg.get("p", 0.5)), int(cfg["seed"]))
    raise ModelSpecError("无法识别的 graph 描述", details=str(dict(graph_desc)))


def model_from_descriptor(descriptor: Mapping[str, Any], base_dir: Optional[Path] = None) -> ModelSpec:
    """
    由描述字典构造模型

    描述字段: name, q, boundary, unconstrained, origin, graph (edge_list / random),
    以及模型参数 (n, shape, L, d, j, depth, periodic, root)。
    """
    data = dict(descriptor)
    version = int(data.pop("schema_version", MODEL_SCHEMA_VERSION))
    if version != MODEL_SCHEMA_VERSION:
        raise ModelSpecError(f"不支持的模型描述版本 {version}")
    name = data.pop("name", None)
    if not name:
        raise ModelSpecError("模型描述缺少 name 字段")

    unconstrained = data.pop("unconstrained", None)
    if "graph" in data and isinstance(data["graph"], Mapping):
        data["graph"] = _graph_from_descriptor(data["graph"], base_dir)
    if "shape" in data and isinstance(data["shape"], list):
        data["shape"] = tuple(data["shape"])
    if name == "custom":
        classes = data.pop("classes")
        return custom_model(data.pop("graph"), classes, q=data.pop("q", 0.5),
                            unconstrained=unconstrained or (), origin=int(data.pop("origin", 0)))

    model = catalog(name, **data)
    if unconstrained:
        model = ModelSpec(model.name, model.graph, model.constraints, model.measure, model.boundary,
                          model.good_boundary, model.unconstrained | frozenset(unconstrained),
                          model.origin, model.params)
    return model


def load_model_description(path: Union[str, Path]) -> ModelSpec:
    """读取 JSON/YAML 模型描述文件"""
    from ..utils.io import read_mapping

    path = Path(path)
    return model_from_descriptor(read_mapping(path), path.parent)


def east_interval_for(q: float) -> ModelSpec:
    """East 在 [0, ⌈1/q⌉] 上的模型 (最右端无约束)"""
    return catalog("east", n=int(math.ceil(1.0 / q)) + 1, q=q)
