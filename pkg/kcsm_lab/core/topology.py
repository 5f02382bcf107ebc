#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Topology

有限连通图、d 维矩形格点 (可带周期边界) 与有根树。

提供邻域 N/N*/K/K*、正向边界 ∂₊/∂₊*、按最小下标广度优先的生成树，
以及树上 East 分解所需的分支点拆分。
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property, lru_cache
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from .exceptions import TopologyError
from ..utils.streams import StreamTag, stream

Coord = Tuple[int, ...]


class NeighborhoodKind(Enum):
    """邻域类型"""
    N = "N"            # 最近邻
    N_STAR = "N*"      # 含对角
    K = "K"            # 正向最近邻
    K_STAR = "K*"      # 正向含对角


class BoundaryKind(Enum):
    """正向边界类型"""
    FORWARD = "forward"            # 由 K 生成
    STAR_FORWARD = "star-forward"  # 由 K* 生成


@lru_cache(maxsize=None)
def _offsets(dim: int, kind: NeighborhoodKind) -> Tuple[Coord, ...]:
    """邻域偏移量 α (按字典序)"""
    if kind in (NeighborhoodKind.N, NeighborhoodKind.K):
        signs = (-1, 1) if kind is NeighborhoodKind.N else (1,)
        result = []
        for axis in range(dim):
            for s in signs:
                alpha = [0] * dim
                alpha[axis] = s
                result.append(tuple(alpha))
        return tuple(sorted(result))
    values = (-1, 0, 1) if kind is NeighborhoodKind.N_STAR else (0, 1)
    return tuple(a for a in itertools.product(values, repeat=dim) if any(a))


@dataclass(frozen=True)
class Rectangle:
    """
    d 维整数矩形 R = Π [lower_i, upper_i]

    顶点下标以第 0 轴变化最快: index = Σ (c_i - lower_i) * stride_i。
    第 0 轴为东 (x)，第 1 轴为北 (y)。
    """
    lower: Coord
    upper: Coord

    def __post_init__(self):
        lower = tuple(int(v) for v in self.lower)
        upper = tuple(int(v) for v in self.upper)
        if len(lower) != len(upper) or not lower:
            raise TopologyError("矩形维数不一致", f"lower={lower}, upper={upper}")
        if any(lo > hi for lo, hi in zip(lower, upper)):
            raise TopologyError("矩形下界大于上界", f"lower={lower}, upper={upper}")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @classmethod
    def from_shape(cls, shape: Sequence[int], origin: Optional[Sequence[int]] = None) -> "Rectangle":
        """由各轴长度构造，默认原点为 0"""
        if origin is None:
            origin = (0,) * len(shape)
        if any(int(s) < 1 for s in shape):
            raise TopologyError("矩形边长必须为正", f"shape={tuple(shape)}")
        return cls(tuple(origin), tuple(o + int(s) - 1 for o, s in zip(origin, shape)))

    @property
    def dim(self) -> int:
        return len(self.lower)

    @property
    def shape(self) -> Tuple[int, ...]:
        return tuple(hi - lo + 1 for lo, hi in zip(self.lower, self.upper))

    @property
    def size(self) -> int:
        return int(np.prod(self.shape))

    @property
    def strides(self) -> Tuple[int, ...]:
        strides = []
        acc = 1
        for s in self.shape:
            strides.append(acc)
            acc *= s
        return tuple(strides)

    def contains(self, c: Coord) -> bool:
        return len(c) == self.dim and all(lo <= v <= hi for v, lo, hi in zip(c, self.lower, self.upper))

    def index_of(self, c: Coord) -> int:
        return sum((v - lo) * st for v, lo, st in zip(c, self.lower, self.strides))

    def coord_of(self, index: int) -> Coord:
        result = []
        for lo, s in zip(self.lower, self.shape):
            index, r = divmod(index, s)
            result.append(lo + r)
        return tuple(result)

    def coords(self) -> List[Coord]:
        """全部格点，按下标顺序"""
        return [self.coord_of(i) for i in range(self.size)]

    def wrap(self, c: Coord) -> Coord:
        """周期化到矩形内"""
        return tuple(lo + (v - lo) % s for v, lo, s in zip(c, self.lower, self.shape))


@dataclass(frozen=True)
class Graph:
    """
    有限、简单、无向、连通图

    Attributes:
        adjacency: 每个顶点的邻居 (升序元组)
        coords: 格点嵌入坐标，None 表示一般图
        box: 格点图所在矩形
        periodic: 是否为周期格点 (环面)
        name: 描述性名称，不参与相等比较
    """
    adjacency: Tuple[Tuple[int, ...], ...]
    coords: Optional[Tuple[Coord, ...]] = None
    box: Optional[Rectangle] = None
    periodic: bool = False
    name: str = field(default="graph", compare=False)

    def __post_init__(self):
        adjacency = tuple(tuple(sorted(set(int(y) for y in nbrs))) for nbrs in self.adjacency)
        object.__setattr__(self, "adjacency", adjacency)
        n = len(adjacency)
        if n == 0:
            raise TopologyError("图至少需要一个顶点")

        for x, nbrs in enumerate(adjacency):
            for y in nbrs:
                if y == x:
                    raise TopologyError("存在自环", f"顶点 {x}")
                if not 0 <= y < n:
                    raise TopologyError("邻居下标越界", f"顶点 {x} 的邻居 {y}")
                if x not in adjacency[y]:
                    raise TopologyError("邻接表不对称", f"边 ({x}, {y})")

        if self.coords is not None:
            coords = tuple(tuple(int(v) for v in c) for c in self.coords)
            object.__setattr__(self, "coords", coords)
            if len(coords) != n:
                raise TopologyError("坐标数量与顶点数不一致", f"{len(coords)} != {n}")
            if len(set(coords)) != n:
                raise TopologyError("坐标重复")
            if self.periodic and self.box is None:
                raise TopologyError("周期格点必须给出 box")
            for x, nbrs in enumerate(adjacency):
                for y in nbrs:
                    if y > x and self.lattice_distance(coords[x], coords[y]) != 1:
                        raise TopologyError("格点边的坐标差不是单位向量",
                                            f"{coords[x]} -- {coords[y]}")

        n_components, _ = csgraph.connected_components(self.csr, directed=False)
        if n_components != 1:
            raise TopologyError("图不连通", f"{n_components} 个连通分支")

    # ------------------------------------------------------------------
    # 基本属性

    @property
    def n_vertices(self) -> int:
        return len(self.adjacency)

    def __len__(self) -> int:
        return len(self.adjacency)

    @property
    def has_embedding(self) -> bool:
        return self.coords is not None

    @property
    def dim(self) -> int:
        if self.coords is None:
            return 0
        return len(self.coords[0])

    @cached_property
    def max_degree(self) -> int:
        return max(len(nbrs) for nbrs in self.adjacency)

    def degree(self, x: int) -> int:
        return len(self.adjacency[x])

    def neighbors(self, x: int) -> Tuple[int, ...]:
        return self.adjacency[x]

    def edges(self) -> List[Tuple[int, int]]:
        return [(x, y) for x, nbrs in enumerate(self.adjacency) for y in nbrs if x < y]

    @cached_property
    def csr(self) -> sparse.csr_matrix:
        """邻接矩阵 (CSR，列下标升序)"""
        n = len(self.adjacency)
        indptr = np.zeros(n + 1, dtype=np.int64)
        indptr[1:] = np.cumsum([len(nbrs) for nbrs in self.adjacency])
        indices = np.fromiter(itertools.chain.from_iterable(self.adjacency),
                              dtype=np.int32, count=int(indptr[-1]))
        data = np.ones(len(indices), dtype=np.float64)
        return sparse.csr_matrix((data, indices, indptr), shape=(n, n))

    @cached_property
    def _coord_index(self) -> Dict[Coord, int]:
        if self.coords is None:
            return {}
        return {c: i for i, c in enumerate(self.coords)}

    def index_of(self, c: Coord) -> Optional[int]:
        """坐标对应的顶点下标，不在图中返回 None"""
        c = tuple(c)
        if self.periodic and self.box is not None and len(c) == self.box.dim:
            c = self.box.wrap(c)
        return self._coord_index.get(c)

    def lattice_distance(self, a: Coord, b: Coord) -> int:
        """L1 距离，周期格点取最小镜像"""
        if not self.periodic:
            return sum(abs(u - v) for u, v in zip(a, b))
        total = 0
        for u, v, s in zip(a, b, self.box.shape):
            d = abs(u - v) % s
            total += min(d, s - d)
        return total

    def distances_from(self, x: int) -> np.ndarray:
        """图距离 d(x, ·)"""
        return csgraph.shortest_path(self.csr, unweighted=True, indices=x, directed=False)

    def with_name(self, name: str) -> "Graph":
        return Graph(self.adjacency, self.coords, self.box, self.periodic, name)


# ----------------------------------------------------------------------
# 构造函数

def from_edges(n_vertices: int, edges: Iterable[Tuple[int, int]], name: str = "graph") -> Graph:
    """由边列表构造一般图"""
    adjacency: List[set] = [set() for _ in range(n_vertices)]
    for u, v in edges:
        u, v = int(u), int(v)
        if not (0 <= u < n_vertices and 0 <= v < n_vertices):
            raise TopologyError("边端点越界", f"({u}, {v}), |V| = {n_vertices}")
        adjacency[u].add(v)
        adjacency[v].add(u)
    return Graph(tuple(tuple(s) for s in adjacency), name=name)


def lattice(rect: Rectangle, periodic: bool = False) -> Graph:
    """
    矩形格点图

    Args:
        rect: 矩形
        periodic: 是否在每个方向上周期化 (每个方向长度至少 3)
    """
    if periodic and any(s < 3 for s in rect.shape):
        raise TopologyError("周期格点每个方向的长度至少为 3", f"shape={rect.shape}")
    coords = rect.coords()
    adjacency = []
    for c in coords:
        nbrs = set()
        for alpha in _offsets(rect.dim, NeighborhoodKind.N):
            y = tuple(u + a for u, a in zip(c, alpha))
            if periodic:
                y = rect.wrap(y)
            elif not rect.contains(y):
                continue
            nbrs.add(rect.index_of(y))
        adjacency.append(tuple(nbrs))
    shape = "x".join(str(s) for s in rect.shape)
    name = f"{'torus' if periodic else 'lattice'}[{shape}]"
    return Graph(tuple(adjacency), tuple(coords), rect, periodic, name)


def path_graph(n: int) -> Graph:
    """长度为 n 的一维格点段 {0, ..., n-1}"""
    return lattice(Rectangle((0,), (n - 1,)))


def star_graph(leaves: int) -> Graph:
    """中心为 0 的星形图"""
    return from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)], name=f"star[{leaves}]")


def complete_binary_tree(depth: int) -> Graph:
    """
    深度为 depth 的满二叉树 (堆序: 0 为根，x 的孩子为 2x+1, 2x+2)

    depth = 0 时只有根。
    """
    n = 2 ** (depth + 1) - 1
    edges = [(x, c) for x in range(n) for c in (2 * x + 1, 2 * x + 2) if c < n]
    return from_edges(n, edges, name=f"binary-tree[{depth}]")


def random_connected_graph(n_vertices: int, p: float, seed: int, max_tries: int = 10000) -> Graph:
    """
    带种子的 Erdős–Rényi 图，拒绝采样直到连通

    Args:
        n_vertices: 顶点数
        p: 连边概率
        seed: 随机种子
        max_tries: 最大尝试次数
    """
    if n_vertices == 1:
        return Graph(((),), name="random[1]")
    rng = stream(seed, StreamTag.GRAPH, n_vertices)
    pairs = list(itertools.combinations(range(n_vertices), 2))
    for _ in range(max_tries):
        keep = rng.random(len(pairs)) < p
        edges = [e for e, k in zip(pairs, keep) if k]
        adjacency: List[set] = [set() for _ in range(n_vertices)]
        for u, v in edges:
            adjacency[u].add(v)
            adjacency[v].add(u)
        m = sparse.coo_matrix((np.ones(len(edges)), ([u for u, _ in edges], [v for _, v in edges])),
                              shape=(n_vertices, n_vertices))
        if csgraph.connected_components(m, directed=False)[0] == 1:
            return Graph(tuple(tuple(s) for s in adjacency), name=f"random[{n_vertices},{p}]")
    raise TopologyError("无法生成连通随机图", f"n={n_vertices}, p={p}, 尝试 {max_tries} 次")


def random_tree(n_vertices: int, seed: int) -> Graph:
    """带种子的随机递归树: 顶点 i 的父亲在 [0, i) 中均匀选取"""
    rng = stream(seed, StreamTag.GRAPH, n_vertices, 1)
    edges = [(i, int(rng.integers(0, i))) for i in range(1, n_vertices)]
    return from_edges(n_vertices, edges, name=f"random-tree[{n_vertices}]")


# ----------------------------------------------------------------------
# 邻域与边界

def neighborhood(g: Graph, x: int, kind: NeighborhoodKind = NeighborhoodKind.N,
                 extended: bool = False) -> FrozenSet[Coord]:
    """
    格点顶点 x 的邻域 (坐标集合)

    Args:
        g: 带嵌入的格点图
        x: 顶点下标
        kind: N, N*, K 或 K*
        extended: True 时保留落在矩形外的虚拟格点

    Returns:
        FrozenSet[Coord]: 邻域格点坐标；周期格点上坐标已周期化

    Raises:
        TopologyError: 图没有格点嵌入
    """
    if not g.has_embedding:
        raise TopologyError("邻域只对格点图有定义", f"图 {g.name} 没有坐标嵌入")
    c = g.coords[x]
    result = set()
    for alpha in _offsets(g.dim, kind):
        y = tuple(u + a for u, a in zip(c, alpha))
        if g.periodic:
            y = g.box.wrap(y)
            if y == c:
                continue
        elif not extended and g.index_of(y) is None:
            continue
        result.add(y)
    return frozenset(result)


def boundary(rect: Rectangle, kind: BoundaryKind = BoundaryKind.FORWARD) -> FrozenSet[Coord]:
    """
    正向边界 ∂₊R = (∪_{x∈R} K_x) \\ R，或 ∂₊*R (由 K* 生成)
    """
    nkind = NeighborhoodKind.K if kind is BoundaryKind.FORWARD else NeighborhoodKind.K_STAR
    result = set()
    for c in rect.coords():
        for alpha in _offsets(rect.dim, nkind):
            y = tuple(u + a for u, a in zip(c, alpha))
            if not rect.contains(y):
                result.add(y)
    return frozenset(result)


def graph_boundary(g: Graph, subset: Iterable[int]) -> Tuple[int, ...]:
    """外边界 ∂V' = {y ∉ V' : y 与 V' 中某点相邻}"""
    inside = set(subset)
    result = set()
    for x in inside:
        for y in g.adjacency[x]:
            if y not in inside:
                result.add(y)
    return tuple(sorted(result))


def ball(g: Graph, center: int, radius: int) -> Tuple[int, ...]:
    """图距离不超过 radius 的顶点"""
    dist = g.distances_from(center)
    return tuple(int(v) for v in np.flatnonzero(dist <= radius))


def induced_subgraph(g: Graph, vertices: Iterable[int]) -> Tuple[Graph, Tuple[int, ...]]:
    """
    诱导子图

    Returns:
        (子图, 新下标到原下标的映射)
    """
    keep = tuple(sorted(set(vertices)))
    position = {v: i for i, v in enumerate(keep)}
    adjacency = tuple(tuple(position[y] for y in g.adjacency[v] if y in position) for v in keep)
    coords = None
    if g.has_embedding and not g.periodic:
        coords = tuple(g.coords[v] for v in keep)
    return Graph(adjacency, coords, g.box if coords else None, False, f"{g.name}[induced]"), keep


# ----------------------------------------------------------------------
# 有根树

@dataclass(frozen=True)
class RootedTree:
    """
    有根生成树

    Attributes:
        graph: 树所在的原图 (约束只使用树边，但模型共享原图)
        root: 根
        parents: 每个顶点的父亲，根为 -1
    """
    graph: Graph
    root: int
    parents: Tuple[int, ...]

    def __post_init__(self):
        parents = tuple(int(p) for p in self.parents)
        object.__setattr__(self, "parents", parents)
        n = self.graph.n_vertices
        if len(parents) != n:
            raise TopologyError("父亲数组长度与顶点数不一致")
        if parents[self.root] != -1:
            raise TopologyError("根的父亲必须为 -1", f"root={self.root}")
        for x, p in enumerate(parents):
            if x == self.root:
                continue
            if p not in self.graph.adjacency[x]:
                raise TopologyError("树边不是图的边", f"({x}, {p})")
        for x in range(n):
            steps, y = 0, x
            while y != self.root:
                y = parents[y]
                steps += 1
                if y < 0 or steps > n:
                    raise TopologyError("父亲关系不构成以根为根的树", f"顶点 {x}")

    @property
    def n_vertices(self) -> int:
        return self.graph.n_vertices

    def parent(self, x: int) -> Optional[int]:
        p = self.parents[x]
        return None if p < 0 else p

    @cached_property
    def children(self) -> Tuple[Tuple[int, ...], ...]:
        kids: List[List[int]] = [[] for _ in range(self.n_vertices)]
        for x, p in enumerate(self.parents):
            if p >= 0:
                kids[p].append(x)
        return tuple(tuple(sorted(k)) for k in kids)

    @cached_property
    def layer_order(self) -> Tuple[int, ...]:
        """从根开始的逐层顺序，同层按下标"""
        order = [self.root]
        i = 0
        while i < len(order):
            order.extend(self.children[order[i]])
            i += 1
        return tuple(order)

    @cached_property
    def depths(self) -> Tuple[int, ...]:
        depth = [0] * self.n_vertices
        for x in self.layer_order[1:]:
            depth[x] = depth[self.parents[x]] + 1
        return tuple(depth)

    def tree_degree(self, x: int) -> int:
        return len(self.children[x]) + (0 if x == self.root else 1)

    def subtree(self, a: int) -> FrozenSet[int]:
        """以 a 为根的子树 T_a"""
        result = [a]
        i = 0
        while i < len(result):
            result.extend(self.children[result[i]])
            i += 1
        return frozenset(result)

    def path_to_root(self, x: int) -> List[int]:
        """从 x 到根的路径 (含两端)"""
        path = [x]
        while path[-1] != self.root:
            path.append(self.parents[path[-1]])
        return path

    def tree_graph(self) -> Graph:
        """只含树边的图"""
        edges = [(x, p) for x, p in enumerate(self.parents) if p >= 0]
        return from_edges(self.n_vertices, edges, name=f"{self.graph.name}[tree]")

    def restrict(self, vertices: Iterable[int]) -> Tuple["RootedTree", Tuple[int, ...]]:
        """
        限制到一个包含根且对父亲封闭的顶点子集

        Returns:
            (子树, 新下标到原下标的映射)
        """
        keep = tuple(sorted(set(vertices)))
        position = {v: i for i, v in enumerate(keep)}
        if self.root not in position:
            raise TopologyError("限制集合必须包含根", f"root={self.root}")
        edges = []
        for v in keep:
            p = self.parents[v]
            if p < 0:
                continue
            if p not in position:
                raise TopologyError("限制集合对父亲关系不封闭", f"顶点 {v} 的父亲 {p}")
            edges.append((position[v], position[p]))
        sub_graph = from_edges(len(keep), edges, name=f"{self.graph.name}[restricted]")
        parents = [-1] * len(keep)
        for v in keep:
            if self.parents[v] >= 0:
                parents[position[v]] = position[self.parents[v]]
        return RootedTree(sub_graph, position[self.root], tuple(parents)), keep


def spanning_tree(g: Graph, root: int) -> RootedTree:
    """
    以 root 为根的广度优先生成树，邻居按最小下标优先

    Raises:
        TopologyError: 图不连通
    """
    order, predecessors = csgraph.breadth_first_order(
        g.csr, root, directed=True, return_predecessors=True)
    if len(order) != g.n_vertices:
        raise TopologyError("图不连通，无法生成生成树")
    parents = tuple(int(p) if p >= 0 else -1 for p in predecessors)
    return RootedTree(g, root, parents)


@dataclass(frozen=True)
class TreeSplit:
    """树的分支点拆分 T = A ∪ B"""
    branch: int
    child: int
    part_a: Tuple[int, ...]
    part_b: Tuple[int, ...]

    def subtrees(self, tree: RootedTree) -> Tuple[RootedTree, RootedTree]:
        return tree.restrict(self.part_a)[0], tree.restrict(self.part_b)[0]


def split_tree(tree: RootedTree) -> Optional[TreeSplit]:
    """
    在第一个分支点处拆分有根树

    v 为根 (若根至少有两个孩子)，否则为离根最近的树度数 ≥ 3 的顶点；
    a 为 v 的最小下标孩子。A = 路径(r..v) ∪ T_a，B = T \\ T_a。

    Returns:
        TreeSplit；树为一条以根为端点的路径时返回 None
    """
    r = tree.root
    branch = None
    if len(tree.children[r]) >= 2:
        branch = r
    else:
        for x in tree.layer_order[1:]:
            if tree.tree_degree(x) >= 3:
                branch = x
                break
    if branch is None:
        return None

    child = tree.children[branch][0]
    sub = tree.subtree(child)
    part_a = set(tree.path_to_root(branch)) | sub
    part_b = set(range(tree.n_vertices)) - sub
    return TreeSplit(branch, child, tuple(sorted(part_a)), tuple(sorted(part_b)))
