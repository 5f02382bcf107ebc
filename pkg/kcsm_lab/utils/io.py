#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
KCSM Lab File Formats

文件格式: 边列表、JSON/YAML 映射、带清单头的 CSV、相互作用表、二进制事件日志。
"""

import csv
import io
import json
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import yaml

from .helpers import canonical_json, ensure_directory, format_float

PathLike = Union[str, Path]

# 事件日志记录: 小端 f64 时刻, u32 顶点, u8 新状态, u8 标志
EVENT_DTYPE = np.dtype([("time", "<f8"), ("vertex", "<u4"), ("state", "u1"), ("flags", "u1")])


def read_mapping(path: PathLike) -> Dict[str, Any]:
    """按后缀读取 JSON 或 YAML 映射"""
    path = Path(path)
    with open(path, "r", encoding="utf-8") as f:
        if path.suffix.lower() in (".yaml", ".yml"):
            data = yaml.safe_load(f) or {}
        else:
            data = json.load(f)
    if not isinstance(data, dict):
        raise ValueError(f"{path}: 顶层必须是映射")
    return data


def write_mapping(path: PathLike, data: Mapping[str, Any]) -> Path:
    """按后缀写出 JSON 或 YAML 映射"""
    path = Path(path)
    ensure_directory(path.parent)
    with open(path, "w", encoding="utf-8") as f:
        if path.suffix.lower() in (".yaml", ".yml"):
            yaml.safe_dump(dict(data), f, default_flow_style=False, allow_unicode=True, sort_keys=True)
        else:
            json.dump(data, f, indent=2, ensure_ascii=False, sort_keys=True, default=str)
    return path


# ----------------------------------------------------------------------
# 边列表

def read_edge_list(path: PathLike):
    """
    读取边列表文件

    每行 "u v"，# 开头为注释；可选的 "n N" 行声明孤立顶点之外的顶点总数。
    """
    from ..core.topology import from_edges

    edges: List[Tuple[int, int]] = []
    n_declared: Optional[int] = None
    with open(path, "r", encoding="utf-8") as f:
        for lineno, raw in enumerate(f, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.replace(",", " ").split()
            if parts[0] == "n" and len(parts) == 2:
                n_declared = int(parts[1])
                continue
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: 期望 'u v'，收到 {raw.strip()!r}")
            edges.append((int(parts[0]), int(parts[1])))
    n = max([max(e) for e in edges] + [-1]) + 1
    if n_declared is not None:
        n = max(n, n_declared)
    return from_edges(max(n, 1), edges, name=Path(path).stem)


def write_edge_list(graph, path: PathLike) -> Path:
    path = Path(path)
    ensure_directory(path.parent)
    with open(path, "w", encoding="utf-8") as f:
        f.write(f"n {graph.n_vertices}\n")
        for u, v in graph.edges():
            f.write(f"{u} {v}\n")
    return path


# ----------------------------------------------------------------------
# CSV

def manifest_header(manifest: Mapping[str, Any]) -> List[str]:
    """清单头: 每行 '# key: value'，值为规范 JSON"""
    return [f"# {key}: {canonical_json(manifest[key])}" for key in sorted(manifest)]


def render_csv(columns: Sequence[str], rows: Iterable[Mapping[str, Any]],
               manifest: Optional[Mapping[str, Any]] = None) -> str:
    """把结果表渲染为带清单头的 CSV 文本"""
    buffer = io.StringIO()
    if manifest:
        for line in manifest_header(manifest):
            buffer.write(line + "\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        cells = []
        for col in columns:
            value = row.get(col)
            if isinstance(value, float):
                cells.append(format_float(value))
            elif value is None:
                cells.append("")
            else:
                cells.append(str(value))
        writer.writerow(cells)
    return buffer.getvalue()


def write_csv(path: PathLike, columns: Sequence[str], rows: Iterable[Mapping[str, Any]],
              manifest: Optional[Mapping[str, Any]] = None) -> Path:
    path = Path(path)
    ensure_directory(path.parent)
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(render_csv(columns, rows, manifest))
    return path


def read_csv(path: PathLike) -> Tuple[Dict[str, Any], List[Dict[str, str]]]:
    """读取带清单头的 CSV，返回 (清单, 行)"""
    manifest: Dict[str, Any] = {}
    body: List[str] = []
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            if line.startswith("# ") and not body:
                key, _, value = line[2:].partition(": ")
                manifest[key] = json.loads(value)
            else:
                body.append(line)
    reader = csv.DictReader(body)
    return manifest, list(reader)


# ----------------------------------------------------------------------
# 相互作用表

def _site_token(site) -> str:
    if isinstance(site, (tuple, list)):
        return ":".join(str(int(v)) for v in site)
    return str(int(site))


def _parse_site(token: str):
    token = token.strip()
    if ":" in token:
        return tuple(int(v) for v in token.split(":"))
    return int(token)


def write_interaction_table(path: PathLike, entries: Iterable[Tuple[Sequence, Sequence[float]]],
                            header: Mapping[str, Any]) -> Path:
    """
    写出相互作用表

    文件格式: 清单头之后每行 "A: v1,v2,...; table: val,val,..."，
    格点坐标写成 "x:y"，表按 A 中格点顺序的字典序 (第一个格点为最高位)。
    """
    path = Path(path)
    ensure_directory(path.parent)
    with open(path, "w", encoding="utf-8") as f:
        for line in manifest_header(header):
            f.write(line + "\n")
        for sites, table in entries:
            site_str = ",".join(_site_token(s) for s in sites)
            table_str = ",".join(repr(float(v)) for v in table)
            f.write(f"A: {site_str}; table: {table_str}\n")
    return path


def read_interaction_table(path: PathLike) -> Tuple[Dict[str, Any], List[Tuple[tuple, List[float]]]]:
    header: Dict[str, Any] = {}
    entries: List[Tuple[tuple, List[float]]] = []
    with open(path, "r", encoding="utf-8") as f:
        for lineno, raw in enumerate(f, 1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("# "):
                key, _, value = line[2:].partition(": ")
                header[key] = json.loads(value)
                continue
            try:
                left, right = line.split(";", 1)
                sites = tuple(_parse_site(t) for t in left.split(":", 1)[1].split(","))
                values = [float(v) for v in right.split(":", 1)[1].split(",")]
            except (ValueError, IndexError) as e:
                raise ValueError(f"{path}:{lineno}: 无法解析相互作用行: {e}")
            entries.append((sites, values))
    return header, entries


# ----------------------------------------------------------------------
# 事件日志

def write_events(path: PathLike, events: np.ndarray) -> Path:
    path = Path(path)
    ensure_directory(path.parent)
    np.ascontiguousarray(events, dtype=EVENT_DTYPE).tofile(path)
    return path


def read_events(path: PathLike) -> np.ndarray:
    return np.fromfile(path, dtype=EVENT_DTYPE)
