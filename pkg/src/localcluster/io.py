"""File formats: tab-separated edge lists, label/feature CSVs, result JSON.

Every writer can embed a ``# config: {...}`` comment carrying the resolved
run configuration (sorted-key JSON) and, unless suppressed, a ``# created:``
timestamp.  Readers skip all ``#`` comments except the ``# nodes: N`` header,
which preserves isolated nodes across a round trip.
"""

from __future__ import annotations

import json
import time

import numpy as np
import scipy.sparse as sp

from .datagen import FeatureMatrix
from .graph import Graph, build_graph

__all__ = [
    "write_edge_list",
    "read_edge_list",
    "write_labels",
    "read_labels",
    "write_features",
    "read_features",
    "write_json",
    "read_json",
    "write_csv",
    "fmt_float",
]


def fmt_float(x: float) -> str:
    """Six significant digits, the fixed precision of all CSV output."""
    return format(float(x), ".6g")


def _meta_lines(config: dict | None, no_meta: bool) -> list:
    lines = []
    if config is not None:
        lines.append("# config: " + json.dumps(config, sort_keys=True, separators=(",", ":")))
    if not no_meta:
        lines.append("# created: " + time.strftime("%Y-%m-%dT%H:%M:%S%z"))
    return lines


def write_edge_list(path, g: Graph, config: dict | None = None, no_meta: bool = False) -> None:
    """One line per undirected edge ``u<TAB>v<TAB>w`` with u <= v.

    A ``# nodes: N`` header records the full index space so isolated and
    inactive-free graphs round trip exactly.
    """
    A = g.adjacency.tocoo()
    keep = A.row <= A.col
    rows, cols, data = A.row[keep], A.col[keep], A.data[keep]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# nodes: {g.n}\n")
        for line in _meta_lines(config, no_meta):
            fh.write(line + "\n")
        for u, v, w in zip(rows, cols, data):
            fh.write(f"{u}\t{v}\t{w:.17g}\n")


def read_edge_list(path) -> Graph:
    """Parse the edge-list format; ``w`` defaults to 1.0 when omitted."""
    n = None
    edges = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if body.startswith("nodes:"):
                    n = int(body.split(":", 1)[1])
                continue
            parts = line.split("\t")
            if len(parts) == 1:
                parts = line.split()
            if len(parts) not in (2, 3):
                raise ValueError(f"{path}:{lineno}: expected 'u<TAB>v[<TAB>w]', got {line!r}")
            u, v = int(parts[0]), int(parts[1])
            w = float(parts[2]) if len(parts) == 3 else 1.0
            edges.append((u, v, w))
    if n is None and not edges:
        raise ValueError(f"{path}: empty edge list without a '# nodes:' header")
    if n is not None and not edges:
        return Graph(sp.csr_matrix((n, n)))
    return build_graph(edges, n=n)


def write_labels(path, labels: np.ndarray, config: dict | None = None, no_meta: bool = False) -> None:
    """CSV ``node_id,label`` with one row per node."""
    labels = np.asarray(labels, dtype=np.int64)
    with open(path, "w", encoding="utf-8") as fh:
        for line in _meta_lines(config, no_meta):
            fh.write(line + "\n")
        fh.write("node_id,label\n")
        for i, lab in enumerate(labels):
            fh.write(f"{i},{lab}\n")


def read_labels(path) -> np.ndarray:
    """Read a ``node_id,label`` CSV into a dense label vector."""
    pairs = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if line == "node_id,label":
                continue
            parts = line.split(",")
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected 'node_id,label', got {line!r}")
            pairs[int(parts[0])] = int(parts[1])
    if not pairs:
        raise ValueError(f"{path}: no label rows")
    n = max(pairs) + 1
    missing = n - len(pairs)
    if missing:
        raise ValueError(f"{path}: {missing} node ids between 0 and {n - 1} have no label")
    out = np.empty(n, dtype=np.int64)
    for i, lab in pairs.items():
        out[i] = lab
    return out


def write_features(path, f: FeatureMatrix, config: dict | None = None, no_meta: bool = False) -> None:
    """CSV with columns ``f0..f{d-1}`` plus a final ``label`` column when
    the matrix carries labels."""
    n, d = f.values.shape
    with open(path, "w", encoding="utf-8") as fh:
        for line in _meta_lines(config, no_meta):
            fh.write(line + "\n")
        header = [f"f{j}" for j in range(d)]
        if f.labels is not None:
            header.append("label")
        fh.write(",".join(header) + "\n")
        for i in range(n):
            row = [f"{x:.17g}" for x in f.values[i]]
            if f.labels is not None:
                row.append(str(f.labels[i]))
            fh.write(",".join(row) + "\n")


def read_features(path) -> FeatureMatrix:
    """Read a feature CSV; a trailing ``label`` column becomes labels."""
    header = None
    rows = []
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if header is None:
                header = line.split(",")
                continue
            rows.append(line.split(","))
    if header is None or not rows:
        raise ValueError(f"{path}: no feature rows")
    has_label = header[-1] == "label"
    d = len(header) - (1 if has_label else 0)
    values = np.empty((len(rows), d))
    labels = np.empty(len(rows), dtype=np.int64) if has_label else None
    for i, parts in enumerate(rows):
        if len(parts) != len(header):
            raise ValueError(f"{path}: row {i} has {len(parts)} fields, header has {len(header)}")
        values[i] = [float(x) for x in parts[:d]]
        if has_label:
            labels[i] = int(parts[d])
    return FeatureMatrix(values=values, labels=labels)


def write_json(path, payload: dict) -> None:
    """Stable JSON: sorted keys, two-space indent, trailing newline."""
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_json(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def write_csv(path, header: list, rows: list, config: dict | None = None, no_meta: bool = False) -> None:
    """Comment-prefixed metadata, a header line, then rows.

    Floats are rendered with :func:`fmt_float`; everything else with str().
    """
    with open(path, "w", encoding="utf-8") as fh:
        for line in _meta_lines(config, no_meta):
            fh.write(line + "\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            cells = [fmt_float(x) if isinstance(x, float) else str(x) for x in row]
            fh.write(",".join(cells) + "\n")
