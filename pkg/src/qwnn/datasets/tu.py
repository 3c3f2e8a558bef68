"""Reader and writer for the TU graph-classification text layout.

Files (1-indexed node and graph ids)::

    <name>_A.txt                one "i, j" edge per line over global node ids
    <name>_graph_indicator.txt  graph id of every node
    <name>_node_labels.txt      integer label of every node (optional)
    <name>_graph_labels.txt     integer label of every graph
"""

from __future__ import annotations

import glob
import logging
import os
from dataclasses import dataclass

import numpy as np

from ..exceptions import DataError
from ..graph import build_graph
from ..samples import GraphSample

logger = logging.getLogger(__name__)


@dataclass
class TUDataset:
    name: str
    samples: list
    node_label_values: list | None
    graph_label_values: list
    node_labels: list

    @property
    def n_classes(self) -> int:
        return len(self.graph_label_values)

    @property
    def labels(self) -> np.ndarray:
        return np.array([s.y for s in self.samples])

    def summary(self) -> dict:
        sizes = [s.n_nodes for s in self.samples]
        return {
            "graphs": len(self.samples),
            "average_nodes": float(np.mean(sizes)) if sizes else 0.0,
            "max_nodes": max(sizes, default=0),
            "max_degree": max((int(s.graph.degrees.max(initial=0)) for s in self.samples), default=0),
            "node_classes": len(self.node_label_values or []),
            "graph_classes": self.n_classes,
        }


def _read_ints(path, per_line=1):
    rows = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                vals = [int(float(v)) for v in line.replace(",", " ").split()]
            except ValueError as exc:
                raise DataError(f"{path}:{lineno}: not an integer row: {line!r}") from exc
            if len(vals) != per_line:
                raise DataError(f"{path}:{lineno}: expected {per_line} values, got {len(vals)}")
            rows.append(vals if per_line > 1 else vals[0])
    return rows


def _dense(values, what):
    uniq = sorted(set(values))
    if uniq != list(range(uniq[0], uniq[0] + len(uniq))) or uniq[0] not in (0, 1):
        logger.warning("%s values %s are not contiguous; remapping to 0..%d", what, uniq, len(uniq) - 1)
    lookup = {v: i for i, v in enumerate(uniq)}
    return [lookup[v] for v in values], uniq


def _resolve(path, name):
    if os.path.isfile(path):
        path, base = os.path.split(path)
        name = name or base.rsplit("_A.txt", 1)[0]
    if name is None:
        found = glob.glob(os.path.join(path, "*_A.txt"))
        if len(found) != 1:
            raise DataError(f"cannot infer dataset name in {path!r}: found {len(found)} *_A.txt files")
        name = os.path.basename(found[0])[: -len("_A.txt")]
    return path, name


def load_tu_dataset(path, name: str | None = None) -> TUDataset:
    """Parse a TU dataset directory into one-hot :class:`GraphSample` objects."""
    path, name = _resolve(path, name)
    stem = os.path.join(path, name)
    try:
        edges = _read_ints(f"{stem}_A.txt", per_line=2)
        indicator = _read_ints(f"{stem}_graph_indicator.txt")
        graph_labels = _read_ints(f"{stem}_graph_labels.txt")
    except FileNotFoundError as exc:
        raise DataError(f"missing TU file: {exc.filename}") from exc
    node_file = f"{stem}_node_labels.txt"
    node_labels = _read_ints(node_file) if os.path.exists(node_file) else None

    n_nodes = len(indicator)
    n_graphs = len(graph_labels)
    if node_labels is not None and len(node_labels) != n_nodes:
        raise DataError(f"{len(node_labels)} node labels for {n_nodes} nodes")
    if indicator and (min(indicator) < 1 or max(indicator) > n_graphs):
        raise DataError(f"graph indicator refers to graphs outside 1..{n_graphs}")

    members: list[list[int]] = [[] for _ in range(n_graphs)]
    local = np.empty(n_nodes, dtype=int)
    for v, gid in enumerate(indicator):
        local[v] = len(members[gid - 1])
        members[gid - 1].append(v)

    per_graph_edges: list[list[tuple[int, int]]] = [[] for _ in range(n_graphs)]
    seen = set()
    for lineno, (a, b) in enumerate(edges, 1):
        if not (1 <= a <= n_nodes and 1 <= b <= n_nodes):
            raise DataError(f"{stem}_A.txt:{lineno}: dangling node id in edge ({a}, {b})")
        u, v = a - 1, b - 1
        if indicator[u] != indicator[v]:
            raise DataError(f"{stem}_A.txt:{lineno}: edge ({a}, {b}) joins two graphs")
        if u == v:
            logger.warning("dropping self-loop on node %d", a)
            continue
        key = (min(u, v), max(u, v))
        if key in seen:
            continue
        seen.add(key)
        per_graph_edges[indicator[u] - 1].append((local[u], local[v]))

    y, graph_values = _dense(graph_labels, "graph label")
    if node_labels is not None:
        node_ids, node_values = _dense(node_labels, "node label")
    else:
        node_ids, node_values = [0] * n_nodes, None
    width = len(node_values) if node_values else 1

    samples = []
    for gi in range(n_graphs):
        nodes = members[gi]
        g = build_graph(per_graph_edges[gi], len(nodes))
        x = np.zeros((len(nodes), width))
        x[np.arange(len(nodes)), [node_ids[v] for v in nodes]] = 1.0
        samples.append(GraphSample(g, x, y[gi]))
    logger.info("loaded %s: %d graphs", name, n_graphs)
    return TUDataset(name, samples, node_values, graph_values, node_labels or [])


def write_tu_dataset(ds: TUDataset, path, name: str | None = None) -> None:
    """Write ``ds`` back in the TU layout (edges listed per node, both directions)."""
    name = name or ds.name
    os.makedirs(path, exist_ok=True)
    stem = os.path.join(path, name)
    edge_lines, indicator, offset = [], [], 0
    for gi, s in enumerate(ds.samples, 1):
        for v, nbrs in enumerate(s.graph.neighbors):
            for u in nbrs:
                if u != v:
                    edge_lines.append(f"{offset + v + 1}, {offset + u + 1}")
        indicator += [str(gi)] * s.n_nodes
        offset += s.n_nodes
    _write_lines(f"{stem}_A.txt", edge_lines)
    _write_lines(f"{stem}_graph_indicator.txt", indicator)
    _write_lines(f"{stem}_graph_labels.txt", [str(ds.graph_label_values[s.y]) for s in ds.samples])
    if ds.node_label_values is not None:
        node_lines = []
        for s in ds.samples:
            node_lines += [str(ds.node_label_values[int(i)]) for i in s.x.argmax(axis=1)]
        _write_lines(f"{stem}_node_labels.txt", node_lines)


def _write_lines(path, lines):
    with open(path, "w") as fh:
        fh.write("".join(line + "\n" for line in lines))
