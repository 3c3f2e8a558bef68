"""Graphs with ordered edge slots, edge-ordering heuristics and the shift map.

A node's neighbor list is ordered and the position of a neighbor in that
list is the coin (spin) direction used to reach it.  Padding self-loops are
stored as the node's own id and always sit after the real edges.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .exceptions import GraphError

__all__ = [
    "Graph",
    "ShiftPermutation",
    "EdgeOrdering",
    "build_graph",
    "regularize_with_self_loops",
    "betweenness_centrality",
    "random_walk_similarity",
    "order_edges",
    "build_shift",
    "transition_matrix",
    "read_edge_list",
    "write_edge_list",
    "cycle_graph",
    "path_graph",
    "lattice_graph",
]


@dataclass(frozen=True)
class Graph:
    """Undirected graph whose per-node neighbor order is meaningful.

    Attributes
    ----------
    n_nodes : int
    neighbors : tuple of tuple of int
        ``neighbors[v][i]`` is the node reached from ``v`` through slot ``i``.
        An entry equal to ``v`` itself is a padding self-loop.
    d_max : int
        Coin dimension.  The maximum degree for a freshly built graph, or the
        target degree after :func:`regularize_with_self_loops`.
    """

    n_nodes: int
    neighbors: tuple[tuple[int, ...], ...]
    d_max: int

    def __post_init__(self):
        if len(self.neighbors) != self.n_nodes:
            raise GraphError(
                f"neighbors has {len(self.neighbors)} entries for {self.n_nodes} nodes"
            )
        for v, nbrs in enumerate(self.neighbors):
            if len(nbrs) > self.d_max:
                raise GraphError(f"node {v} has {len(nbrs)} slots > d_max={self.d_max}")

    @property
    def degrees(self) -> np.ndarray:
        """Number of real (non self-loop) edges at each node."""
        return np.array(
            [sum(u != v for u in nbrs) for v, nbrs in enumerate(self.neighbors)],
            dtype=int,
        )

    @property
    def self_loop_counts(self) -> np.ndarray:
        return np.array(
            [sum(u == v for u in nbrs) for v, nbrs in enumerate(self.neighbors)],
            dtype=int,
        )

    @property
    def n_slots(self) -> int:
        """Width of the spin axis; at least one so empty graphs still have a walk."""
        return max(self.d_max, 1)

    def real_neighbors(self, v: int) -> tuple[int, ...]:
        return tuple(u for u in self.neighbors[v] if u != v)

    def edges(self) -> list[tuple[int, int]]:
        """Unordered real edges as ``(min, max)`` pairs, in first-seen order."""
        seen = []
        for v, nbrs in enumerate(self.neighbors):
            for u in nbrs:
                if v < u:
                    seen.append((v, u))
        return seen

    def adjacency(self) -> np.ndarray:
        """Dense 0/1 adjacency of the real edges."""
        a = np.zeros((self.n_nodes, self.n_nodes))
        for v, nbrs in enumerate(self.neighbors):
            for u in nbrs:
                if u != v:
                    a[v, u] = 1.0
        return a

    def is_connected(self) -> bool:
        return self.n_components() <= 1

    def n_components(self) -> int:
        if self.n_nodes == 0:
            return 0
        rows, cols = [], []
        for v, nbrs in enumerate(self.neighbors):
            for u in nbrs:
                rows.append(v)
                cols.append(u)
        a = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(self.n_nodes,) * 2)
        n, _ = connected_components(a, directed=False)
        return int(n)

    def relabel(self, perm: Sequence[int]) -> "Graph":
        """Rename node ``v`` to ``perm[v]`` keeping every slot order."""
        perm = list(perm)
        if sorted(perm) != list(range(self.n_nodes)):
            raise GraphError("relabeling must be a permutation of the node ids")
        new = [None] * self.n_nodes
        for v, nbrs in enumerate(self.neighbors):
            new[perm[v]] = tuple(perm[u] for u in nbrs)
        return Graph(self.n_nodes, tuple(new), self.d_max)


@dataclass(frozen=True, eq=False)
class ShiftPermutation:
    """Involution on the flattened ``(node, slot)`` index space.

    ``perm[v * d + i] == u * d + j`` whenever ``u`` is the ``i``-th neighbor of
    ``v`` and ``v`` is the ``j``-th neighbor of ``u``; unpaired slots map to
    themselves.  Applying the shift is ``flat[perm]``.
    """

    n_nodes: int
    d: int
    pairs: tuple[tuple[tuple[int, int], tuple[int, int]], ...]
    perm: np.ndarray = field(repr=False)

    def is_involution(self) -> bool:
        return bool(np.array_equal(self.perm[self.perm], np.arange(self.perm.size)))


@dataclass(frozen=True)
class EdgeOrdering:
    """Edge ordering strategy: ``as-given``, ``centrality`` or ``similarity``."""

    kind: str = "as-given"
    power: int = 2

    KINDS = ("as-given", "centrality", "similarity")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown edge ordering {self.kind!r}; expected one of {self.KINDS}")
        if self.kind == "similarity" and int(self.power) < 1:
            raise ValueError("similarity ordering needs a walk power k >= 1")

    @classmethod
    def coerce(cls, value, power: int = 2) -> "EdgeOrdering":
        if isinstance(value, EdgeOrdering):
            return value
        return cls(str(value), int(power))


def build_graph(edge_list: Iterable[tuple[int, int]], n_nodes: int) -> Graph:
    """Build a graph whose neighbor lists follow the order of ``edge_list``.

    Raises
    ------
    GraphError
        On out-of-range ids, self-loops or duplicate (in either direction) edges.
    """
    n_nodes = int(n_nodes)
    if n_nodes < 0:
        raise GraphError("n_nodes must be non-negative")
    nbrs: list[list[int]] = [[] for _ in range(n_nodes)]
    seen = set()
    for k, (u, v) in enumerate(edge_list):
        u, v = int(u), int(v)
        if not (0 <= u < n_nodes and 0 <= v < n_nodes):
            raise GraphError(f"edge #{k} ({u}, {v}) has a node id outside [0, {n_nodes})")
        if u == v:
            raise GraphError(f"edge #{k} is a self-loop on node {u}")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise GraphError(f"edge #{k} ({u}, {v}) is a duplicate")
        seen.add(key)
        nbrs[u].append(v)
        nbrs[v].append(u)
    d_max = max((len(x) for x in nbrs), default=0)
    return Graph(n_nodes, tuple(tuple(x) for x in nbrs), d_max)


def regularize_with_self_loops(g: Graph, d: int | None = None) -> Graph:
    """Pad every node with self-loop slots up to ``d`` (default ``g.d_max``).

    Existing slots keep their order; self-loops go last.
    """
    d = g.d_max if d is None else int(d)
    if d < g.d_max:
        raise GraphError(f"cannot regularize to d={d} below the graph's d_max={g.d_max}")
    new = tuple(tuple(nbrs) + (v,) * (d - len(nbrs)) for v, nbrs in enumerate(g.neighbors))
    return Graph(g.n_nodes, new, d)


def betweenness_centrality(g: Graph) -> np.ndarray:
    """Exact betweenness over unordered node pairs (Brandes accumulation).

    Pairs in different components have no shortest path and add nothing.
    """
    n = g.n_nodes
    adj = [g.real_neighbors(v) for v in range(n)]
    score = np.zeros(n)
    for s in range(n):
        stack = []
        preds: list[list[int]] = [[] for _ in range(n)]
        sigma = np.zeros(n)
        sigma[s] = 1.0
        dist = np.full(n, -1)
        dist[s] = 0
        queue = deque([s])
        while queue:
            v = queue.popleft()
            stack.append(v)
            for w in adj[v]:
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    queue.append(w)
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        delta = np.zeros(n)
        while stack:
            w = stack.pop()
            for v in preds[w]:
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w])
            if w != s:
                score[w] += delta[w]
    # every unordered pair was visited from both endpoints
    return score / 2.0


def transition_matrix(g: Graph, allow_isolated: bool = False) -> np.ndarray:
    """Row-stochastic classical walk matrix ``D^-1 A`` over real edges.

    Isolated nodes raise unless ``allow_isolated``, in which case their row is
    left at zero.
    """
    a = g.adjacency()
    deg = a.sum(axis=1)
    isolated = np.flatnonzero(deg == 0)
    if isolated.size and not allow_isolated:
        raise GraphError(f"isolated node(s) {isolated.tolist()} have no transition row")
    return a / np.where(deg == 0, 1.0, deg)[:, None]


def random_walk_similarity(g: Graph, k: int, allow_isolated: bool = False) -> np.ndarray:
    """Pairwise similarity ``S[i, j] = <row_i(W^k), row_j(W^k)>`` with ``W = D^-1 A``."""
    if int(k) < 1:
        raise ValueError("walk power k must be >= 1")
    wk = np.linalg.matrix_power(transition_matrix(g, allow_isolated), int(k))
    return wk @ wk.T


def _rank_key(score: float) -> float:
    # scores that agree to 12 significant digits count as ties
    return float(f"{score:.12g}")


def order_edges(g: Graph, strategy: EdgeOrdering | str = "as-given", power: int = 2) -> Graph:
    """Reassign slot indices by a ranking heuristic.

    ``centrality`` sorts every neighbor list by descending betweenness of the
    neighbor; ``similarity`` sorts the neighbors of ``v`` by descending
    random-walk similarity to ``v``.  Ties fall back to ascending node id and
    padding self-loops stay at the end.
    """
    strategy = EdgeOrdering.coerce(strategy, power)
    if strategy.kind == "as-given":
        return g
    if strategy.kind == "centrality":
        bc = betweenness_centrality(g)
        key = lambda v, u: (-_rank_key(bc[u]), u)  # noqa: E731
    else:
        sim = random_walk_similarity(g, strategy.power, allow_isolated=True)
        key = lambda v, u: (-_rank_key(sim[v, u]), u)  # noqa: E731
    new = []
    for v, nbrs in enumerate(g.neighbors):
        real = sorted((u for u in nbrs if u != v), key=lambda u: key(v, u))
        new.append(tuple(real) + (v,) * (len(nbrs) - len(real)))
    return Graph(g.n_nodes, tuple(new), g.d_max)


def build_shift(g: Graph) -> ShiftPermutation:
    """Construct the flip-flop shift for ``g`` on an ``n_nodes x n_slots`` grid."""
    d = g.n_slots
    perm = np.arange(g.n_nodes * d)
    pairs = []
    # slot of v inside u's list; neighbor lists never repeat a real neighbor
    position = [{u: i for i, u in enumerate(nbrs) if u != v} for v, nbrs in enumerate(g.neighbors)]
    for v, nbrs in enumerate(g.neighbors):
        for i, u in enumerate(nbrs):
            if u == v or v > u:
                continue
            j = position[u][v]
            perm[v * d + i] = u * d + j
            perm[u * d + j] = v * d + i
            pairs.append(((v, i), (u, j)))
    return ShiftPermutation(g.n_nodes, d, tuple(pairs), perm)


def read_edge_list(path, n_nodes: int | None = None) -> Graph:
    """Read ``u v`` pairs (0-indexed, ``#`` comments) into a :class:`Graph`."""
    edges = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.replace(",", " ").split()
            if len(parts) != 2:
                raise GraphError(f"{path}:{lineno}: expected 'u v', got {line!r}")
            edges.append((int(parts[0]), int(parts[1])))
    if n_nodes is None:
        n_nodes = 1 + max((max(e) for e in edges), default=-1)
    return build_graph(edges, n_nodes)


def write_edge_list(g: Graph, path) -> None:
    with open(path, "w") as fh:
        fh.write(f"# {g.n_nodes} nodes\n")
        for u, v in g.edges():
            fh.write(f"{u} {v}\n")


def cycle_graph(n: int) -> Graph:
    """Cycle whose slot 0 always points to ``v + 1`` and slot 1 to ``v - 1``."""
    if n < 3:
        raise GraphError("a cycle needs at least 3 nodes")
    nbrs = tuple(((v + 1) % n, (v - 1) % n) for v in range(n))
    return Graph(n, nbrs, 2)


def path_graph(n: int) -> Graph:
    """Path ``0 - 1 - ... - n-1`` listing the right neighbor before the left."""
    nbrs = []
    for v in range(n):
        nbrs.append(tuple(u for u in (v + 1, v - 1) if 0 <= u < n))
    return Graph(n, tuple(nbrs), max((len(x) for x in nbrs), default=0))


def lattice_graph(rows: int, cols: int) -> Graph:
    """Grid graph with slots ordered right, left, down, up where present."""
    nbrs = []
    for r in range(rows):
        for c in range(cols):
            cand = [(r, c + 1), (r, c - 1), (r + 1, c), (r - 1, c)]
            nbrs.append(
                tuple(rr * cols + cc for rr, cc in cand if 0 <= rr < rows and 0 <= cc < cols)
            )
    return Graph(rows * cols, tuple(nbrs), max((len(x) for x in nbrs), default=0))
