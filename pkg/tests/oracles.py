"""Independent reference implementations used as test oracles.

Nothing here imports the walk engine or the graph algorithms under test;
inputs are plain neighbor lists and numpy/fractions arithmetic.
"""

from __future__ import annotations

import itertools
from collections import deque
from fractions import Fraction

import numpy as np


# ---------------------------------------------------------------- graphs


def all_graphs(n):
    """Every labeled simple graph on ``n`` nodes as a sorted edge list."""
    pairs = list(itertools.combinations(range(n), 2))
    for mask in range(1 << len(pairs)):
        yield [p for b, p in enumerate(pairs) if mask >> b & 1]


def is_connected(n, edges):
    if n == 0:
        return True
    adj = adjacency_lists(n, edges)
    seen = {0}
    stack = [0]
    while stack:
        v = stack.pop()
        for u in adj[v]:
            if u not in seen:
                seen.add(u)
                stack.append(u)
    return len(seen) == n


def adjacency_lists(n, edges):
    adj = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    return adj


def all_shortest_paths(adj, s, t):
    """Enumerate every shortest s-t path explicitly (BFS layers, then DFS)."""
    dist = {s: 0}
    q = deque([s])
    while q:
        v = q.popleft()
        for u in adj[v]:
            if u not in dist:
                dist[u] = dist[v] + 1
                q.append(u)
    if t not in dist:
        return []
    paths = []

    def extend(path):
        v = path[-1]
        if v == t:
            paths.append(list(path))
            return
        for u in adj[v]:
            if dist.get(u) == dist[v] + 1 and dist[u] <= dist[t]:
                path.append(u)
                extend(path)
                path.pop()

    extend([s])
    return paths


def brute_betweenness(n, edges):
    """Exact betweenness over unordered pairs as Fractions."""
    adj = adjacency_lists(n, edges)
    score = [Fraction(0)] * n
    for s, t in itertools.combinations(range(n), 2):
        paths = all_shortest_paths(adj, s, t)
        for p in paths:
            for v in p[1:-1]:
                score[v] += Fraction(1, len(paths))
    return score


def brute_similarity(n, edges, k):
    """``S = W^k (W^k)^T`` with ``W = D^-1 A`` in exact arithmetic."""
    adj = adjacency_lists(n, edges)
    w = [[Fraction(0)] * n for _ in range(n)]
    for v in range(n):
        for u in adj[v]:
            w[v][u] = Fraction(1, len(adj[v]))
    p = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for _ in range(k):
        p = [[sum(p[i][m] * w[m][j] for m in range(n)) for j in range(n)] for i in range(n)]
    return [[sum(p[i][m] * p[j][m] for m in range(n)) for j in range(n)] for i in range(n)]


def ordered_by(score_of, neighbors):
    """Neighbors sorted by descending exact score, ties by ascending id."""
    return sorted(neighbors, key=lambda u: (-score_of(u), u))


# ---------------------------------------------------------------- walks


def dense_walk_operator(neighbors, d, coins):
    """Explicit ``U = S (blockdiag C_v^T)`` on the column vector ``psi[v*d + i]``.

    ``neighbors[v]`` lists the node behind each slot (``v`` itself marks a
    padding self-loop); ``coins[v]`` is the ``d x d`` coin at node ``v`` acting
    on row vectors.
    """
    n = len(neighbors)
    s = np.zeros((n * d, n * d))
    for v in range(n):
        for i in range(d):
            u = neighbors[v][i] if i < len(neighbors[v]) else v
            if u == v:
                s[v * d + i, v * d + i] = 1.0
            else:
                j = list(neighbors[u]).index(v)
                s[u * d + j, v * d + i] = 1.0
    c = np.zeros((n * d, n * d), dtype=np.result_type(*coins))
    for v in range(n):
        c[v * d : (v + 1) * d, v * d : (v + 1) * d] = np.asarray(coins[v]).T
    return s @ c


def dense_walk_distribution(neighbors, d, coins_per_step, psi0, steps):
    """Node probabilities after ``steps`` applications of ``U``.

    ``coins_per_step(t)`` returns the per-node coin list for step ``t``.
    """
    psi = np.asarray(psi0, dtype=complex)
    for t in range(steps):
        psi = dense_walk_operator(neighbors, d, coins_per_step(t)) @ psi
    return (np.abs(psi.reshape(len(neighbors), d)) ** 2).sum(axis=1)


def classical_distribution(n, edges, start, steps):
    adj = adjacency_lists(n, edges)
    p = np.zeros(n)
    p[start] = 1.0
    for _ in range(steps):
        q = np.zeros(n)
        for v in range(n):
            for u in adj[v]:
                q[u] += p[v] / len(adj[v])
        p = q
    return p


# ---------------------------------------------------------------- clustering


def brute_two_means(values):
    """Best threshold split of a 1-D sample by within-cluster sum of squares."""
    x = np.sort(np.asarray(values, dtype=float))
    best = None
    for cut in range(1, len(x)):
        lo, hi = x[:cut], x[cut:]
        sse = ((lo - lo.mean()) ** 2).sum() + ((hi - hi.mean()) ** 2).sum()
        if best is None or sse < best[0] - 1e-12:
            best = (sse, x[cut - 1])
    return best[1]  # largest value of the low cluster
