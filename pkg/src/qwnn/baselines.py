"""Classical diffusion baselines: diffusion-convolution (DCNN) and graph convolution (GCNN).

Both come as pure forward functions and as layers that plug into
:class:`qwnn.nn.ModelGraphNet`, so they share the head and training loop
with the quantum walk layer.
"""

from __future__ import annotations

import numpy as np

from .graph import Graph, transition_matrix
from .nn import Activation, Layer

__all__ = [
    "DcnnParams",
    "GcnnParams",
    "transition_powers",
    "normalized_adjacency",
    "dcnn_forward",
    "gcnn_forward",
    "DCNNLayer",
    "GCNNLayer",
]


class DcnnParams:
    """Hop-by-feature weights ``W`` of shape ``(K + 1, F)``."""

    def __init__(self, weights):
        w = np.asarray(weights, dtype=float)
        if w.ndim != 2:
            raise ValueError("DCNN weights must have shape (hops + 1, features)")
        self.weights = w

    @property
    def hops(self) -> int:
        return self.weights.shape[0] - 1


class GcnnParams:
    def __init__(self, weights, bias=None):
        w = np.asarray(weights, dtype=float)
        if not np.all(np.isfinite(w)):
            raise ValueError("GCNN weights must be finite")
        self.weights = w
        self.bias = None if bias is None else np.asarray(bias, dtype=float)


def transition_powers(g: Graph, hops: int) -> np.ndarray:
    """Stack ``[I, P, P^2, ..., P^K]`` of the walk matrix ``P = D^-1 A``."""
    if hops < 0:
        raise ValueError("hops must be >= 0")
    p = transition_matrix(g)
    out = np.empty((hops + 1, g.n_nodes, g.n_nodes))
    out[0] = np.eye(g.n_nodes)
    for k in range(1, hops + 1):
        out[k] = out[k - 1] @ p
    return out


def normalized_adjacency(g: Graph) -> np.ndarray:
    """``D~^-1/2 (A + I) D~^-1/2``; symmetric by construction."""
    a = g.adjacency() + np.eye(g.n_nodes)
    inv_sqrt = 1.0 / np.sqrt(a.sum(axis=1))
    return inv_sqrt[:, None] * a * inv_sqrt[None, :]


def dcnn_forward(g: Graph, x, p: DcnnParams, h="identity") -> np.ndarray:
    """``h(W * P* X)`` with output shape ``(N, K + 1, F)``."""
    x = np.asarray(x, dtype=float)
    diffused = np.einsum("knm,mf->nkf", transition_powers(g, p.hops), x)
    return Activation(h).forward(p.weights[None] * diffused)


def gcnn_forward(g: Graph, x, p: GcnnParams, h="identity") -> np.ndarray:
    """``h(A_hat X W (+ b))``."""
    z = normalized_adjacency(g) @ np.asarray(x, dtype=float) @ p.weights
    if p.bias is not None:
        z = z + p.bias
    return Activation(h).forward(z)


class DCNNLayer(Layer):
    """DCNN as a model layer; output rows are flattened ``(K + 1) * F`` vectors."""

    name = "dcnn"

    def __init__(self, n_features, hops, activation="identity", rng=None):
        super().__init__()
        rng = np.random.default_rng(rng)
        self.hops = int(hops)
        self.n_features = int(n_features)
        self.activation = Activation(activation)
        self._cache = {}
        # centered on 1 so an untrained layer is plain multi-hop diffusion
        limit = np.sqrt(6.0 / (self.hops + 1 + n_features))
        self.add_param("weights", rng.uniform(-limit, limit, (self.hops + 1, n_features)) + 1.0)

    def prepare(self, graph):
        hit = self._cache.get(id(graph))
        if hit is None or hit[0] is not graph:
            hit = (graph, transition_powers(graph, self.hops))
            self._cache[id(graph)] = hit
        return hit[1]

    def forward(self, x, powers):
        diffused = np.einsum("knm,bmf->bnkf", powers, x)
        z = self.params["weights"] * diffused
        y = self.activation.forward(z)
        b, n = x.shape[:2]
        return y.reshape(b, n, -1), (powers, diffused, z, y)

    def backward(self, g_out, cache):
        powers, diffused, z, y = cache
        g = self.activation.backward(g_out.reshape(z.shape), z, y)
        self.grads["weights"] += np.einsum("bnkf,bnkf->kf", g, diffused)
        return None


class GCNNLayer(Layer):
    """Single graph-convolution layer ``h(A_hat X W + b)``."""

    name = "gcnn"

    def __init__(self, n_in, n_out, activation="identity", bias=True, rng=None):
        super().__init__()
        rng = np.random.default_rng(rng)
        limit = np.sqrt(6.0 / (n_in + n_out))
        self.add_param("weights", rng.uniform(-limit, limit, (n_in, n_out)))
        if bias:
            self.add_param("bias", np.zeros(n_out))
        self.activation = Activation(activation)
        self._cache = {}

    def prepare(self, graph):
        hit = self._cache.get(id(graph))
        if hit is None or hit[0] is not graph:
            hit = (graph, normalized_adjacency(graph))
            self._cache[id(graph)] = hit
        return hit[1]

    def forward(self, x, a_hat):
        ax = np.einsum("nm,bmf->bnf", a_hat, x)
        z = ax @ self.params["weights"]
        if "bias" in self.params:
            z = z + self.params["bias"]
        y = self.activation.forward(z)
        return y, (ax, z, y)

    def backward(self, g_out, cache):
        ax, z, y = cache
        g = self.activation.backward(g_out, z, y)
        self.grads["weights"] += ax.reshape(-1, ax.shape[-1]).T @ g.reshape(-1, g.shape[-1])
        if "bias" in self.params:
            self.grads["bias"] += g.reshape(-1, g.shape[-1]).sum(axis=0)
        return None
