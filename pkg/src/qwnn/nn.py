"""Quantum-walk diffusion layers and dense heads with hand-written backward passes.

Every layer keeps its parameters in ``params`` and same-shaped gradient
buffers in ``grads``.  Names listed in ``frozen`` never receive gradient and
are skipped by optimizers.  Complex parameters use the gradient convention
``dL/dRe + i dL/dIm``.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Iterator

import numpy as np

from .exceptions import NotPreparedError
from .graph import EdgeOrdering, Graph, build_shift, order_edges, regularize_with_self_loops
from .walk import (
    COIN_MODES,
    COIN_PLACEMENTS,
    DEFAULT_NODE_BUDGET,
    check_node_budget,
    grover_coin,
    init_uniform_superposition,
    orthogonal_to_params,
    spatial_padding_masks,
    unitary_angles_backward,
    unitary_from_angles,
)

__all__ = [
    "Activation",
    "Layer",
    "QuantumWalkLayer",
    "Dense",
    "Readout",
    "LossSpec",
    "ModelSpec",
    "ModelGraphNet",
    "build_model",
]


# --------------------------------------------------------------------------
# activations
# --------------------------------------------------------------------------


class Activation:
    """Elementwise activation with its derivative.

    ``scaled-sigmoid`` maps onto ``[low, high]``; the bounds are set from
    training targets by the caller.
    """

    NAMES = ("identity", "relu", "sigmoid", "tanh", "scaled-sigmoid")

    def __init__(self, name: str = "identity", low: float = 0.0, high: float = 1.0):
        if name not in self.NAMES:
            raise ValueError(f"unknown activation {name!r}; expected one of {self.NAMES}")
        self.name = name
        self.low = float(low)
        self.high = float(high)

    def __repr__(self):
        return f"Activation({self.name!r})"

    def forward(self, z):
        if self.name == "identity":
            return z
        if self.name == "relu":
            return np.maximum(z, 0.0)
        if self.name == "tanh":
            return np.tanh(z)
        sig = 0.5 * (1.0 + np.tanh(0.5 * z))
        if self.name == "sigmoid":
            return sig
        return self.low + (self.high - self.low) * sig

    def backward(self, g, z, y):
        if self.name == "identity":
            return g
        if self.name == "relu":
            return g * (z > 0)
        if self.name == "tanh":
            return g * (1.0 - y * y)
        if self.name == "sigmoid":
            return g * y * (1.0 - y)
        sig = (y - self.low) / (self.high - self.low)
        return g * (self.high - self.low) * sig * (1.0 - sig)


# --------------------------------------------------------------------------
# layers
# --------------------------------------------------------------------------


class Layer:
    """Base class: parameter/gradient bookkeeping."""

    name = "layer"

    def __init__(self):
        self.params: dict[str, np.ndarray] = {}
        self.grads: dict[str, np.ndarray] = {}
        self.frozen: set[str] = set()

    def add_param(self, name, value, frozen=False):
        value = np.ascontiguousarray(value)
        self.params[name] = value
        self.grads[name] = np.zeros_like(value)
        if frozen:
            self.frozen.add(name)

    def trainable(self) -> Iterator[str]:
        return (k for k in self.params if k not in self.frozen)

    def zero_grad(self):
        for g in self.grads.values():
            g[...] = 0

    def prepare(self, graph: Graph):
        return None


@dataclass
class _WalkContext:
    graph: Graph
    shift_perm: np.ndarray
    phi0: np.ndarray
    grover: np.ndarray | None


class QuantumWalkLayer(Layer):
    """``T`` quantum steps, the diffusion matrix, then ``h(P X + b)``.

    Parameters
    ----------
    n_features : int
        Width of ``X``; the bias has this length.
    steps : int
        Walk length ``T``.
    d : int
        Slot dimension.  Temporal coins need every graph regularized to ``d``.
    placement : {"spatial", "temporal"}
    mode : {"fixed-grover", "unitary-parametrized", "unconstrained"}
    graph : Graph, optional
        Required for spatial coins and learned amplitudes, whose shapes depend
        on a single fixed graph.
    real : bool
        Real arithmetic; unitary phases are then pinned to 0 or pi.
    """

    name = "walk"

    def __init__(
        self,
        n_features,
        steps,
        d,
        placement="temporal",
        mode="fixed-grover",
        learn_amplitudes=False,
        learn_coins=True,
        real=True,
        activation="identity",
        ordering: EdgeOrdering | str = "as-given",
        similarity_power=2,
        graph: Graph | None = None,
        coin_noise=0.01,
        max_nodes=DEFAULT_NODE_BUDGET,
        rng=None,
    ):
        super().__init__()
        if placement not in COIN_PLACEMENTS:
            raise ValueError(f"coin placement must be one of {COIN_PLACEMENTS}")
        if mode not in COIN_MODES:
            raise ValueError(f"coin mode must be one of {COIN_MODES}")
        if steps < 0:
            raise ValueError("walk length must be >= 0")
        rng = np.random.default_rng(rng)
        self.n_features = int(n_features)
        self.steps = int(steps)
        self.placement = placement
        self.mode = mode
        self.real = bool(real)
        self.activation = Activation(activation)
        self.ordering = EdgeOrdering.coerce(ordering, similarity_power)
        self.max_nodes = max_nodes
        self._cache: dict[int, tuple[Graph, _WalkContext]] = {}
        self.dtype = np.float64 if self.real else np.complex128

        needs_graph = placement == "spatial" or learn_amplitudes
        if needs_graph and graph is None:
            raise ValueError("spatial coins and learned amplitudes need the graph at construction")
        self.graph = graph
        self.d = int(d)
        if graph is not None:
            ctx = self.prepare(graph)
            self.d = ctx.graph.n_slots

        d = self.d
        if placement == "spatial":
            prepared = self.prepare(graph).graph
            mat_mask, rot_mask, diag_mask = spatial_padding_masks(prepared)
            self._matrix_mask, self._rot_mask, self._diag_mask = mat_mask, rot_mask, diag_mask
            counts = [len(n) for n in prepared.neighbors]
            n_coins = prepared.n_nodes
        else:
            counts = [d] * self.steps
            n_coins = self.steps
            self._matrix_mask = self._rot_mask = self._diag_mask = None

        if mode == "unconstrained":
            coins = np.repeat(np.eye(d)[None], n_coins, axis=0)
            for i, c in enumerate(counts):
                if c:
                    coins[i, :c, :c] = grover_coin(c) + coin_noise * rng.standard_normal((c, c))
            self.add_param("coins", coins.astype(self.dtype), frozen=not learn_coins)
        elif mode == "unitary-parametrized":
            m = d * (d - 1) // 2
            thetas = np.zeros((n_coins, m))
            diag = np.zeros((n_coins, d))
            for i, c in enumerate(counts):
                if c:
                    p = orthogonal_to_params(grover_coin(c))
                    # the leading c(c-1)/2 pairs are exactly those inside the c x c block
                    thetas[i, : c * (c - 1) // 2] = p.thetas
                    diag[i, :c] = p.diag_phases
            self.add_param("thetas", thetas, frozen=not learn_coins)
            self.add_param("phis", np.zeros((n_coins, m)), frozen=self.real or not learn_coins)
            self.add_param("diag_phases", diag, frozen=self.real or not learn_coins)

        if learn_amplitudes:
            phi0 = self.prepare(graph).phi0
            self.add_param("amplitudes", phi0.astype(self.dtype))
            self._amp_mask = self._live_slots(graph)
        self.add_param("bias", np.zeros(self.n_features))

    def _live_slots(self, graph):
        g = self.prepare(graph).graph
        live = np.zeros((1, g.n_nodes, g.n_slots), dtype=bool)
        for v, nbrs in enumerate(g.neighbors):
            live[0, v, : len(nbrs)] = True
        return live

    # -- graph preparation --------------------------------------------------

    def prepare(self, graph: Graph) -> _WalkContext:
        """Order edges, pad (temporal) and build the shift; cached per graph."""
        hit = self._cache.get(id(graph))
        if hit is not None and hit[0] is graph:
            return hit[1]
        check_node_budget(graph.n_nodes, self.max_nodes)
        g = order_edges(graph, self.ordering)
        grover = None
        if self.placement == "temporal":
            if g.d_max > self.d:
                raise ValueError(f"graph max degree {g.d_max} exceeds the coin dimension {self.d}")
            g = regularize_with_self_loops(g, self.d)
            grover = grover_coin(g.n_slots)
        elif self.graph is not None and graph is not self.graph and graph != self.graph:
            raise ValueError("spatial coins are tied to the graph given at construction")
        else:
            grover = np.repeat(np.eye(g.n_slots)[None], g.n_nodes, axis=0)
            for v, nbrs in enumerate(g.neighbors):
                if nbrs:
                    grover[v, : len(nbrs), : len(nbrs)] = grover_coin(len(nbrs))
        ctx = _WalkContext(g, build_shift(g).perm, init_uniform_superposition(g, max_nodes=None), grover)
        self._cache[id(graph)] = (graph, ctx)
        return ctx

    # -- coins ----------------------------------------------------------------

    def coin_matrices(self, ctx: _WalkContext) -> np.ndarray:
        """Effective ``(count, d, d)`` coins for this forward pass."""
        if self.mode == "fixed-grover":
            if self.placement == "temporal":
                return np.repeat(ctx.grover[None], self.steps, axis=0)
            return ctx.grover
        if self.mode == "unconstrained":
            c = self.params["coins"]
            if self._matrix_mask is not None:
                eye = np.eye(c.shape[-1])[None]
                c = c * self._matrix_mask + eye * (1.0 - self._matrix_mask)
            return c
        th, ph, al = self._angles()
        return unitary_from_angles(th, ph, al, real=self.real)

    def _angles(self):
        th, ph, al = self.params["thetas"], self.params["phis"], self.params["diag_phases"]
        if self._rot_mask is not None:
            th, ph, al = th * self._rot_mask, ph * self._rot_mask, al * self._diag_mask
        return th, ph, al

    # -- forward / backward -----------------------------------------------------

    def walk(self, ctx: _WalkContext):
        """Evolve the walkers; returns (pre-coin states, coins, final state)."""
        coins = self.coin_matrices(ctx)
        if "amplitudes" in self.params:
            # padding slots of spatial walks are not part of the state space
            phi = self.params["amplitudes"] * self._amp_mask
        else:
            phi = ctx.phi0.astype(self.dtype)
        w, n, d = phi.shape
        states = []
        for t in range(self.steps):
            states.append(phi)
            if self.placement == "temporal":
                c = phi @ coins[t]
            else:
                c = np.einsum("wvk,vkm->wvm", phi, coins)
            phi = c.reshape(w, n * d)[:, ctx.shift_perm].reshape(w, n, d)
        return states, coins, phi

    def diffusion(self, graph: Graph) -> np.ndarray:
        """Diffusion matrix ``P`` for ``graph`` under current parameters."""
        _, _, phi = self.walk(self.prepare(graph))
        return np.sum(np.abs(phi) ** 2, axis=-1) if not self.real else np.sum(phi * phi, axis=-1)

    def forward(self, x, ctx: _WalkContext):
        states, coins, phi = self.walk(ctx)
        p = np.sum(phi.real**2 + phi.imag**2, axis=-1) if not self.real else np.sum(phi * phi, axis=-1)
        z = np.einsum("wv,bvf->bwf", p, x) + self.params["bias"]
        y = self.activation.forward(z)
        return y, (states, coins, phi, p, x, z, y, ctx)

    def backward(self, g_out, cache):
        states, coins, phi, p, x, z, y, ctx = cache
        gz = self.activation.backward(g_out, z, y)
        self.grads["bias"] += gz.sum(axis=(0, 1))
        gp = np.einsum("bwf,bvf->wv", gz, x)
        gphi = 2.0 * phi * gp[:, :, None]
        w, n, d = phi.shape
        g_coins = np.zeros(coins.shape, dtype=np.result_type(coins, phi))
        for t in range(self.steps - 1, -1, -1):
            # the shift is an involution, so its adjoint is itself
            gc = gphi.reshape(w, n * d)[:, ctx.shift_perm].reshape(w, n, d)
            prev = states[t]
            if self.placement == "temporal":
                g_coins[t] += np.einsum("wvk,wvm->km", np.conj(prev), gc)
                gphi = gc @ np.conj(coins[t]).T
            else:
                g_coins += np.einsum("wvk,wvm->vkm", np.conj(prev), gc)
                gphi = np.einsum("wvm,vkm->wvk", gc, np.conj(coins))
        if "amplitudes" in self.params and "amplitudes" not in self.frozen:
            self.grads["amplitudes"] += gphi * self._amp_mask
        self._coin_backward(coins, g_coins)
        return None

    def _coin_backward(self, coins, g_coins):
        if self.mode == "unconstrained" and "coins" not in self.frozen:
            if self._matrix_mask is not None:
                g_coins = g_coins * self._matrix_mask
            self.grads["coins"] += g_coins if not self.real else np.real(g_coins)
        elif self.mode == "unitary-parametrized" and "thetas" not in self.frozen:
            th, ph, al = self._angles()
            gt, gp, ga = unitary_angles_backward(th, ph, al, coins, g_coins, real=self.real)
            if self._rot_mask is not None:
                gt, gp, ga = gt * self._rot_mask, gp * self._rot_mask, ga * self._diag_mask
            self.grads["thetas"] += gt
            if not self.real:
                self.grads["phis"] += gp
                self.grads["diag_phases"] += ga


class Dense(Layer):
    """Affine map on the last axis followed by an activation."""

    name = "dense"

    def __init__(self, n_in, n_out, activation="identity", rng=None):
        super().__init__()
        rng = np.random.default_rng(rng)
        limit = np.sqrt(6.0 / (n_in + n_out))
        self.add_param("weights", rng.uniform(-limit, limit, (n_in, n_out)))
        self.add_param("bias", np.zeros(n_out))
        self.activation = activation if isinstance(activation, Activation) else Activation(activation)

    def forward(self, x, ctx=None):
        z = x @ self.params["weights"] + self.params["bias"]
        y = self.activation.forward(z)
        return y, (x, z, y)

    def backward(self, g_out, cache):
        x, z, y = cache
        gz = self.activation.backward(g_out, z, y)
        n_in = x.shape[-1]
        self.grads["weights"] += x.reshape(-1, n_in).T @ gz.reshape(-1, gz.shape[-1])
        self.grads["bias"] += gz.reshape(-1, gz.shape[-1]).sum(axis=0)
        return gz @ self.params["weights"].T


class Readout(Layer):
    """Pool node rows into one graph vector (``mean``, ``sum``, ``flatten``) or pass through."""

    name = "readout"
    KINDS = ("none", "mean", "sum", "flatten")

    def __init__(self, kind="none", pad_to=None):
        super().__init__()
        if kind not in self.KINDS:
            raise ValueError(f"readout must be one of {self.KINDS}")
        if kind == "flatten" and not pad_to:
            raise ValueError("flatten readout needs pad_to (the padded node count)")
        self.kind = kind
        self.pad_to = pad_to

    def forward(self, x, mask=None):
        b, n, f = x.shape
        m = np.ones(n) if mask is None else mask.astype(float)
        if self.kind == "none":
            return x, None
        if self.kind == "flatten":
            if n > self.pad_to:
                raise ValueError(f"graph has {n} nodes, more than pad_to={self.pad_to}")
            out = np.zeros((b, self.pad_to, f))
            out[:, :n] = x * m[None, :, None]
            return out.reshape(b, -1), (n, f, m)
        w = m / max(m.sum(), 1.0) if self.kind == "mean" else m
        return np.einsum("bnf,n->bf", x, w), (n, f, w)

    def backward(self, g_out, cache):
        if self.kind == "none":
            return g_out
        n, f, w = cache
        if self.kind == "flatten":
            b = g_out.shape[0]
            return g_out.reshape(b, self.pad_to, f)[:, :n] * w[None, :, None]
        return g_out[:, None, :] * w[None, :, None]


# --------------------------------------------------------------------------
# losses
# --------------------------------------------------------------------------


class LossSpec:
    """Training objective plus the metric reported for it.

    ``mse`` reports RMSE, ``mae`` reports MAE, ``cross-entropy`` works on
    logits and reports accuracy.
    """

    KINDS = {"mse": "rmse", "mae": "mae", "cross-entropy": "accuracy"}

    def __init__(self, kind="mse"):
        if kind not in self.KINDS:
            raise ValueError(f"loss must be one of {tuple(self.KINDS)}")
        self.kind = kind

    def __repr__(self):
        return f"LossSpec({self.kind!r})"

    @property
    def metric_name(self) -> str:
        return self.KINDS[self.kind]

    @property
    def higher_is_better(self) -> bool:
        return self.kind == "cross-entropy"

    def totals(self, out, y, mask=None):
        """Summed loss, summed metric numerator and element count for a group."""
        if self.kind == "cross-entropy":
            y = np.asarray(y, dtype=int).reshape(-1)
            logz = _logsumexp(out)
            nll = logz - out[np.arange(len(y)), y]
            correct = np.argmax(out, axis=-1) == y
            return float(nll.sum()), float(correct.sum()), len(y)
        err = out - np.asarray(y, dtype=float).reshape(out.shape)
        if mask is not None and out.ndim == 3:
            err = err * mask[None, :, None]
            count = out.shape[0] * int(mask.sum()) * out.shape[2]
        else:
            count = err.size
        if self.kind == "mse":
            s = float(np.sum(err * err))
            return s, s, count
        s = float(np.sum(np.abs(err)))
        return s, s, count

    def grad(self, out, y, mask=None):
        """Gradient of the *summed* loss of a group w.r.t. ``out``."""
        if self.kind == "cross-entropy":
            y = np.asarray(y, dtype=int).reshape(-1)
            prob = np.exp(out - _logsumexp(out)[:, None])
            prob[np.arange(len(y)), y] -= 1.0
            return prob
        err = out - np.asarray(y, dtype=float).reshape(out.shape)
        g = 2.0 * err if self.kind == "mse" else np.sign(err)
        if mask is not None and out.ndim == 3:
            g = g * mask[None, :, None]
        return g

    def finalize(self, loss_sum, metric_sum, count):
        """Turn accumulated totals into ``(loss, metric)``."""
        count = max(count, 1)
        loss = loss_sum / count
        if self.kind == "mse":
            return loss, float(np.sqrt(metric_sum / count))
        return loss, metric_sum / count


def _logsumexp(z):
    m = z.max(axis=-1)
    return m + np.log(np.exp(z - m[:, None]).sum(axis=-1))


# --------------------------------------------------------------------------
# model
# --------------------------------------------------------------------------


@dataclass
class ModelSpec:
    """Architecture description; enough to rebuild a model from a checkpoint."""

    n_features: int
    n_outputs: int
    task: str = "node"
    layer: str = "qwnn"
    steps: int = 0
    coin_placement: str = "temporal"
    coin_mode: str = "fixed-grover"
    learn_amplitudes: bool = False
    learn_coins: bool = True
    real: bool = True
    edge_ordering: str = "as-given"
    similarity_power: int = 2
    d: int = 1
    coin_noise: float = 0.01
    diffusion_activation: str = "identity"
    hops: int = 0
    gcnn_units: int | None = None
    hidden: tuple = ()
    hidden_activation: str = "relu"
    readout: str = "mean"
    pad_to: int | None = None
    output_activation: str = "identity"
    output_range: tuple | None = None
    max_nodes: int = DEFAULT_NODE_BUDGET
    extra: dict = field(default_factory=dict)

    def to_dict(self):
        out = asdict(self)
        out["hidden"] = list(self.hidden)
        out["output_range"] = None if self.output_range is None else list(self.output_range)
        return out

    @classmethod
    def from_dict(cls, data):
        data = dict(data)
        data["hidden"] = tuple(data.get("hidden", ()))
        if data.get("output_range") is not None:
            data["output_range"] = tuple(data["output_range"])
        return cls(**data)


class ModelGraphNet:
    """Graph layer, optional readout, dense head.

    ``forward`` takes a stack of feature matrices that share one graph,
    ``x`` of shape ``(B, N, F)``, and returns ``(out, tape)``.
    """

    def __init__(self, graph_layer: Layer, head: list[Dense], readout: Readout | None = None, spec=None):
        self.graph_layer = graph_layer
        self.readout = readout or Readout("none")
        self.head = list(head)
        self.spec = spec

    @property
    def layers(self) -> list[Layer]:
        return [self.graph_layer, *self.head]

    def _layer_names(self):
        names = [self.graph_layer.name]
        names += [f"dense{i}" for i in range(len(self.head))]
        return names

    def named_parameters(self, trainable_only=True):
        """Yield ``(path, param, grad)`` triples, e.g. ``("walk.coins", ...)``."""
        for lname, layer in zip(self._layer_names(), self.layers):
            for k, v in layer.params.items():
                if trainable_only and k in layer.frozen:
                    continue
                yield f"{lname}.{k}", v, layer.grads[k]

    def n_parameters(self, trainable_only=True) -> int:
        return sum(p.size for _, p, _ in self.named_parameters(trainable_only))

    def state_dict(self) -> dict[str, np.ndarray]:
        return {path: p.copy() for path, p, _ in self.named_parameters(trainable_only=False)}

    def load_state_dict(self, state):
        own = {path: p for path, p, _ in self.named_parameters(trainable_only=False)}
        missing = set(own) - set(state)
        if missing:
            raise KeyError(f"missing parameters: {sorted(missing)}")
        for path, p in own.items():
            value = np.asarray(state[path])
            if value.shape != p.shape:
                raise ValueError(f"{path}: shape {value.shape} does not match model {p.shape}")
            p[...] = value

    def zero_grad(self):
        for layer in self.layers:
            layer.zero_grad()

    def prepare(self, graph: Graph):
        return self.graph_layer.prepare(graph)

    def forward(self, x, graph: Graph, mask=None):
        x = np.asarray(x, dtype=float)
        if x.ndim == 2:
            x = x[None]
        if x.shape[1] != graph.n_nodes:
            raise ValueError(f"features have {x.shape[1]} rows for a graph of {graph.n_nodes} nodes")
        ctx = self.prepare(graph)
        tape = []
        h, c = self.graph_layer.forward(x, ctx)
        tape.append(c)
        h, c = self.readout.forward(h, mask)
        tape.append(c)
        for layer in self.head:
            h, c = layer.forward(h)
            tape.append(c)
        return h, tape

    def backward(self, tape, g_out):
        if not tape:
            raise NotPreparedError("backward called before forward")
        g = g_out
        for layer, c in zip(reversed(self.head), reversed(tape[2:])):
            g = layer.backward(g, c)
        g = self.readout.backward(g, tape[1])
        self.graph_layer.backward(g, tape[0])


def build_model(spec: ModelSpec, graph: Graph | None = None, rng=None) -> ModelGraphNet:
    """Instantiate a :class:`ModelGraphNet` from ``spec``."""
    from .baselines import DCNNLayer, GCNNLayer

    rng = np.random.default_rng(rng)
    f = spec.n_features
    if spec.layer == "qwnn":
        needs_graph = spec.coin_placement == "spatial" or spec.learn_amplitudes
        layer = QuantumWalkLayer(
            f,
            spec.steps,
            spec.d,
            placement=spec.coin_placement,
            mode=spec.coin_mode,
            learn_amplitudes=spec.learn_amplitudes,
            learn_coins=spec.learn_coins,
            real=spec.real,
            activation=spec.diffusion_activation,
            ordering=spec.edge_ordering,
            similarity_power=spec.similarity_power,
            graph=graph if needs_graph else None,
            coin_noise=spec.coin_noise,
            max_nodes=spec.max_nodes,
            rng=rng,
        )
        width = f
    elif spec.layer == "dcnn":
        layer = DCNNLayer(f, spec.hops, activation=spec.diffusion_activation, rng=rng)
        width = (spec.hops + 1) * f
    elif spec.layer == "gcnn":
        units = spec.gcnn_units or (spec.n_outputs if spec.task == "node" and not spec.hidden else f)
        layer = GCNNLayer(f, units, activation=spec.diffusion_activation, rng=rng)
        width = units
    else:
        raise ValueError(f"unknown graph layer {spec.layer!r}")

    readout = Readout("none") if spec.task == "node" else Readout(spec.readout, spec.pad_to)
    if readout.kind == "flatten":
        width = width * spec.pad_to

    head = []
    for units in spec.hidden:
        head.append(Dense(width, units, spec.hidden_activation, rng=rng))
        width = units
    direct = (
        spec.task == "node"
        and not spec.hidden
        and width == spec.n_outputs
        and spec.output_activation == "identity"
    )
    if not direct:
        if spec.output_activation == "scaled-sigmoid":
            lo, hi = spec.output_range or (0.0, 1.0)
            act = Activation("scaled-sigmoid", lo, hi)
        elif spec.output_activation == "softmax":
            act = Activation("identity")  # softmax lives in the cross-entropy loss
        else:
            act = Activation(spec.output_activation)
        head.append(Dense(width, spec.n_outputs, act, rng=rng))
    return ModelGraphNet(layer, head, readout, spec)
