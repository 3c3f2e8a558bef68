"""scikit-learn style wrappers around :func:`qwnn.nn.build_model` and :func:`qwnn.training.train`.

Node-level estimators work on one fixed graph and take arrays
``X`` of shape ``(samples, nodes[, features])``.  Graph-level estimators take
lists of :class:`~qwnn.samples.GraphSample`.
"""

from __future__ import annotations

import inspect

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, RegressorMixin, TransformerMixin
from sklearn.metrics import r2_score
from sklearn.preprocessing import LabelEncoder
from sklearn.utils.validation import check_is_fitted

from .exceptions import ConfigError
from .nn import LossSpec, ModelSpec, QuantumWalkLayer, build_model
from .samples import GraphSample
from .training import TrainConfig, predict, train
from .validation import check_choice, check_graph, check_node_array, check_samples, require
from .walk import COIN_MODES, COIN_PLACEMENTS

__all__ = [
    "QuantumWalkNodeRegressor",
    "GraphRegressor",
    "GraphClassifier",
    "QuantumWalkDiffusion",
]

LAYERS = ("qwnn", "dcnn", "gcnn")


class _GraphNetBase(BaseEstimator):
    """Hyperparameters shared by every trainable estimator."""

    def __init__(
        self,
        layer="qwnn",
        steps=None,
        coin_placement="temporal",
        coin_mode="fixed-grover",
        learn_amplitudes=False,
        learn_coins=True,
        real=True,
        edge_ordering="as-given",
        similarity_power=2,
        hops=None,
        gcnn_units=None,
        diffusion_activation="identity",
        hidden=(),
        hidden_activation="relu",
        learning_rate=None,
        optimizer="adam",
        epochs=128,
        batch_size=32,
        patience=8,
        coin_noise=0.01,
        random_state=0,
    ):
        self.layer = layer
        self.steps = steps
        self.coin_placement = coin_placement
        self.coin_mode = coin_mode
        self.learn_amplitudes = learn_amplitudes
        self.learn_coins = learn_coins
        self.real = real
        self.edge_ordering = edge_ordering
        self.similarity_power = similarity_power
        self.hops = hops
        self.gcnn_units = gcnn_units
        self.diffusion_activation = diffusion_activation
        self.hidden = hidden
        self.hidden_activation = hidden_activation
        self.learning_rate = learning_rate
        self.optimizer = optimizer
        self.epochs = epochs
        self.batch_size = batch_size
        self.patience = patience
        self.coin_noise = coin_noise
        self.random_state = random_state

    @classmethod
    def _get_param_names(cls):
        # subclasses forward shared settings through **kwargs, so gather
        # constructor arguments along the whole MRO
        names = set()
        for klass in cls.__mro__:
            init = klass.__dict__.get("__init__")
            if init is None or klass in (object, BaseEstimator):
                continue
            for p in inspect.signature(init).parameters.values():
                if p.name != "self" and p.kind not in (p.VAR_KEYWORD, p.VAR_POSITIONAL):
                    names.add(p.name)
        return sorted(names)

    def _check_params(self):
        check_choice(self.layer, LAYERS, "layer")
        if self.layer == "qwnn":
            require(self.steps, "steps")
            check_choice(self.coin_placement, COIN_PLACEMENTS, "coin_placement")
            check_choice(self.coin_mode, COIN_MODES, "coin_mode")
        if self.layer == "dcnn":
            require(self.hops, "hops")
        require(self.learning_rate, "learning_rate")

    def _spec(self, n_features, n_outputs, task, d, **kw) -> ModelSpec:
        return ModelSpec(
            n_features=n_features,
            n_outputs=n_outputs,
            task=task,
            layer=self.layer,
            steps=int(self.steps or 0),
            coin_placement=self.coin_placement,
            coin_mode=self.coin_mode,
            learn_amplitudes=bool(self.learn_amplitudes),
            learn_coins=bool(self.learn_coins),
            real=bool(self.real),
            edge_ordering=self.edge_ordering,
            similarity_power=int(self.similarity_power),
            d=int(d),
            coin_noise=float(self.coin_noise),
            diffusion_activation=self.diffusion_activation,
            hops=int(self.hops or 0),
            gcnn_units=self.gcnn_units,
            hidden=tuple(self.hidden or ()),
            hidden_activation=self.hidden_activation,
            **kw,
        )

    def _train_config(self) -> TrainConfig:
        try:
            return TrainConfig(
                learning_rate=self.learning_rate,
                optimizer=self.optimizer,
                epochs=self.epochs,
                batch_size=self.batch_size,
                patience=self.patience,
                seed=self.random_state,
            )
        except ValueError as exc:
            raise ConfigError("training", str(exc)) from exc

    def _fit_samples(self, spec, train_samples, val_samples, loss, graph=None):
        self.model_ = build_model(spec, graph=graph, rng=self.random_state)
        self.loss_ = loss
        self.log_ = train(self.model_, train_samples, val_samples, loss, self._train_config())
        self.n_features_in_ = spec.n_features
        return self


class QuantumWalkNodeRegressor(RegressorMixin, _GraphNetBase):
    """Per-node regression on one fixed graph.

    ``fit(X, y)`` with ``X`` and ``y`` shaped ``(samples, nodes[, features])``.
    ``eval_set=(X_val, y_val)`` enables early stopping and best-epoch restore.
    """

    def __init__(self, graph=None, *, loss="mse", **kwargs):
        super().__init__(**kwargs)
        self.graph = graph
        self.loss = loss

    def _samples(self, x, y):
        return [GraphSample(self.graph, xi, yi) for xi, yi in zip(x, y)]

    def fit(self, X, y, eval_set=None):
        self._check_params()
        g = check_graph(self.graph)
        check_choice(self.loss, ("mse", "mae"), "loss")
        x = check_node_array(X, g.n_nodes)
        yy = check_node_array(y, g.n_nodes, "y")
        self._y_ndim = np.ndim(y)
        val = []
        if eval_set is not None:
            xv = check_node_array(eval_set[0], g.n_nodes, "X_val")
            yv = check_node_array(eval_set[1], g.n_nodes, "y_val")
            val = self._samples(xv, yv)
        spec = self._spec(x.shape[2], yy.shape[2], "node", g.d_max)
        return self._fit_samples(spec, self._samples(x, yy), val, LossSpec(self.loss), graph=g)

    def predict(self, X):
        check_is_fitted(self, "model_")
        x = check_node_array(X, self.graph.n_nodes)
        out, _ = self.model_.forward(x, self.graph)
        return out[..., 0] if self._y_ndim == 2 else out

    def score(self, X, y, sample_weight=None):
        pred = self.predict(X)
        return r2_score(np.asarray(y).reshape(len(pred), -1), pred.reshape(len(pred), -1), sample_weight=sample_weight)


class _GraphLevelBase(_GraphNetBase):
    def __init__(self, *, readout="mean", pad_to=None, **kwargs):
        super().__init__(**kwargs)
        self.readout = readout
        self.pad_to = pad_to

    def _check_graph_level(self):
        if self.layer == "qwnn" and (self.coin_placement == "spatial" or self.learn_amplitudes):
            raise ConfigError(
                "coin_placement" if self.coin_placement == "spatial" else "learn_amplitudes",
                "per-node parameters need a single fixed graph; use temporal coins for graph-level tasks",
            )

    @staticmethod
    def _max_degree(samples):
        return max(max(s.graph.d_max for s in samples), 1)

    def _raw_predict(self, X):
        check_is_fitted(self, "model_")
        samples = check_samples(X)
        return np.stack(predict(self.model_, samples))


class GraphRegressor(RegressorMixin, _GraphLevelBase):
    """Graph-level regression (one value per graph).

    ``output_activation="scaled-sigmoid"`` squashes outputs into the target
    range seen in training.
    """

    def __init__(self, *, loss="mse", output_activation="identity", **kwargs):
        super().__init__(**kwargs)
        self.loss = loss
        self.output_activation = output_activation

    def fit(self, X, y=None, eval_set=None):
        self._check_params()
        self._check_graph_level()
        check_choice(self.loss, ("mse", "mae"), "loss")
        check_choice(self.output_activation, ("identity", "scaled-sigmoid"), "output_activation")
        samples = check_samples(X, y)
        targets = np.array([np.asarray(s.y, dtype=float).reshape(-1) for s in samples])
        out_range = None
        if self.output_activation == "scaled-sigmoid":
            out_range = (float(targets.min()), float(targets.max()))
        val = check_samples(*eval_set) if eval_set is not None else []
        spec = self._spec(
            samples[0].x.shape[1],
            targets.shape[1],
            "graph",
            self._max_degree(samples + val),
            readout=self.readout,
            pad_to=self.pad_to,
            output_activation=self.output_activation,
            output_range=out_range,
        )
        return self._fit_samples(spec, samples, val, LossSpec(self.loss))

    def predict(self, X):
        out = self._raw_predict(X)
        return out[:, 0] if out.shape[1] == 1 else out


class GraphClassifier(ClassifierMixin, _GraphLevelBase):
    """Graph classification with a softmax cross-entropy head."""

    def fit(self, X, y=None, eval_set=None):
        self._check_params()
        self._check_graph_level()
        samples = check_samples(X, y)
        self.label_encoder_ = LabelEncoder().fit([s.y for s in samples])
        self.classes_ = self.label_encoder_.classes_
        samples = self._encode(samples)
        val = self._encode(check_samples(*eval_set)) if eval_set is not None else []
        spec = self._spec(
            samples[0].x.shape[1],
            len(self.classes_),
            "graph",
            self._max_degree(samples + val),
            readout=self.readout,
            pad_to=self.pad_to,
            output_activation="softmax",
        )
        return self._fit_samples(spec, samples, val, LossSpec("cross-entropy"))

    def _encode(self, samples):
        ids = self.label_encoder_.transform([s.y for s in samples])
        return [GraphSample(s.graph, s.x, int(c), s.mask) for s, c in zip(samples, ids)]

    def decision_function(self, X):
        return self._raw_predict(X)

    def predict_proba(self, X):
        z = self.decision_function(X)
        z = z - z.max(axis=1, keepdims=True)
        e = np.exp(z)
        return e / e.sum(axis=1, keepdims=True)

    def predict(self, X):
        return self.classes_[np.argmax(self.decision_function(X), axis=1)]


class QuantumWalkDiffusion(TransformerMixin, BaseEstimator):
    """Untrained quantum-walk diffusion ``X -> P X`` on a fixed graph.

    ``diffusion_`` holds the ``(N, N)`` matrix ``P`` after ``fit``.
    """

    def __init__(
        self,
        graph=None,
        steps=None,
        coin_placement="temporal",
        coin_mode="fixed-grover",
        edge_ordering="as-given",
        similarity_power=2,
        real=True,
        random_state=0,
    ):
        self.graph = graph
        self.steps = steps
        self.coin_placement = coin_placement
        self.coin_mode = coin_mode
        self.edge_ordering = edge_ordering
        self.similarity_power = similarity_power
        self.real = real
        self.random_state = random_state

    def fit(self, X=None, y=None):
        g = check_graph(self.graph)
        require(self.steps, "steps")
        check_choice(self.coin_placement, COIN_PLACEMENTS, "coin_placement")
        check_choice(self.coin_mode, COIN_MODES, "coin_mode")
        self.layer_ = QuantumWalkLayer(
            1,
            self.steps,
            g.d_max,
            placement=self.coin_placement,
            mode=self.coin_mode,
            real=self.real,
            ordering=self.edge_ordering,
            similarity_power=self.similarity_power,
            graph=g if self.coin_placement == "spatial" else None,
            coin_noise=0.0,
            rng=self.random_state,
        )
        self.diffusion_ = self.layer_.diffusion(g)
        if X is not None:
            self.n_features_in_ = check_node_array(X, g.n_nodes).shape[2]
        return self

    def transform(self, X):
        check_is_fitted(self, "diffusion_")
        x = check_node_array(X, self.graph.n_nodes)
        out = np.einsum("nm,bmf->bnf", self.diffusion_, x)
        return out[..., 0] if np.ndim(X) == 2 else out
