"""Glue between an :class:`ExperimentConfig` and the training loop.

Trial ``r`` trains with seed ``experiment.seed + r``.  For k-fold splits
the fold assignment itself is drawn once from ``experiment.seed`` and trial
``r`` tests on fold ``(data.fold + r) % n_folds``, so ``trials = n_folds``
is plain cross-validation.
"""

from __future__ import annotations

import dataclasses
import logging
import time
from dataclasses import dataclass

import numpy as np

from .config import ExperimentConfig
from .datasets import (
    knn_geo_graph,
    load_temperature,
    load_tu_dataset,
    molecule_samples,
    pad_batch,
    read_molecules,
    split_dataset,
)
from .exceptions import DataError
from .graph import Graph, cycle_graph
from .nn import LossSpec, ModelGraphNet, ModelSpec, build_model
from .samples import GraphSample
from .training import TrainConfig, TrainingLog, evaluate, train

logger = logging.getLogger(__name__)


@dataclass
class ExperimentData:
    samples: list
    graph: Graph | None = None
    fold_ids: np.ndarray | None = None
    description: str = ""


@dataclass
class TrialResult:
    trial: int
    seed: int
    fold: int | None
    log: TrainingLog
    model: ModelGraphNet
    test_loss: float | None
    test_metric: float | None
    seconds: float


def synthetic_shift_samples(n_nodes, n_samples, shift, seed):
    """Node regression on a cycle whose target is the input moved ``shift`` hops: ``y_v = x_{v+shift}``."""
    g = cycle_graph(n_nodes)
    x = np.random.default_rng(seed).normal(size=(n_samples, n_nodes))
    y = np.roll(x, -shift, axis=1)
    return g, [GraphSample(g, xi[:, None], yi[:, None]) for xi, yi in zip(x, y)]


def load_data(cfg: ExperimentConfig) -> ExperimentData:
    d = cfg.data
    try:
        if d.kind == "temperature":
            temps = load_temperature(cfg.resolve(d.stations), cfg.resolve(d.observations))
            g = knn_geo_graph(temps.coords, d.k_neighbors)
            samples = temps.samples(g)
            return ExperimentData(samples, g, description=f"{len(samples)} day pairs, {g.n_nodes} stations")
        if d.kind == "synthetic-shift":
            g, samples = synthetic_shift_samples(d.n_nodes, d.n_samples, d.shift, cfg.experiment.seed)
            return ExperimentData(samples, g, description=f"{len(samples)} synthetic samples")
        if d.kind == "tu":
            ds = load_tu_dataset(cfg.resolve(d.path))
            samples = ds.samples
            desc = ", ".join(f"{k}={v}" for k, v in ds.summary().items())
        else:
            records = read_molecules(cfg.resolve(d.path))
            samples = molecule_samples(records)
            desc = f"{len(samples)} molecules"
    except FileNotFoundError as exc:
        raise DataError(f"data file not found: {exc.filename}") from exc
    if d.pad_to:
        samples = pad_batch(samples, d.pad_to)
    fold_ids = None
    if d.folds_file:
        try:
            fold_ids = np.loadtxt(cfg.resolve(d.folds_file), dtype=int).reshape(-1)
        except OSError as exc:
            raise DataError(f"cannot read folds file: {exc}") from exc
    return ExperimentData(samples, None, fold_ids, desc)


def make_split(cfg: ExperimentConfig, data: ExperimentData, trial: int):
    d = cfg.data
    seed = cfg.experiment.seed
    if d.split == "kfold":
        k = d.n_folds if data.fold_ids is None else int(data.fold_ids.max()) + 1
        fold = (d.fold + trial) % k
        split = split_dataset(data.samples, "kfold", fold=fold, k=k, seed=seed, fold_ids=data.fold_ids)
        return split, fold
    if d.split == "stratified":
        return split_dataset(data.samples, "stratified", seed=seed + trial), None
    return split_dataset(data.samples, "thirds"), None


def model_spec(cfg: ExperimentConfig, data: ExperimentData, train_samples) -> ModelSpec:
    e, w, b, h = cfg.experiment, cfg.walk, cfg.baseline, cfg.head
    first = data.samples[0]
    node = e.task == "node-regression"
    if node:
        n_out = np.asarray(first.y).reshape(first.n_nodes, -1).shape[1]
        d = data.graph.d_max
    else:
        d = max(max(s.graph.d_max for s in data.samples), 1)
        if e.task == "graph-classification":
            n_out = int(max(int(s.y) for s in data.samples)) + 1
        else:
            n_out = np.asarray(first.y, dtype=float).reshape(-1).size
    out_act = "softmax" if e.task == "graph-classification" else h.output_activation
    out_range = None
    if out_act == "scaled-sigmoid":
        ys = np.concatenate([np.asarray(s.y, dtype=float).reshape(-1) for s in train_samples])
        out_range = (float(ys.min()), float(ys.max()))
    return ModelSpec(
        n_features=first.x.shape[1],
        n_outputs=n_out,
        task="node" if node else "graph",
        layer=e.model,
        steps=int(w.steps or 0),
        coin_placement=w.coin_placement,
        coin_mode=w.coin_mode,
        learn_amplitudes=w.learn_amplitudes,
        learn_coins=w.learn_coins,
        real=w.real,
        edge_ordering=w.edge_ordering,
        similarity_power=w.similarity_power,
        d=d,
        coin_noise=w.coin_noise,
        diffusion_activation=w.activation if e.model == "qwnn" else b.activation,
        hops=int(b.hops if b.hops is not None else 0),
        gcnn_units=b.gcnn_units or None,
        hidden=tuple(h.hidden),
        hidden_activation=h.hidden_activation,
        readout=h.readout,
        pad_to=cfg.data.pad_to or None,
        output_activation=out_act,
        output_range=out_range,
    )


def train_config(cfg: ExperimentConfig, seed: int) -> TrainConfig:
    t = cfg.training
    return TrainConfig(
        learning_rate=t.learning_rate,
        optimizer=t.optimizer,
        epochs=t.epochs,
        batch_size=t.batch_size,
        patience=t.patience or None,
        seed=seed,
    )


def run_trial(cfg: ExperimentConfig, data: ExperimentData, trial: int) -> TrialResult:
    seed = cfg.experiment.seed + trial
    split, fold = make_split(cfg, data, trial)
    tr, va, te = split.take(data.samples)
    spec = model_spec(cfg, data, tr)
    model = build_model(spec, graph=data.graph, rng=seed)
    loss = LossSpec(cfg.training.loss)
    start = time.perf_counter()
    log = train(model, tr, va, loss, train_config(cfg, seed))
    seconds = time.perf_counter() - start
    test_loss, test_metric = evaluate(model, te, loss)
    return TrialResult(trial, seed, fold, log, model, test_loss, test_metric, seconds)


def with_model(cfg: ExperimentConfig, model: str) -> ExperimentConfig:
    """Copy of ``cfg`` that trains ``model``; DCNN falls back to the walk length for its hop count."""
    exp = dataclasses.replace(cfg.experiment, model=model)
    base = cfg.baseline
    if model == "dcnn" and base.hops is None:
        base = dataclasses.replace(base, hops=cfg.walk.steps)
    out = dataclasses.replace(cfg, experiment=exp, baseline=base)
    out.validate()
    return out
