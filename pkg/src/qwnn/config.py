"""Experiment configuration files (TOML).

Every section maps onto one dataclass.  Settings that change results and
have no sensible default, the learning rate and the walk length (or hop
count for DCNN), must be given explicitly.

Example::

    [experiment]
    task = "node-regression"
    model = "qwnn"
    trials = 5

    [data]
    kind = "temperature"
    stations = "data/stations.csv"
    observations = "data/observations.csv"
    split = "thirds"

    [walk]
    steps = 4
    coin_placement = "spatial"
    coin_mode = "unconstrained"
    learn_amplitudes = true

    [training]
    learning_rate = 0.01
"""

from __future__ import annotations

import os
import sys
from dataclasses import asdict, dataclass, field, fields

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib
import tomli_w

from .exceptions import ConfigError
from .walk import COIN_MODES, COIN_PLACEMENTS

TASKS = ("node-regression", "graph-classification", "graph-regression")
MODELS = ("qwnn", "dcnn", "gcnn")
DATA_KINDS = ("temperature", "tu", "molecules", "synthetic-shift")
SPLITS = ("thirds", "kfold", "stratified")
ORDERINGS = ("as-given", "centrality", "similarity")
LOSSES = ("mse", "mae", "cross-entropy")
READOUTS = ("mean", "sum", "flatten")


@dataclass
class ExperimentSection:
    task: str = "node-regression"
    model: str = "qwnn"
    name: str = ""
    seed: int = 0
    trials: int = 1


@dataclass
class DataSection:
    kind: str = "temperature"
    path: str = ""
    stations: str = ""
    observations: str = ""
    folds_file: str = ""
    k_neighbors: int = 8
    split: str = "thirds"
    n_folds: int = 5
    fold: int = 0
    pad_to: int = 0
    n_nodes: int = 20
    n_samples: int = 64
    shift: int = 2


@dataclass
class WalkSection:
    steps: int | None = None
    coin_placement: str = "temporal"
    coin_mode: str = "fixed-grover"
    learn_amplitudes: bool = False
    learn_coins: bool = True
    real: bool = True
    edge_ordering: str = "as-given"
    similarity_power: int = 2
    activation: str = "identity"
    coin_noise: float = 0.01


@dataclass
class BaselineSection:
    hops: int | None = None
    gcnn_units: int = 0
    activation: str = "identity"


@dataclass
class HeadSection:
    hidden: list = field(default_factory=list)
    hidden_activation: str = "relu"
    readout: str = "mean"
    output_activation: str = "identity"


@dataclass
class TrainingSection:
    learning_rate: float | None = None
    loss: str = "mse"
    optimizer: str = "adam"
    epochs: int = 128
    batch_size: int = 32
    patience: int = 8


_SECTIONS = {
    "experiment": ExperimentSection,
    "data": DataSection,
    "walk": WalkSection,
    "baseline": BaselineSection,
    "head": HeadSection,
    "training": TrainingSection,
}


@dataclass
class ExperimentConfig:
    experiment: ExperimentSection = field(default_factory=ExperimentSection)
    data: DataSection = field(default_factory=DataSection)
    walk: WalkSection = field(default_factory=WalkSection)
    baseline: BaselineSection = field(default_factory=BaselineSection)
    head: HeadSection = field(default_factory=HeadSection)
    training: TrainingSection = field(default_factory=TrainingSection)
    base_dir: str = field(default=".", compare=False, repr=False)

    # ---- construction -----------------------------------------------------

    @classmethod
    def from_dict(cls, raw: dict, base_dir=".") -> "ExperimentConfig":
        unknown = set(raw) - set(_SECTIONS)
        if unknown:
            raise ConfigError(sorted(unknown)[0], f"unknown section; expected one of {tuple(_SECTIONS)}")
        parts = {}
        for name, klass in _SECTIONS.items():
            values = raw.get(name, {})
            if not isinstance(values, dict):
                raise ConfigError(name, "must be a table")
            allowed = {f.name: f for f in fields(klass)}
            for key, value in values.items():
                if key not in allowed:
                    raise ConfigError(f"{name}.{key}", "unknown setting")
                _check_type(f"{name}.{key}", value, allowed[key])
            parts[name] = klass(**values)
        cfg = cls(**parts, base_dir=str(base_dir))
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        try:
            with open(path, "rb") as fh:
                raw = tomllib.load(fh)
        except FileNotFoundError as exc:
            raise ConfigError("config", f"file not found: {path}") from exc
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError("config", f"{path}: {exc}") from exc
        return cls.from_dict(raw, base_dir=os.path.dirname(os.path.abspath(path)))

    @classmethod
    def loads(cls, text: str, base_dir=".") -> "ExperimentConfig":
        try:
            raw = tomllib.loads(text)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError("config", str(exc)) from exc
        return cls.from_dict(raw, base_dir=base_dir)

    def to_dict(self) -> dict:
        # TOML has no null, so unset optional values are left out
        out = {}
        for name in _SECTIONS:
            section = {k: v for k, v in asdict(getattr(self, name)).items() if v is not None}
            out[name] = section
        return out

    def dumps(self) -> str:
        return tomli_w.dumps(self.to_dict())

    def save(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.dumps())

    def resolve(self, p: str) -> str:
        """Data paths are relative to the config file's directory."""
        return p if not p or os.path.isabs(p) else os.path.normpath(os.path.join(self.base_dir, p))

    # ---- validation ---------------------------------------------------------

    def validate(self) -> None:
        e, d, w, b, h, t = self.experiment, self.data, self.walk, self.baseline, self.head, self.training
        _choice("experiment.task", e.task, TASKS)
        _choice("experiment.model", e.model, MODELS)
        if e.trials < 1:
            raise ConfigError("experiment.trials", "must be >= 1")
        _choice("data.kind", d.kind, DATA_KINDS)
        _choice("data.split", d.split, SPLITS)
        if d.k_neighbors < 1:
            raise ConfigError("data.k_neighbors", "must be >= 1")
        if d.split == "kfold" and not 0 <= d.fold < d.n_folds:
            raise ConfigError("data.fold", f"must be in [0, {d.n_folds})")
        if d.pad_to < 0:
            raise ConfigError("data.pad_to", "must be >= 0")
        if e.model == "qwnn":
            if w.steps is None:
                raise ConfigError("walk.steps", "is required (walk length has no default)")
            if w.steps < 0:
                raise ConfigError("walk.steps", "must be >= 0")
            _choice("walk.coin_placement", w.coin_placement, COIN_PLACEMENTS)
            _choice("walk.coin_mode", w.coin_mode, COIN_MODES)
            _choice("walk.edge_ordering", w.edge_ordering, ORDERINGS)
            if e.task != "node-regression" and (w.coin_placement == "spatial" or w.learn_amplitudes):
                raise ConfigError(
                    "walk.coin_placement" if w.coin_placement == "spatial" else "walk.learn_amplitudes",
                    "per-node parameters need a single fixed graph (node-regression only)",
                )
        if e.model == "dcnn" and b.hops is None:
            raise ConfigError("baseline.hops", "is required for dcnn (hop count has no default)")
        if b.hops is not None and b.hops < 0:
            raise ConfigError("baseline.hops", "must be >= 0")
        if any(not isinstance(u, int) or u < 1 for u in h.hidden):
            raise ConfigError("head.hidden", "must be a list of positive integers")
        _choice("head.readout", h.readout, READOUTS)
        if h.readout == "flatten" and e.task != "node-regression" and d.pad_to < 1:
            raise ConfigError("data.pad_to", "flatten readout needs a positive pad_to")
        if t.learning_rate is None:
            raise ConfigError("training.learning_rate", "is required (learning rate has no default)")
        if not t.learning_rate > 0:
            raise ConfigError("training.learning_rate", "must be > 0")
        _choice("training.loss", t.loss, LOSSES)
        if (t.loss == "cross-entropy") != (e.task == "graph-classification"):
            raise ConfigError("training.loss", "cross-entropy goes with graph-classification and only there")
        _choice("training.optimizer", t.optimizer, ("adam", "sgd"))
        if not 0 <= t.epochs <= 128:
            raise ConfigError("training.epochs", "must be in [0, 128]")
        if t.batch_size < 1:
            raise ConfigError("training.batch_size", "must be >= 1")
        if t.patience < 0:
            raise ConfigError("training.patience", "must be >= 0 (0 disables early stopping)")


def _choice(name, value, options):
    if value not in options:
        raise ConfigError(name, f"must be one of {options}, got {value!r}")


def _check_type(name, value, f):
    kind = f.type if isinstance(f.type, str) else getattr(f.type, "__name__", "")
    if kind.startswith("bool"):
        ok = isinstance(value, bool)
    elif kind.startswith("int"):
        ok = isinstance(value, int) and not isinstance(value, bool)
    elif kind.startswith("float"):
        ok = isinstance(value, (int, float)) and not isinstance(value, bool)
    elif kind.startswith("str"):
        ok = isinstance(value, str)
    elif kind.startswith("list"):
        ok = isinstance(value, list)
    else:
        ok = True
    if not ok:
        raise ConfigError(name, f"expected {kind.split(' ')[0]}, got {type(value).__name__} {value!r}")
