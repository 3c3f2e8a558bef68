"""Minibatch training with early stopping, evaluation and gradient checking."""

from __future__ import annotations

import csv
import logging
import time
from dataclasses import dataclass, field

import numpy as np

from .exceptions import TrainingDivergedError
from .nn import LossSpec, ModelGraphNet
from .optim import make_optimizer
from .samples import GraphSample

__all__ = [
    "TrainConfig",
    "TrainingLog",
    "FiniteDifferenceReport",
    "train",
    "evaluate",
    "predict",
    "batch_loss_and_grad",
    "finite_difference_check",
]

logger = logging.getLogger(__name__)

MAX_EPOCHS = 128


@dataclass
class TrainConfig:
    """Optimizer settings.  ``learning_rate`` has no default on purpose."""

    learning_rate: float
    optimizer: str = "adam"
    epochs: int = MAX_EPOCHS
    batch_size: int = 32
    patience: int | None = 8
    seed: int = 0

    def __post_init__(self):
        if self.learning_rate is None or not np.isfinite(self.learning_rate) or self.learning_rate < 0:
            raise ValueError("learning_rate must be a finite non-negative number")
        if self.optimizer not in ("adam", "sgd"):
            raise ValueError("optimizer must be 'adam' or 'sgd'")
        if not 0 <= self.epochs <= MAX_EPOCHS:
            raise ValueError(f"epochs must be in [0, {MAX_EPOCHS}]")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.patience is not None and self.patience < 1:
            raise ValueError("patience must be >= 1 or None")


@dataclass
class TrainingLog:
    metric_name: str
    rows: list = field(default_factory=list)
    best_epoch: int = 0
    stopped_early: bool = False

    COLUMNS = ("epoch", "train_loss", "train_metric", "val_loss", "val_metric", "wall_time")

    def append(self, **row):
        self.rows.append(row)

    @property
    def final(self) -> dict:
        return self.rows[-1]

    @property
    def best(self) -> dict:
        return next(r for r in self.rows if r["epoch"] == self.best_epoch)

    def metrics_only(self):
        """Rows without wall-clock time, for reproducibility comparisons."""
        return [{k: v for k, v in r.items() if k != "wall_time"} for r in self.rows]

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(self.COLUMNS)
            for r in self.rows:
                w.writerow([_fmt(r.get(c)) for c in self.COLUMNS])


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


# --------------------------------------------------------------------------
# batched evaluation
# --------------------------------------------------------------------------


def _groups(samples):
    """Split samples into runs that share one graph object (order kept)."""
    groups: dict[int, list[GraphSample]] = {}
    for s in samples:
        groups.setdefault(id(s.graph), []).append(s)
    return list(groups.values())


def _targets(group, out):
    ys = [s.y for s in group]
    if out.ndim == 3:
        return np.stack([np.asarray(y, dtype=float).reshape(out.shape[1:]) for y in ys])
    if out.ndim == 2 and np.ndim(ys[0]) == 0:
        return np.asarray(ys)
    return np.stack([np.asarray(y, dtype=float).reshape(out.shape[1:]) for y in ys])


def _forward_group(model, group):
    x = np.stack([s.x for s in group])
    return model.forward(x, group[0].graph, group[0].mask)


def batch_loss_and_grad(model: ModelGraphNet, samples, loss: LossSpec, backward=True):
    """Mean loss over ``samples``; accumulates gradients when ``backward``."""
    fwd = []
    total = 0
    loss_sum = metric_sum = 0.0
    for group in _groups(samples):
        out, tape = _forward_group(model, group)
        y = _targets(group, out) if loss.kind != "cross-entropy" else np.array([s.y for s in group])
        l, m, c = loss.totals(out, y, group[0].mask)
        loss_sum += l
        metric_sum += m
        total += c
        fwd.append((group, out, tape, y))
    if backward:
        for group, out, tape, y in fwd:
            model.backward(tape, loss.grad(out, y, group[0].mask) / max(total, 1))
    return loss.finalize(loss_sum, metric_sum, total)


def evaluate(model: ModelGraphNet, samples, loss: LossSpec, chunk=256):
    """``(loss, metric)`` over ``samples`` without touching gradients."""
    if not samples:
        return None, None
    loss_sum = metric_sum = 0.0
    total = 0
    for group in _groups(samples):
        for i in range(0, len(group), chunk):
            part = group[i : i + chunk]
            out, _ = _forward_group(model, part)
            y = _targets(part, out) if loss.kind != "cross-entropy" else np.array([s.y for s in part])
            l, m, c = loss.totals(out, y, part[0].mask)
            loss_sum += l
            metric_sum += m
            total += c
    return loss.finalize(loss_sum, metric_sum, total)


def predict(model: ModelGraphNet, samples, chunk=256) -> list[np.ndarray]:
    """Model outputs, one array per sample, in input order."""
    result = [None] * len(samples)
    index = {id(s): i for i, s in enumerate(samples)}
    for group in _groups(samples):
        for i in range(0, len(group), chunk):
            part = group[i : i + chunk]
            out, _ = _forward_group(model, part)
            for s, o in zip(part, out):
                result[index[id(s)]] = o
    return result


# --------------------------------------------------------------------------
# training
# --------------------------------------------------------------------------


def train(
    model: ModelGraphNet,
    train_samples,
    val_samples,
    loss: LossSpec,
    config: TrainConfig,
) -> TrainingLog:
    """Fit ``model`` in place and return the per-epoch log.

    Epoch 0 records metrics before any update.  With a validation set the
    parameters from the epoch with the lowest validation loss are restored
    at the end, and training stops after ``patience`` epochs without
    improvement.
    """
    rng = np.random.default_rng(config.seed)
    opt = make_optimizer(config.optimizer, model, config.learning_rate)
    log = TrainingLog(loss.metric_name)
    train_samples = list(train_samples)
    val_samples = list(val_samples or [])
    start = time.perf_counter()

    def record(epoch):
        tr_loss, tr_metric = evaluate(model, train_samples, loss)
        va_loss, va_metric = evaluate(model, val_samples, loss)
        if not np.isfinite(tr_loss) or (va_loss is not None and not np.isfinite(va_loss)):
            raise TrainingDivergedError(
                f"loss became non-finite at epoch {epoch} (learning rate {config.learning_rate})"
            )
        log.append(
            epoch=epoch,
            train_loss=tr_loss,
            train_metric=tr_metric,
            val_loss=va_loss,
            val_metric=va_metric,
            wall_time=time.perf_counter() - start,
        )
        return va_loss

    best_val = record(0)
    best_state = model.state_dict()
    since_best = 0
    n = len(train_samples)
    for epoch in range(1, config.epochs + 1):
        order = rng.permutation(n)
        for i in range(0, n, config.batch_size):
            batch = [train_samples[j] for j in order[i : i + config.batch_size]]
            model.zero_grad()
            batch_loss, _ = batch_loss_and_grad(model, batch, loss)
            if not np.isfinite(batch_loss):
                raise TrainingDivergedError(
                    f"loss became non-finite at epoch {epoch} (learning rate {config.learning_rate})"
                )
            opt.step()
        val = record(epoch)
        logger.debug("epoch %d: %s", epoch, log.final)
        if val is None:
            log.best_epoch = epoch
            continue
        if val < best_val:
            best_val, best_state, since_best = val, model.state_dict(), 0
            log.best_epoch = epoch
        else:
            since_best += 1
            if config.patience is not None and since_best >= config.patience:
                log.stopped_early = True
                break
    if val_samples:
        model.load_state_dict(best_state)
    return log


# --------------------------------------------------------------------------
# gradient checking
# --------------------------------------------------------------------------


@dataclass
class FiniteDifferenceReport:
    max_rel_error: float
    worst_param: str | None
    worst_index: tuple | None
    per_param: dict
    n_checked: int

    def __str__(self):
        return (
            f"max relative error {self.max_rel_error:.3e} at {self.worst_param}{list(self.worst_index or ())}"
            f" over {self.n_checked} scalars"
        )


def finite_difference_check(
    model: ModelGraphNet, samples, loss: LossSpec, epsilon=1e-6, abs_floor=1e-4
) -> FiniteDifferenceReport:
    """Compare backprop gradients with central differences, one scalar at a time.

    The error for a scalar is ``|a - n| / max(|a|, |n|, abs_floor)`` so
    components that are numerically zero are judged in absolute terms.
    Complex parameters are checked on their real and imaginary parts.
    """
    samples = list(samples)
    model.zero_grad()
    batch_loss_and_grad(model, samples, loss)
    analytic = {path: g.copy() for path, _, g in model.named_parameters()}

    def value():
        return batch_loss_and_grad(model, samples, loss, backward=False)[0]

    worst, worst_path, worst_idx, n = 0.0, None, None, 0
    per_param = {}
    for path, p, _ in model.named_parameters():
        flat = p.view(np.float64).reshape(-1) if np.iscomplexobj(p) else p.reshape(-1)
        ana = analytic[path]
        ana_flat = ana.view(np.float64).reshape(-1) if np.iscomplexobj(ana) else ana.reshape(-1)
        err_max = 0.0
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + epsilon
            up = value()
            flat[i] = orig - epsilon
            down = value()
            flat[i] = orig
            num = (up - down) / (2 * epsilon)
            a = ana_flat[i]
            err = abs(a - num) / max(abs(a), abs(num), abs_floor)
            n += 1
            if err > err_max:
                err_max = err
            if err > worst:
                worst, worst_path = err, path
                if np.iscomplexobj(p):
                    worst_idx = (*np.unravel_index(i // 2, p.shape), i % 2)
                else:
                    worst_idx = np.unravel_index(i, p.shape)
        per_param[path] = err_max
    model.zero_grad()
    return FiniteDifferenceReport(worst, worst_path, tuple(int(i) for i in worst_idx) if worst_idx else None, per_param, n)
