"""Train/validation/test splits and zero padding to a fixed node count."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.model_selection import KFold

from ..exceptions import DataError
from ..graph import Graph
from ..samples import GraphSample

SCHEMES = ("thirds", "kfold", "stratified")


@dataclass(frozen=True)
class Split:
    train: np.ndarray
    validation: np.ndarray
    test: np.ndarray

    def take(self, items):
        return tuple([items[i] for i in part] for part in (self.train, self.validation, self.test))


def _size(instances):
    return instances if isinstance(instances, (int, np.integer)) else len(instances)


def split_dataset(
    instances,
    scheme="thirds",
    *,
    fold=0,
    k=5,
    seed=0,
    labels=None,
    fractions=(0.8, 0.1, 0.1),
    fold_ids=None,
) -> Split:
    """Index split of ``instances`` (a sequence or a count).

    ``thirds``
        contiguous, in input order; feed days chronologically.
    ``kfold``
        ``k`` seeded shuffled folds; fold ``fold`` is the test set and the
        next fold the validation set.  ``fold_ids`` overrides the shuffle
        with a predefined assignment.
    ``stratified``
        shuffled per class, each class divided by ``fractions``.
    """
    n = _size(instances)
    idx = np.arange(n)
    if scheme == "thirds":
        return Split(*np.array_split(idx, 3))
    if scheme == "kfold":
        if fold_ids is not None:
            fold_ids = np.asarray(fold_ids)
            if fold_ids.shape != (n,):
                raise DataError(f"fold_ids has {fold_ids.size} entries for {n} instances")
            k = int(fold_ids.max()) + 1
            folds = [idx[fold_ids == f] for f in range(k)]
        else:
            if k < 2:
                raise DataError("kfold needs k >= 2")
            if k > n:
                raise DataError(f"cannot make {k} folds from {n} instances")
            splitter = KFold(n_splits=k, shuffle=True, random_state=seed)
            folds = [np.sort(test) for _, test in splitter.split(idx)]
        if not 0 <= fold < k:
            raise DataError(f"fold must be in [0, {k})")
        val_fold = (fold + 1) % k
        train = np.sort(np.concatenate([folds[f] for f in range(k) if f not in (fold, val_fold)]))
        return Split(train, folds[val_fold], folds[fold])
    if scheme == "stratified":
        if labels is None:
            if isinstance(instances, (int, np.integer)):
                raise DataError("stratified split needs labels")
            labels = [s.y for s in instances]
        labels = np.asarray(labels)
        frac = np.asarray(fractions, dtype=float)
        if frac.shape != (3,) or np.any(frac < 0) or not np.isclose(frac.sum(), 1.0):
            raise DataError("fractions must be three non-negative numbers summing to 1")
        rng = np.random.default_rng(seed)
        parts = [[], [], []]
        for c in np.unique(labels):
            members = rng.permutation(idx[labels == c])
            cuts = np.rint(np.cumsum(frac)[:2] * members.size).astype(int)
            for p, chunk in zip(parts, np.split(members, cuts)):
                p.extend(chunk.tolist())
        return Split(*(np.sort(np.array(p, dtype=int)) for p in parts))
    raise DataError(f"unknown split scheme {scheme!r}; expected one of {SCHEMES}")


def pad_sample(sample: GraphSample, target_n: int) -> GraphSample:
    n = sample.n_nodes
    if target_n < n:
        raise DataError(f"target_n={target_n} is below the graph size {n}")
    if target_n == n:
        return sample
    g = sample.graph
    graph = Graph(target_n, g.neighbors + ((),) * (target_n - n), g.d_max)
    x = np.zeros((target_n, sample.x.shape[1]))
    x[:n] = sample.x
    mask = np.zeros(target_n, dtype=bool)
    mask[:n] = True if sample.mask is None else sample.mask
    y = sample.y
    if isinstance(y, np.ndarray) and y.ndim == 2 and y.shape[0] == n:
        y = np.vstack([y, np.zeros((target_n - n, y.shape[1]))])
    return GraphSample(graph, x, y, mask)


def pad_batch(instances, target_n: int) -> list[GraphSample]:
    """Append isolated zero-feature nodes so every graph has ``target_n`` nodes.

    Padded nodes are flagged ``False`` in each sample's mask.
    """
    biggest = max((s.n_nodes for s in instances), default=0)
    if target_n < biggest:
        raise DataError(f"target_n={target_n} is below the largest graph ({biggest} nodes)")
    return [pad_sample(s, target_n) for s in instances]
