"""Input checks shared by the estimators and the command line."""

from __future__ import annotations

import numpy as np

from .exceptions import ConfigError, DataError
from .graph import Graph
from .samples import GraphSample


def check_graph(graph) -> Graph:
    if not isinstance(graph, Graph):
        raise TypeError(f"expected a qwnn.graph.Graph, got {type(graph).__name__}")
    if graph.n_nodes == 0:
        raise DataError("graph has no nodes")
    return graph


def check_node_array(x, n_nodes: int, name="X") -> np.ndarray:
    """Coerce node data to ``(B, N, F)``.

    Accepts ``(B, N)`` (one feature) or ``(B, N, F)``.
    """
    a = np.asarray(x, dtype=float)
    if a.ndim == 2:
        a = a[:, :, None]
    if a.ndim != 3:
        raise DataError(f"{name} must have shape (samples, nodes) or (samples, nodes, features), got {a.shape}")
    if a.shape[1] != n_nodes:
        raise DataError(f"{name} has {a.shape[1]} nodes per sample; the graph has {n_nodes}")
    if a.shape[0] == 0:
        raise DataError(f"{name} is empty")
    if not np.all(np.isfinite(a)):
        raise DataError(f"{name} contains NaN or infinite values")
    return a


def check_samples(samples, y=None, name="X") -> list[GraphSample]:
    """Validate a list of :class:`GraphSample`; ``y`` replaces their targets."""
    samples = list(samples)
    if not samples:
        raise DataError(f"{name} is empty")
    for i, s in enumerate(samples):
        if not isinstance(s, GraphSample):
            raise TypeError(f"{name}[{i}] is {type(s).__name__}, expected GraphSample")
        if not np.all(np.isfinite(s.x)):
            raise DataError(f"{name}[{i}] has non-finite features")
    widths = {s.x.shape[1] for s in samples}
    if len(widths) > 1:
        raise DataError(f"{name} mixes feature widths {sorted(widths)}")
    if y is not None:
        y = list(y)
        if len(y) != len(samples):
            raise DataError(f"{len(y)} targets for {len(samples)} samples")
        samples = [GraphSample(s.graph, s.x, t, s.mask) for s, t in zip(samples, y)]
    return samples


def require(value, field: str):
    """Raise :class:`ConfigError` when a setting without a default is missing."""
    if value is None:
        raise ConfigError(field, "is required and has no default")
    return value


def check_choice(value, choices, field: str):
    if value not in choices:
        raise ConfigError(field, f"must be one of {tuple(choices)}, got {value!r}")
    return value
