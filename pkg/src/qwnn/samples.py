"""Container for one (graph, node features, target) example."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import Graph


@dataclass(frozen=True, eq=False)
class GraphSample:
    """A graph with node features ``x`` of shape ``(N, F)`` and a target.

    ``y`` is ``(N, F_out)`` for node-level tasks, a class id for
    classification and a scalar (or vector) for graph regression.  ``mask``
    flags real nodes when the graph carries zero padding.
    """

    graph: Graph
    x: np.ndarray
    y: object = None
    mask: np.ndarray | None = None

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        if x.ndim == 1:
            x = x[:, None]
        if x.ndim != 2 or x.shape[0] != self.graph.n_nodes:
            raise ValueError(
                f"features must have one row per node: got {x.shape} for {self.graph.n_nodes} nodes"
            )
        object.__setattr__(self, "x", x)
        if self.mask is not None:
            mask = np.asarray(self.mask, dtype=bool)
            if mask.shape != (self.graph.n_nodes,):
                raise ValueError("mask must have one entry per node")
            object.__setattr__(self, "mask", mask)

    @property
    def n_nodes(self) -> int:
        return self.graph.n_nodes
