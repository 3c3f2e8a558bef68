"""Nearest-neighbor graphs over geographic coordinates."""

from __future__ import annotations

import logging

import numpy as np
from sklearn.metrics.pairwise import haversine_distances

from ..graph import Graph, build_graph

logger = logging.getLogger(__name__)

EARTH_RADIUS_KM = 6371.0088


def great_circle_km(coords) -> np.ndarray:
    """Pairwise great-circle distances for ``(lon, lat)`` rows in degrees."""
    coords = np.asarray(coords, dtype=float)
    latlon = np.radians(coords[:, ::-1])
    return EARTH_RADIUS_KM * haversine_distances(latlon)


def knn_geo_graph(coords, k: int = 8) -> Graph:
    """Symmetrized k-nearest-neighbor graph: ``u ~ v`` if either picks the other.

    Equal distances (including duplicate coordinates) are broken by the
    lower station index.  Neighbor lists follow station order, then distance.
    """
    coords = np.asarray(coords, dtype=float)
    if coords.ndim != 2 or coords.shape[1] != 2:
        raise ValueError("coords must be an (n, 2) array of lon/lat degrees")
    if k < 1:
        raise ValueError("k must be >= 1")
    n = coords.shape[0]
    dist = great_circle_km(coords)
    idx = np.arange(n)
    edges = []
    seen = set()
    for i in range(n):
        others = idx[idx != i]
        order = others[np.lexsort((others, dist[i, others]))][:k]
        for j in order:
            key = (min(i, j), max(i, j))
            if key not in seen:
                seen.add(key)
                edges.append((i, int(j)))
    g = build_graph(edges, n)
    if not g.is_connected():
        logger.warning("%d-NN graph over %d stations has %d components", k, n, g.n_components())
    return g
