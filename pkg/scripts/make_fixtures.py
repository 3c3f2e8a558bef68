"""Regenerate the small synthetic fixtures under fixtures/ (deterministic).

    python3 scripts/make_fixtures.py
"""

import datetime as dt
import os

import numpy as np

from qwnn.datasets import TemperatureData, write_molecules, write_temperature
from qwnn.datasets.tu import _write_lines

ROOT = os.path.join(os.path.dirname(__file__), "..", "fixtures")


def temperature(rng):
    n, days = 12, 45
    lon = rng.uniform(-120, -75, n)
    lat = rng.uniform(30, 47, n)
    t = np.arange(days)
    base = 25 - 0.6 * (lat - 38) + 0.05 * (lon + 100)
    front = 4 * np.sin(2 * np.pi * (t[:, None] / 9.0 - (lon[None, :] + 120) / 60.0))
    tmax = base[None, :] + front + rng.normal(0, 0.7, (days, n))
    dates = [dt.date(2009, 3, 1) + dt.timedelta(days=int(i)) for i in t]
    data = TemperatureData([f"ST{i:03d}" for i in range(n)], np.c_[lon, lat], dates, np.round(tmax, 1))
    out = os.path.join(ROOT, "temperature")
    os.makedirs(out, exist_ok=True)
    stations, obs = os.path.join(out, "stations.csv"), os.path.join(out, "observations.csv")
    write_temperature(data, stations, obs)
    # one station misses day 20, so that day is dropped on load
    with open(obs) as fh:
        lines = fh.readlines()
    drop = f"{dates[20].isoformat()},ST005,"
    with open(obs, "w") as fh:
        fh.writelines(line for line in lines if not line.startswith(drop))


def _molecule(rng, kind):
    # rough geometries in angstrom, jittered
    if kind == "water":
        z, r = [8, 1, 1], [[0, 0, 0], [0.96, 0, 0], [-0.24, 0.93, 0]]
    elif kind == "methane":
        a = 1.09 / np.sqrt(3)
        z, r = [6, 1, 1, 1, 1], [[0, 0, 0], [a, a, a], [a, -a, -a], [-a, a, -a], [-a, -a, a]]
    elif kind == "ammonia":
        z, r = [7, 1, 1, 1], [[0, 0, 0.38], [0.94, 0, 0], [-0.47, 0.81, 0], [-0.47, -0.81, 0]]
    elif kind == "ethane":
        a = 1.09 / np.sqrt(3)
        z = [6, 6, 1, 1, 1, 1, 1, 1]
        r = [[0, 0, 0], [1.54, 0, 0], [-a, a, a], [-a, -a, a], [-a, 0, -1.0], [1.54 + a, a, a], [1.54 + a, -a, a], [1.54 + a, 0, -1.0]]
    else:  # hydrogen sulfide
        z, r = [16, 1, 1], [[0, 0, 0], [1.34, 0, 0], [-0.05, 1.34, 0]]
    r = np.asarray(r, dtype=float) + rng.normal(0, 0.02, (len(z), 3))
    return z, r


def molecules(rng):
    kinds = ["water", "methane", "ammonia", "ethane", "sulfide"] * 4
    zs, rs, es = [], [], []
    for k in kinds:
        z, r = _molecule(rng, k)
        zs.append(z)
        rs.append(np.round(r, 4))
        es.append(round(-100.0 * (len(z) - 1) + rng.normal(0, 5), 2))
    out = os.path.join(ROOT, "molecules")
    os.makedirs(out, exist_ok=True)
    write_molecules(os.path.join(out, "toy.txt"), zs, rs, es)
    folds = np.arange(len(kinds)) // 4  # consecutive blocks, each mixing kinds
    np.savetxt(os.path.join(out, "toy_folds.txt"), folds, fmt="%d")


def tu_classes(rng):
    """Two classes: rings (label 1) and trees (label 2), node labels by degree."""
    indicator, edges, node_labels, graph_labels = [], [], [], []
    offset = 0
    for gi in range(40):
        n = int(rng.integers(5, 10))
        if gi % 2 == 0:
            pairs = [(i, (i + 1) % n) for i in range(n)]
            label = 1
        else:
            pairs = [(int(rng.integers(0, i)), i) for i in range(1, n)]
            label = 2
        nbrs = [[] for _ in range(n)]
        for a, b in pairs:
            nbrs[a].append(b)
            nbrs[b].append(a)
        for v in range(n):
            for u in sorted(nbrs[v]):
                edges.append(f"{offset + v + 1}, {offset + u + 1}")
            node_labels.append(str(min(len(nbrs[v]), 3)))
        indicator += [str(gi + 1)] * n
        graph_labels.append(str(label))
        offset += n
    out = os.path.join(ROOT, "tu", "RINGTREE")
    os.makedirs(out, exist_ok=True)
    stem = os.path.join(out, "RINGTREE")
    _write_lines(f"{stem}_A.txt", edges)
    _write_lines(f"{stem}_graph_indicator.txt", indicator)
    _write_lines(f"{stem}_node_labels.txt", node_labels)
    _write_lines(f"{stem}_graph_labels.txt", graph_labels)


if __name__ == "__main__":
    rng = np.random.default_rng(2009)
    temperature(rng)
    molecules(rng)
    tu_classes(rng)
