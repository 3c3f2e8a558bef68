"""Coulomb-matrix molecules and their conversion to bonded graphs.

The text import format holds one block per molecule::

    M
    Z x y z      (M lines)
    energy
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from ..exceptions import DataError
from ..graph import build_graph
from ..samples import GraphSample

logger = logging.getLogger(__name__)

ELEMENTS = (1, 6, 7, 8, 16)


def coulomb_matrix(charges, positions) -> np.ndarray:
    z = np.asarray(charges, dtype=float)
    r = np.asarray(positions, dtype=float)
    dist = np.linalg.norm(r[:, None, :] - r[None, :, :], axis=-1)
    with np.errstate(divide="ignore"):
        c = np.outer(z, z) / dist
    np.fill_diagonal(c, 0.5 * z**2.4)
    return c


@dataclass(frozen=True, eq=False)
class MoleculeRecord:
    coulomb: np.ndarray
    charges: np.ndarray
    energy: float = float("nan")

    def __post_init__(self):
        c = np.asarray(self.coulomb, dtype=float)
        z = np.asarray(self.charges, dtype=float)
        if c.ndim != 2 or c.shape != (z.size, z.size):
            raise DataError(f"coulomb matrix {c.shape} does not match {z.size} charges")
        if not np.allclose(c, c.T, rtol=1e-6, atol=0):
            raise DataError("coulomb matrix is not symmetric")
        if not np.allclose(np.diag(c), 0.5 * z**2.4, rtol=1e-4):
            raise DataError("coulomb diagonal does not equal 0.5 Z^2.4")
        object.__setattr__(self, "coulomb", c)
        object.__setattr__(self, "charges", z)

    @classmethod
    def from_geometry(cls, charges, positions, energy=float("nan")):
        return cls(coulomb_matrix(charges, positions), np.asarray(charges, dtype=float), energy)

    @property
    def n_atoms(self) -> int:
        return self.charges.size

    def distances(self) -> np.ndarray:
        """Interatomic distances ``Z_i Z_j / C_ij`` (zero on the diagonal)."""
        c = self.coulomb
        off = ~np.eye(self.n_atoms, dtype=bool)
        if np.any(c[off] == 0):
            i, j = np.argwhere((c == 0) & off)[0]
            raise DataError(f"zero coulomb entry between atoms {i} and {j}")
        d = np.zeros_like(c)
        d[off] = (np.outer(self.charges, self.charges)[off]) / c[off]
        return d


def two_means_1d(values, max_iter=100):
    """Lloyd's 2-means on a 1-D sample, seeded at the min and max.

    Returns ``(labels, centers)`` with label 0 for the low cluster.  Ties
    between the two centers go to the low cluster.
    """
    x = np.asarray(values, dtype=float)
    centers = np.array([x.min(), x.max()])
    labels = None
    for _ in range(max_iter):
        new = (np.abs(x - centers[1]) < np.abs(x - centers[0])).astype(int)
        if labels is not None and np.array_equal(new, labels):
            break
        labels = new
        for c in (0, 1):
            if np.any(labels == c):
                centers[c] = x[labels == c].mean()
    return labels, centers


def coulomb_to_graph(m: MoleculeRecord, return_repairs=False):
    """Bond graph from the short-distance 2-means cluster, repaired to connectivity.

    Excluded pairs are added nearest first until the graph is connected.
    With ``return_repairs`` the number of added pairs is also returned.
    """
    n = m.n_atoms
    if n < 2:
        raise DataError("need at least 2 atoms")
    d = m.distances()
    iu, ju = np.triu_indices(n, k=1)
    dist = d[iu, ju]
    labels, _ = two_means_1d(dist)
    short = labels == 0
    edges = [(int(i), int(j)) for i, j in zip(iu[short], ju[short])]
    g = build_graph(edges, n)
    repairs = 0
    if not g.is_connected():
        far = np.flatnonzero(~short)
        far = far[np.argsort(dist[far], kind="stable")]
        for k in far:
            edges.append((int(iu[k]), int(ju[k])))
            repairs += 1
            g = build_graph(edges, n)
            if g.is_connected():
                break
    return (g, repairs) if return_repairs else g


def element_one_hot(charges, elements=ELEMENTS) -> np.ndarray:
    z = np.rint(np.asarray(charges)).astype(int)
    lookup = {e: i for i, e in enumerate(elements)}
    out = np.zeros((z.size, len(elements)))
    for a, zi in enumerate(z):
        if zi not in lookup:
            raise DataError(f"element Z={zi} is not in the encoding {tuple(elements)}")
        out[a, lookup[zi]] = 1.0
    return out


def molecule_samples(records, elements=ELEMENTS) -> list[GraphSample]:
    """One graph-regression sample per molecule with one-hot element features."""
    out = []
    repaired = 0
    for rec in records:
        g, r = coulomb_to_graph(rec, return_repairs=True)
        repaired += r > 0
        out.append(GraphSample(g, element_one_hot(rec.charges, elements), float(rec.energy)))
    logger.info("%d of %d molecules needed connectivity repair", repaired, len(out))
    return out


def read_molecules(path) -> list[MoleculeRecord]:
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip() and not ln.lstrip().startswith("#")]
    records, i = [], 0
    while i < len(lines):
        try:
            m = int(lines[i])
            rows = [lines[i + 1 + a].split() for a in range(m)]
            z = [float(r[0]) for r in rows]
            pos = [[float(v) for v in r[1:4]] for r in rows]
            energy = float(lines[i + 1 + m])
        except (ValueError, IndexError) as exc:
            raise DataError(f"{path}: malformed molecule block starting at record line {i + 1}") from exc
        if any(len(p) != 3 for p in pos):
            raise DataError(f"{path}: atom rows need 'Z x y z'")
        records.append(MoleculeRecord.from_geometry(z, pos, energy))
        i += m + 2
    return records


def write_molecules(path, charges_list, positions_list, energies) -> None:
    with open(path, "w") as fh:
        for z, r, e in zip(charges_list, positions_list, energies):
            fh.write(f"{len(z)}\n")
            for zi, (x, y, w) in zip(z, r):
                fh.write(f"{int(zi)} {float(x)!r} {float(y)!r} {float(w)!r}\n")
            fh.write(f"{float(e)!r}\n")


def import_qm7_mat(mat_path, out_path, folds_path=None) -> int:
    """Convert the ``qm7.mat`` distribution (keys X, T, Z, R, P) to the text format.

    Zero-charge rows are padding and are dropped.  The predefined folds in
    ``P`` are written one fold id per molecule when ``folds_path`` is given.
    """
    from scipy.io import loadmat

    data = loadmat(mat_path)
    zs, rs, ts = data["Z"], data["R"], data["T"].ravel()
    charges, positions = [], []
    for z, r in zip(zs, rs):
        keep = z > 0
        charges.append(z[keep])
        positions.append(r[keep])
    write_molecules(out_path, charges, positions, ts)
    if folds_path is not None and "P" in data:
        fold_of = np.empty(len(ts), dtype=int)
        for f, idx in enumerate(data["P"]):
            fold_of[idx] = f
        np.savetxt(folds_path, fold_of, fmt="%d")
    return len(ts)
