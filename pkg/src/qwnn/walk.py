"""Discrete-time coined quantum walks over many independent walkers.

Superpositions are dense arrays of shape ``(walkers, nodes, slots)``.  A coin
acts on the slot axis from the right (``phi[w, v] @ C``) and the shift is a
fixed involution of the flattened ``(node, slot)`` axis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import GraphError
from .graph import Graph, ShiftPermutation, transition_matrix

__all__ = [
    "DEFAULT_NODE_BUDGET",
    "COIN_MODES",
    "COIN_PLACEMENTS",
    "CoinSet",
    "UnitaryParams",
    "check_node_budget",
    "init_uniform_superposition",
    "grover_coin",
    "hadamard_coin",
    "rotation_pairs",
    "unitary_from_params",
    "unitary_from_angles",
    "unitary_angles_backward",
    "orthogonal_to_params",
    "spatial_padding_masks",
    "apply_coin",
    "apply_shift",
    "walk",
    "diffusion_matrix",
    "classical_walk_distribution",
]

DEFAULT_NODE_BUDGET = 2000
COIN_MODES = ("fixed-grover", "unitary-parametrized", "unconstrained")
COIN_PLACEMENTS = ("spatial", "temporal")


def check_node_budget(n_nodes: int, max_nodes: int | None = DEFAULT_NODE_BUDGET) -> None:
    """Reject graphs whose dense ``N x N x d`` superposition would be too large."""
    if max_nodes is not None and n_nodes > max_nodes:
        raise GraphError(
            f"graph has {n_nodes} nodes, above the node budget of {max_nodes}; "
            "dense superpositions need O(N^2 d) memory per step"
        )


def init_uniform_superposition(g: Graph, dtype=np.float64, max_nodes=DEFAULT_NODE_BUDGET):
    """One walker per node spread evenly over the node's real edge slots.

    Padding self-loop slots receive no amplitude; isolated nodes get an
    all-zero walker.
    """
    check_node_budget(g.n_nodes, max_nodes)
    d = g.n_slots
    phi = np.zeros((g.n_nodes, g.n_nodes, d), dtype=dtype)
    for v, nbrs in enumerate(g.neighbors):
        slots = [i for i, u in enumerate(nbrs) if u != v]
        if slots:
            phi[v, v, slots] = 1.0 / np.sqrt(len(slots))
    return phi


def grover_coin(d: int) -> np.ndarray:
    """Grover diffusion ``(2/d) J - I``."""
    if d < 1:
        raise ValueError("coin dimension must be >= 1")
    return np.full((d, d), 2.0 / d) - np.eye(d)


def hadamard_coin(d: int = 2) -> np.ndarray:
    """Normalized Sylvester Hadamard matrix; ``d`` must be a power of two."""
    if d < 1 or d & (d - 1):
        raise ValueError(f"Hadamard coin needs a power-of-two dimension, got {d}")
    h = np.array([[1.0]])
    while h.shape[0] < d:
        h = np.block([[h, h], [h, -h]])
    return h / np.sqrt(d)


# --------------------------------------------------------------------------
# unitary parametrization
# --------------------------------------------------------------------------


def rotation_pairs(d: int) -> list[tuple[int, int]]:
    """0-based ``(k, l)`` with ``l < k``; ``k`` ascending outer, ``l`` inner."""
    return [(k, l) for k in range(1, d) for l in range(k)]


@dataclass
class UnitaryParams:
    """Angles of ``U = D R_(1,0) R_(2,0) R_(2,1) ... R_(d-1,d-2)``.

    ``thetas`` and ``phis`` hold one angle per rotation pair (see
    :func:`rotation_pairs`), ``diag_phases`` one phase per row of ``D``.
    """

    thetas: np.ndarray
    phis: np.ndarray
    diag_phases: np.ndarray

    def __post_init__(self):
        self.thetas = np.asarray(self.thetas, dtype=float)
        self.phis = np.asarray(self.phis, dtype=float)
        self.diag_phases = np.asarray(self.diag_phases, dtype=float)
        d = self.diag_phases.shape[-1]
        m = d * (d - 1) // 2
        if self.thetas.shape[-1] != m or self.phis.shape[-1] != m:
            raise ValueError(f"d={d} needs {m} thetas and phis")

    @property
    def d(self) -> int:
        return self.diag_phases.shape[-1]

    @classmethod
    def zeros(cls, d: int) -> "UnitaryParams":
        m = d * (d - 1) // 2
        return cls(np.zeros(m), np.zeros(m), np.zeros(d))

    @classmethod
    def random(cls, d: int, rng=None, real: bool = False) -> "UnitaryParams":
        rng = np.random.default_rng(rng)
        m = d * (d - 1) // 2
        thetas = rng.uniform(-np.pi, np.pi, m)
        if real:
            return cls(thetas, np.zeros(m), np.zeros(d))
        return cls(thetas, rng.uniform(-np.pi, np.pi, m), rng.uniform(-np.pi, np.pi, d))


def _diag(alphas, real):
    vals = np.cos(alphas) if real else np.exp(1j * alphas)
    out = np.zeros(vals.shape + (vals.shape[-1],), dtype=vals.dtype)
    idx = np.arange(vals.shape[-1])
    out[..., idx, idx] = vals
    return out


def unitary_from_angles(thetas, phis, diag_phases, real: bool = False) -> np.ndarray:
    """Batched product of rotations; leading axes of the inputs are batch axes.

    In ``real`` mode the phases are ignored except through ``cos(diag_phases)``,
    which the caller keeps at 0 or pi so ``D`` is a real sign matrix.
    """
    thetas = np.asarray(thetas, dtype=float)
    phis = np.asarray(phis, dtype=float)
    a = _diag(np.asarray(diag_phases, dtype=float), real).copy()
    d = a.shape[-1]
    for m, (k, l) in enumerate(rotation_pairs(d)):
        c = np.cos(thetas[..., m])[..., None]
        s = np.sin(thetas[..., m])[..., None]
        e = 1.0 if real else np.exp(1j * phis[..., m])[..., None]
        ak = a[..., :, k].copy()
        al = a[..., :, l]
        a[..., :, k] = ak * e * c + al * s
        a[..., :, l] = -ak * e * s + al * c
    return a


def unitary_from_params(p: UnitaryParams, real: bool = False) -> np.ndarray:
    """Matrix of a single :class:`UnitaryParams`."""
    return unitary_from_angles(p.thetas, p.phis, p.diag_phases, real=real)


def unitary_angles_backward(thetas, phis, diag_phases, u, grad_u, real: bool = False):
    """Reverse-mode gradient of a real loss through :func:`unitary_from_angles`.

    ``grad_u`` follows the ``dL/dRe + i dL/dIm`` convention.  Intermediate
    prefix products are recovered by undoing rotations one at a time, so no
    per-rotation state is stored.

    Returns
    -------
    (g_thetas, g_phis, g_diag) : arrays shaped like the inputs.  Phase
    gradients are zero in ``real`` mode.
    """
    thetas = np.asarray(thetas, dtype=float)
    phis = np.asarray(phis, dtype=float)
    alphas = np.asarray(diag_phases, dtype=float)
    a = np.array(u, copy=True)
    h = np.array(grad_u, copy=True)
    g_theta = np.zeros_like(thetas)
    g_phi = np.zeros_like(phis)
    pairs = rotation_pairs(alphas.shape[-1])
    for m in range(len(pairs) - 1, -1, -1):
        k, l = pairs[m]
        c = np.cos(thetas[..., m])
        s = np.sin(thetas[..., m])
        e = np.ones_like(c) if real else np.exp(1j * phis[..., m])
        # block rows/cols (k, l): [[e c, -e s], [s, c]]
        rkk, rkl, rlk, rll = e * c, -e * s, s, c
        # undo this rotation: A_prev = A R^H
        ak, al = a[..., :, k].copy(), a[..., :, l].copy()
        a[..., :, k] = ak * np.conj(rkk)[..., None] + al * np.conj(rkl)[..., None]
        a[..., :, l] = ak * np.conj(rlk)[..., None] + al * np.conj(rll)[..., None]
        hk, hl = h[..., :, k].copy(), h[..., :, l].copy()
        # gradient w.r.t. the four block entries of R: A_prev^H H
        g_kk = np.sum(np.conj(a[..., :, k]) * hk, axis=-1)
        g_kl = np.sum(np.conj(a[..., :, k]) * hl, axis=-1)
        g_lk = np.sum(np.conj(a[..., :, l]) * hk, axis=-1)
        g_ll = np.sum(np.conj(a[..., :, l]) * hl, axis=-1)
        d_kk, d_kl, d_lk, d_ll = -e * s, -e * c, c, -s
        g_theta[..., m] = np.real(
            np.conj(g_kk) * d_kk + np.conj(g_kl) * d_kl + np.conj(g_lk) * d_lk + np.conj(g_ll) * d_ll
        )
        if not real:
            g_phi[..., m] = np.real(np.conj(g_kk) * (1j * e * c) + np.conj(g_kl) * (-1j * e * s))
        # H_prev = H R^H
        h[..., :, k] = hk * np.conj(rkk)[..., None] + hl * np.conj(rkl)[..., None]
        h[..., :, l] = hk * np.conj(rlk)[..., None] + hl * np.conj(rll)[..., None]
    if real:
        g_diag = np.zeros_like(alphas)
    else:
        idx = np.arange(alphas.shape[-1])
        g_diag = np.real(np.conj(h[..., idx, idx]) * 1j * np.exp(1j * alphas))
    return g_theta, g_phi, g_diag


def orthogonal_to_params(q) -> UnitaryParams:
    """Exact angles for a real orthogonal matrix (phases end up 0 or pi).

    Rows are peeled from the bottom: row ``k`` of the remaining factor fixes
    the ``k`` rotations that mix index ``k`` with the lower ones, and the last
    1x1 block is the sign carried by ``D``.
    """
    q = np.asarray(q, dtype=float)
    d = q.shape[0]
    if q.shape != (d, d) or not np.allclose(q.T @ q, np.eye(d), atol=1e-9):
        raise ValueError("expected a square real orthogonal matrix")
    pairs = rotation_pairs(d)
    thetas = np.zeros(len(pairs))
    cur = q.copy()
    for k in range(d - 1, 0, -1):
        row = cur[k, : k + 1]
        first = pairs.index((k, 0))
        rho = row[k]
        for l in range(k - 1, -1, -1):
            thetas[first + l] = np.arctan2(-row[l], rho)
            rho = np.hypot(row[l], rho)
        block = np.zeros(len(pairs))
        block[first : first + k] = thetas[first : first + k]
        b_k = unitary_from_angles(block, np.zeros(len(pairs)), np.zeros(d), real=True)
        cur = cur @ b_k.T
    sign = np.sign(cur[0, 0]) or 1.0
    diag = np.zeros(d)
    diag[0] = 0.0 if sign > 0 else np.pi
    return UnitaryParams(thetas, np.zeros(len(pairs)), diag)


def spatial_padding_masks(g: Graph) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Masks selecting the live part of each node's coin.

    Returns ``(matrix_mask, rotation_mask, diag_mask)`` with shapes
    ``(N, d, d)``, ``(N, d(d-1)/2)`` and ``(N, d)``; entries tied to slots at or
    beyond a node's slot count are zero, so those slots see an identity coin.
    """
    d = g.n_slots
    counts = np.array([len(nbrs) for nbrs in g.neighbors], dtype=int)
    live = np.arange(d)[None, :] < counts[:, None]
    matrix_mask = (live[:, :, None] & live[:, None, :]).astype(float)
    pairs = rotation_pairs(d)
    rot_mask = np.array([[float(k < c) for k, _ in pairs] for c in counts]).reshape(len(counts), len(pairs))
    return matrix_mask, rot_mask, live.astype(float)


# --------------------------------------------------------------------------
# coins and steps
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class CoinSet:
    """Effective coin matrices, one per node (spatial) or per step (temporal)."""

    placement: str
    mode: str
    matrices: np.ndarray

    def __post_init__(self):
        if self.placement not in COIN_PLACEMENTS:
            raise ValueError(f"placement must be one of {COIN_PLACEMENTS}")
        if self.mode not in COIN_MODES:
            raise ValueError(f"mode must be one of {COIN_MODES}")
        m = np.asarray(self.matrices)
        if m.ndim != 3 or m.shape[1] != m.shape[2]:
            raise ValueError("coin matrices must have shape (count, d, d)")

    @property
    def d(self) -> int:
        return self.matrices.shape[-1]

    @classmethod
    def grover(cls, g: Graph, placement: str = "temporal", steps: int = 1) -> "CoinSet":
        """Grover coins: ``grover(d)`` per step, or ``grover(slots at v)`` per node."""
        d = g.n_slots
        if placement == "temporal":
            return cls("temporal", "fixed-grover", np.repeat(grover_coin(d)[None], steps, axis=0))
        mats = np.repeat(np.eye(d)[None], g.n_nodes, axis=0)
        for v, nbrs in enumerate(g.neighbors):
            if nbrs:
                mats[v, : len(nbrs), : len(nbrs)] = grover_coin(len(nbrs))
        return cls("spatial", "fixed-grover", mats)

    @classmethod
    def temporal(cls, matrices, mode: str = "unconstrained") -> "CoinSet":
        return cls("temporal", mode, np.asarray(matrices))

    @classmethod
    def spatial(cls, matrices, mode: str = "unconstrained") -> "CoinSet":
        return cls("spatial", mode, np.asarray(matrices))

    @classmethod
    def from_unitary(cls, params: UnitaryParams, placement: str, real: bool = False) -> "CoinSet":
        """Coins from batched angles (leading axis = node or step)."""
        mats = unitary_from_angles(params.thetas, params.phis, params.diag_phases, real=real)
        return cls(placement, "unitary-parametrized", mats)


def apply_coin(s: np.ndarray, coins: CoinSet | np.ndarray, step_index: int = 0, placement=None):
    """Multiply every node's slot vector by its coin.

    ``coins`` may be a :class:`CoinSet` or a raw ``(count, d, d)`` array with
    ``placement`` given explicitly.
    """
    if isinstance(coins, CoinSet):
        placement, mats = coins.placement, coins.matrices
    else:
        mats = np.asarray(coins)
    if mats.shape[-1] != s.shape[-1]:
        raise ValueError(f"coin dimension {mats.shape[-1]} != superposition slots {s.shape[-1]}")
    if placement == "temporal":
        if not 0 <= step_index < mats.shape[0]:
            raise IndexError(f"step {step_index} out of range for {mats.shape[0]} temporal coins")
        return s @ mats[step_index]
    if placement == "spatial":
        if mats.shape[0] != s.shape[1]:
            raise ValueError(f"{mats.shape[0]} spatial coins for {s.shape[1]} nodes")
        return np.einsum("wvk,vkm->wvm", s, mats)
    raise ValueError(f"unknown coin placement {placement!r}")


def apply_shift(s: np.ndarray, shift: ShiftPermutation) -> np.ndarray:
    """Swap amplitudes across every edge; a pure permutation of entries."""
    w, n, d = s.shape
    if (n, d) != (shift.n_nodes, shift.d):
        raise ValueError(f"shift is defined on ({shift.n_nodes}, {shift.d}), superposition is ({n}, {d})")
    return s.reshape(w, n * d)[:, shift.perm].reshape(w, n, d)


def walk(s0: np.ndarray, coins: CoinSet, shift: ShiftPermutation, steps: int, history: bool = False):
    """Run ``steps`` coin-then-shift updates.

    With ``history=True`` a list of all ``steps + 1`` superpositions is
    returned instead of the final one.
    """
    if steps < 0:
        raise ValueError("number of steps must be >= 0")
    s = s0
    states = [s0]
    for t in range(steps):
        s = apply_shift(apply_coin(s, coins, t), shift)
        if history:
            states.append(s)
    return states if history else s


def diffusion_matrix(s: np.ndarray) -> np.ndarray:
    """``P[w, v] = sum_i |phi[w, v, i]|^2``; no renormalization."""
    if np.iscomplexobj(s):
        return np.sum(s.real**2 + s.imag**2, axis=-1)
    return np.sum(s * s, axis=-1)


def classical_walk_distribution(g: Graph, start_dist, steps: int) -> np.ndarray:
    """Distribution ``start_dist @ (D^-1 A)^steps`` of a simple random walk."""
    p = np.asarray(start_dist, dtype=float)
    if p.shape != (g.n_nodes,):
        raise ValueError("start distribution must have one entry per node")
    if not np.isclose(p.sum(), 1.0):
        raise ValueError("start distribution must sum to 1")
    w = transition_matrix(g)
    for _ in range(int(steps)):
        p = p @ w
    return p
