"""Model checkpoints: parameters in an ``.npz`` plus a JSON header with a checksum."""

from __future__ import annotations

import hashlib
import json
import zipfile

import numpy as np

from .exceptions import CheckpointError
from .graph import Graph
from .nn import ModelGraphNet, ModelSpec, build_model

FORMAT_VERSION = 1
_META_KEY = "__meta__"


def _digest(state: dict) -> str:
    h = hashlib.sha256()
    for key in sorted(state):
        a = np.ascontiguousarray(state[key])
        h.update(key.encode())
        h.update(str(a.dtype).encode())
        h.update(str(a.shape).encode())
        h.update(a.tobytes())
    return h.hexdigest()


def _graph_dict(g: Graph | None):
    if g is None:
        return None
    return {"n_nodes": g.n_nodes, "neighbors": [list(n) for n in g.neighbors], "d_max": g.d_max}


def _graph_from_dict(d) -> Graph | None:
    if d is None:
        return None
    return Graph(d["n_nodes"], tuple(tuple(n) for n in d["neighbors"]), d["d_max"])


def save_checkpoint(path, model: ModelGraphNet, extra: dict | None = None) -> None:
    """Write ``model`` to ``path``.

    Models with spatial coins or learned amplitudes embed their graph so the
    checkpoint can be rebuilt on its own.
    """
    if model.spec is None:
        raise CheckpointError("model has no ModelSpec; build it with build_model")
    state = model.state_dict()
    meta = {
        "version": FORMAT_VERSION,
        "spec": model.spec.to_dict(),
        "graph": _graph_dict(getattr(model.graph_layer, "graph", None)),
        "sha256": _digest(state),
        "extra": extra or {},
    }
    arrays = dict(state)
    arrays[_META_KEY] = np.array(json.dumps(meta))
    with open(path, "wb") as fh:
        np.savez(fh, **arrays)


def load_checkpoint(path) -> tuple[ModelGraphNet, dict]:
    """Rebuild the model stored at ``path``; returns ``(model, meta)``.

    Raises :class:`CheckpointError` on unreadable files, checksum mismatch
    or parameter shapes that disagree with the stored spec.
    """
    try:
        with np.load(path, allow_pickle=False) as data:
            meta = json.loads(str(data[_META_KEY]))
            state = {k: data[k] for k in data.files if k != _META_KEY}
    except FileNotFoundError:
        raise
    except (zipfile.BadZipFile, OSError, ValueError, KeyError, EOFError) as exc:
        raise CheckpointError(f"{path}: unreadable or corrupted checkpoint ({exc}); checksum verification failed") from exc
    if meta.get("version") != FORMAT_VERSION:
        raise CheckpointError(f"{path}: unsupported checkpoint version {meta.get('version')!r}")
    if _digest(state) != meta.get("sha256"):
        raise CheckpointError(f"{path}: parameter checksum mismatch; the file is corrupted")
    spec = ModelSpec.from_dict(meta["spec"])
    model = build_model(spec, graph=_graph_from_dict(meta.get("graph")), rng=0)
    try:
        model.load_state_dict(state)
    except (KeyError, ValueError) as exc:
        raise CheckpointError(f"{path}: {exc}") from exc
    return model, meta
