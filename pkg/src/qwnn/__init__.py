"""Coined quantum walks with learned coins, used as graph diffusion layers."""

from .estimators import GraphClassifier, GraphRegressor, QuantumWalkDiffusion, QuantumWalkNodeRegressor
from .exceptions import (
    CheckpointError,
    ConfigError,
    DataError,
    GraphError,
    NotPreparedError,
    QWNNError,
    TrainingDivergedError,
)
from .graph import Graph, build_graph, build_shift, order_edges, regularize_with_self_loops
from .nn import LossSpec, ModelGraphNet, ModelSpec, QuantumWalkLayer, build_model
from .samples import GraphSample
from .training import TrainConfig, finite_difference_check, train

__version__ = "0.1.0"

__all__ = [
    "CheckpointError",
    "ConfigError",
    "DataError",
    "Graph",
    "GraphClassifier",
    "GraphError",
    "GraphRegressor",
    "GraphSample",
    "LossSpec",
    "ModelGraphNet",
    "ModelSpec",
    "NotPreparedError",
    "QWNNError",
    "QuantumWalkDiffusion",
    "QuantumWalkLayer",
    "QuantumWalkNodeRegressor",
    "TrainConfig",
    "TrainingDivergedError",
    "build_graph",
    "build_model",
    "build_shift",
    "finite_difference_check",
    "order_edges",
    "regularize_with_self_loops",
    "train",
]
