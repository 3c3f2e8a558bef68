"""Loaders that turn the experiment corpora into :class:`~qwnn.samples.GraphSample` lists."""

from ..samples import GraphSample
from .geo import great_circle_km, knn_geo_graph
from .molecules import (
    ELEMENTS,
    MoleculeRecord,
    coulomb_matrix,
    coulomb_to_graph,
    element_one_hot,
    import_qm7_mat,
    molecule_samples,
    read_molecules,
    two_means_1d,
    write_molecules,
)
from .splits import Split, pad_batch, pad_sample, split_dataset
from .temperature import TemperatureData, import_ghcn, load_temperature, write_temperature
from .tu import TUDataset, load_tu_dataset, write_tu_dataset

# task-flavored names for the shared sample type
NodeRegressionInstance = GraphSample
GraphClassificationInstance = GraphSample

__all__ = [
    "ELEMENTS",
    "GraphClassificationInstance",
    "MoleculeRecord",
    "NodeRegressionInstance",
    "Split",
    "TUDataset",
    "TemperatureData",
    "coulomb_matrix",
    "coulomb_to_graph",
    "element_one_hot",
    "great_circle_km",
    "import_ghcn",
    "import_qm7_mat",
    "knn_geo_graph",
    "load_temperature",
    "load_tu_dataset",
    "molecule_samples",
    "pad_batch",
    "pad_sample",
    "read_molecules",
    "split_dataset",
    "two_means_1d",
    "write_molecules",
    "write_temperature",
    "write_tu_dataset",
]
