"""Exception hierarchy shared by the library and the command line."""


class QWNNError(Exception):
    """Base class for all package errors."""


class GraphError(QWNNError, ValueError):
    """Malformed graph input (bad ids, duplicate edges, isolated nodes...)."""


class DataError(QWNNError, ValueError):
    """Dataset files are missing, malformed or inconsistent."""


class ConfigError(QWNNError, ValueError):
    """Invalid experiment configuration.

    Parameters
    ----------
    field : str
        Dotted path of the offending field, e.g. ``"training.learning_rate"``.
    message : str
        Human readable reason.
    """

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


class TrainingDivergedError(QWNNError, FloatingPointError):
    """Loss became NaN or infinite during training."""


class CheckpointError(QWNNError, ValueError):
    """Checkpoint is corrupted or incompatible with the model."""


class NotPreparedError(QWNNError, RuntimeError):
    """Backward was requested before a forward pass was recorded."""
