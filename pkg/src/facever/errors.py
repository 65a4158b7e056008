"""Exception types shared across the pipeline.

Every error raised on purpose by this package derives from FaceVerError so
the CLI can map failures to a single machine-parsable error line.
"""


class FaceVerError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(FaceVerError):
    """Array shapes are inconsistent with the requested operation."""


class ConfigurationError(FaceVerError):
    """A parameter value violates an operation's contract."""


class ArchitectureError(FaceVerError):
    """An architecture produces an invalid intermediate shape."""


class LabelError(FaceVerError):
    """A class label lies outside the valid range."""


class TrainingDivergedError(FaceVerError):
    """Training loss became non-finite."""


class IngestionError(FaceVerError):
    """A dataset file or directory is missing or unusable."""


class PairParseError(FaceVerError):
    """A pairs/people text file contains a malformed line."""


class GeometryError(FaceVerError):
    """Face-crop geometry is degenerate (e.g. coincident eye centers)."""


class NormalizationError(FaceVerError):
    """A vector cannot be normalized (zero standard deviation)."""


class DegenerateInputError(FaceVerError):
    """A distance measure received an input it is undefined for."""


class FusionError(FaceVerError):
    """A feature fusion is missing one of its inputs."""


class FittingError(FaceVerError):
    """A statistical model cannot be fit from the given data."""


class ProtocolError(FaceVerError):
    """The evaluation protocol was invoked with inconsistent inputs."""


class ContainerError(FaceVerError):
    """A binary container file is malformed or has the wrong magic."""
