"""Exception types shared across the package."""


class ExpofuseError(Exception):
    """Base class for all package errors."""


class DimensionMismatchError(ExpofuseError, ValueError):
    """Array shapes do not satisfy an operation's contract."""


class ParameterError(ExpofuseError, ValueError):
    """A numeric parameter is out of its admissible range."""


class DataError(ExpofuseError):
    """Input data (files, imported images) is malformed or inconsistent."""


class CubeFormatError(DataError):
    """Base class for binary cube file format violations."""


class BadMagicError(CubeFormatError):
    """File does not start with the expected magic tag."""


class TruncatedPayloadError(CubeFormatError):
    """Payload length does not match the header dimensions."""


class DimOverflowError(CubeFormatError):
    """Header dimensions are zero or implausibly large."""


class MetricError(ExpofuseError):
    """A quality metric could not be evaluated on the given pair."""


class SolverDivergedError(ExpofuseError, RuntimeError):
    """The objective became non-finite during iteration.

    The ``block`` attribute names the variable block whose update produced
    the non-finite value.
    """

    def __init__(self, message: str, block: str):
        super().__init__(message)
        self.block = block
