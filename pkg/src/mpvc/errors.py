"""Exception types shared across the toolkit."""


class MpvcError(Exception):
    """Base class for all toolkit errors."""


class DimensionMismatch(MpvcError, ValueError):
    """An input array has the wrong length or shape."""


class ParameterError(MpvcError, ValueError):
    """A scalar parameter is outside its admissible range."""


class PreconditionError(MpvcError, ValueError):
    """A documented precondition of an operation is violated."""
