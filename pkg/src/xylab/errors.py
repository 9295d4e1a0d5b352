"""Exception hierarchy shared by all xylab modules."""


class XYLabError(Exception):
    """Base class for all xylab errors."""


class ParameterError(XYLabError, ValueError):
    """Arguments outside the model's domain (CLI exit code 2)."""


class CapacityError(XYLabError, ValueError):
    """Requested system size exceeds a configured solver limit."""


class ConvergenceError(XYLabError, RuntimeError):
    """An iterative solver failed to converge (CLI exit code 3)."""


class RangeError(XYLabError, RuntimeError):
    """A root bracket could not be established within the allowed range."""


class MixedParityError(XYLabError, RuntimeError):
    """A state has no definite spin-flip parity; rotate the degenerate
    subspace to parity eigenstates before classifying."""


class StateFileError(XYLabError, ValueError):
    """A state dump file is malformed (CLI exit code 4)."""
