"""Exception types shared across the package.

Each class maps onto one CLI exit code so that callers (and the ``clustertree``
command) can tell user mistakes apart from bad data and from internal bugs.
"""


class ClusterTreeError(Exception):
    """Base class for all package errors."""

    exit_code = 1

    def __init__(self, message, module=None):
        self.module = module
        if module:
            message = f"[{module}] {message}"
        super().__init__(message)


class ConfigError(ClusterTreeError, ValueError):
    """Invalid parameters (bandwidth, alpha, B, grid resolution, ...)."""

    exit_code = 2


class DataError(ClusterTreeError, ValueError):
    """Input data that cannot be processed (degenerate, ragged, disconnected)."""

    exit_code = 3


class InvariantError(ClusterTreeError, RuntimeError):
    """An internal invariant was violated; indicates a bug."""

    exit_code = 4
