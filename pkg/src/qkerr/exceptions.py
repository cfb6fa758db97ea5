"""Exception types shared across the package."""


class ConvergenceError(RuntimeError):
    """A series or iterative eigensolver failed to converge."""


class TruncationError(ConvergenceError):
    """A truncated basis is too small for the requested accuracy."""
