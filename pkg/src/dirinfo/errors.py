"""Exception taxonomy shared across the package.

The split mirrors the CLI exit codes: bad inputs or malformed models are
user errors (exit 2), while failures that arise inside an otherwise valid
computation (degenerate distances, rank-deficient regressions, diverging
trajectories) are numerical errors (exit 3).
"""


class DirinfoError(Exception):
    """Base class for everything raised on purpose by this package."""


class DataError(DirinfoError, ValueError):
    """Invalid sample data or embedding request (bad shapes, unknown
    channel names, not enough samples for the requested lags)."""


class ModelError(DirinfoError, ValueError):
    """Invalid model specification (unstable VAR, non-PD covariance,
    malformed model file)."""


class EstimationError(DirinfoError, RuntimeError):
    """Numerical failure inside an estimator: zero k-th neighbor
    distances, rank-deficient regression designs, diverging simulations."""
