"""Exception types raised across corrviz."""

import numpy as np


class CorrvizError(Exception):
    """Base class for all corrviz errors."""


class NotPositiveDefinite(CorrvizError, np.linalg.LinAlgError):
    """A matrix that must be strictly positive definite is not."""


class ConvergenceError(CorrvizError, np.linalg.LinAlgError):
    """The Jacobi eigensolver hit its sweep cap."""


class ZeroVariance(CorrvizError, ValueError):
    """A covariance diagonal element is not strictly positive."""


class RankDeficient(CorrvizError, ValueError):
    """The correlation matrix is singular where a full-rank one is needed."""


class ZeroGradient(CorrvizError, ValueError):
    """The M-distance gradient vanishes, so it has no direction to scale."""


class ZeroModelValue(CorrvizError, ValueError):
    """A reference model value is zero, so the data/model ratio is undefined."""


class ParseError(CorrvizError, ValueError):
    """Input text could not be parsed in the declared format."""


class ValidationError(CorrvizError, ValueError):
    """Input parsed fine but violates a dataset invariant."""


class EmptyScene(CorrvizError, ValueError):
    """A plot scene has nothing to draw."""
