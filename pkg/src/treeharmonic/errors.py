"""Exception types shared across the package."""


class TreeHarmonicError(Exception):
    pass


class ParameterError(TreeHarmonicError, ValueError):
    """Invalid parameter value (Q < 2, p < 1, Re z <= 0, mismatched Q, ...)."""


class TruncationError(TreeHarmonicError):
    """A computation needs vertices outside the materialized ball.

    Raised instead of silently zero-padding; the caller must raise the depth.
    """

    def __init__(self, message, radius=None):
        super().__init__(message)
        self.radius = radius


class ResolutionError(TreeHarmonicError):
    """Quadrature grid too coarse for the requested number of shells."""


class ToleranceError(TreeHarmonicError):
    """A truncated series cannot meet the requested tolerance."""

    def __init__(self, message, achievable=None):
        super().__init__(message)
        self.achievable = achievable


class PoleError(TreeHarmonicError):
    """Evaluation at (or numerically at) a pole of the c-function."""


class BoundViolation(TreeHarmonicError, AssertionError):
    """An asserted analytic bound failed; carries the offending parameters."""

    def __init__(self, message, z=None, R=None, n=None):
        super().__init__(message)
        self.z = z
        self.R = R
        self.n = n
