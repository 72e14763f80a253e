"""Exception types raised across the package."""


class RealRootError(ValueError):
    """Base class for every error this package raises on bad input or numeric failure."""


class ParseError(RealRootError):
    pass


class ZeroPolynomialError(RealRootError):
    pass


class ConvergenceError(RealRootError):
    """Root iteration did not converge, even after the high-precision retry."""


class ImaginaryResidueError(RealRootError):
    """A quantity that must be real came out with a non-negligible imaginary part."""


class NoWitnessError(RealRootError):
    """Requested a negative witness for a real-rooted polynomial (none exists)."""


class NotRealRootedError(RealRootError):
    """Requested a sum-of-powers certificate for a polynomial with non-real roots."""


class VerificationError(RealRootError):
    pass


class SchemaError(RealRootError):
    pass


class InterpolationError(RealRootError):
    """Interpolation nodes are too close together for a trustworthy solve."""
