"""Exception types shared across the package."""


class BellkitError(Exception):
    """Base class for all bellkit errors."""


class BadDimension(BellkitError):
    """Matrix shape not supported by the operation."""


class NotHermitian(BellkitError):
    """Hermiticity check failed."""


class NotPSD(BellkitError):
    """Matrix has an eigenvalue below the rejection threshold."""


class NotUnitary(BellkitError):
    """Unitarity check failed."""


class NotConverged(BellkitError):
    """Iteration hit its step limit before reaching tolerance."""


class SingularMarginal(BellkitError):
    """A state or marginal is rank-deficient where inversion is required."""


class DimensionMismatch(BellkitError):
    """Two operands have incompatible shapes."""


class BoundViolation(BellkitError):
    """A rigorous inequality failed beyond numerical slack."""


class DegenerateSample(BellkitError):
    """Sample statistics are undefined (too few points or zero variance)."""
