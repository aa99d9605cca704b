"""Exception types shared by all modules."""


class ArtifactError(Exception):
    """Base class."""


class DomainError(ArtifactError, ValueError):
    """Input outside the domain of the function."""


class ConvergenceError(ArtifactError):
    """A series, quadrature or iteration failed to converge."""


class PoleError(ArtifactError, ValueError):
    """Argument too close to a lattice point of a singular function."""


class RegimeError(ArtifactError, ValueError):
    """Quantity requested outside the regime where it is defined."""


class NumericalBreakdownError(ArtifactError):
    """Factorization produced a non-positive pivot."""


class PrecisionError(ArtifactError):
    """Double precision budget exceeded."""

    def __init__(self, msg: str, safe_limit: float | None = None):
        super().__init__(msg)
        self.safe_limit = safe_limit
