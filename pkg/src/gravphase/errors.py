"""Exception types shared across the package."""


class GravPhaseError(Exception):
    """Base class for library errors."""


class DomainError(GravPhaseError, ValueError):
    """An argument lies outside the domain of the operation."""


class ForbiddenRegionError(DomainError):
    """Evaluation requested in the classically forbidden region."""

    def __init__(self, message: str, turning_point: float):
        super().__init__(message)
        self.turning_point = turning_point


class NormalizationError(GravPhaseError, ValueError):
    """A state could not be normalized or is not normalized."""


class TransformConsistencyError(GravPhaseError, ArithmeticError):
    """A Wigner transform produced an imaginary residue above threshold."""


class DegenerateFieldError(GravPhaseError, ValueError):
    """A field is degenerate for the requested diagnostic."""


class SaturationError(GravPhaseError, OverflowError):
    """An exponent left the representable floating-point range."""


class RegistryError(GravPhaseError, KeyError):
    """Unknown species label."""
