"""Quantum phase-space dynamics of a particle in a uniform gravitational field."""
from .errors import (
    DegenerateFieldError,
    DomainError,
    ForbiddenRegionError,
    GravPhaseError,
    NormalizationError,
    RegistryError,
    SaturationError,
    TransformConsistencyError,
)
from .model import (
    MassPair,
    PhysicsContext,
    UnitMode,
    dimensionless_energy,
    energy_scale,
    eotvos,
    specific_acceleration,
    wave_vector,
)
from .specfun import AiryValue, airy, airy_ai, airy_zero, airy_zero_asymptotic

__version__ = "0.1.0"

__all__ = [
    "AiryValue",
    "DegenerateFieldError",
    "DomainError",
    "ForbiddenRegionError",
    "GravPhaseError",
    "MassPair",
    "NormalizationError",
    "PhysicsContext",
    "RegistryError",
    "SaturationError",
    "TransformConsistencyError",
    "UnitMode",
    "airy",
    "airy_ai",
    "airy_zero",
    "airy_zero_asymptotic",
    "dimensionless_energy",
    "energy_scale",
    "eotvos",
    "specific_acceleration",
    "wave_vector",
]
