"""Species masses, physical constants and the derived mass-combination scalars."""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .errors import DomainError, RegistryError

HBAR_SI = 1.054571817e-34  # J s
G_STANDARD = 9.80665  # m / s^2
K_BOLTZMANN_SI = 1.380649e-23  # J / K
ATOMIC_MASS_UNIT = 1.66054e-27  # kg
EV = 1.602176634e-19  # J


class UnitMode(enum.Enum):
    SI = "SI"
    NATURAL = "Natural"


@dataclass(frozen=True)
class MassPair:
    """Inertial and gravitational mass of one species."""

    m_i: float
    m_g: float
    label: str = ""

    def __post_init__(self):
        if not (self.m_i > 0 and self.m_g > 0):
            raise DomainError(f"masses must be positive, got m_i={self.m_i}, m_g={self.m_g}")
        if not (math.isfinite(self.m_i) and math.isfinite(self.m_g)):
            raise DomainError("masses must be finite")

    @classmethod
    def equal(cls, m: float, label: str = "") -> "MassPair":
        return cls(m, m, label)

    def ratio(self) -> float:
        """zeta = m_g / m_i."""
        return self.m_g / self.m_i

    def geometric_mean(self) -> float:
        """M = sqrt(m_i m_g)."""
        return math.sqrt(self.m_i * self.m_g)

    def scaled(self, lam: float) -> "MassPair":
        return MassPair(lam * self.m_i, lam * self.m_g, self.label)


@dataclass(frozen=True)
class PhysicsContext:
    hbar: float = HBAR_SI
    g_ref: float = G_STANDARD
    unit_mode: UnitMode = UnitMode.SI
    k_boltzmann: float = field(default=K_BOLTZMANN_SI)

    def __post_init__(self):
        if not (self.hbar > 0 and self.k_boltzmann > 0):
            raise DomainError("hbar and k_boltzmann must be positive")
        # g_ref = 0 is the free particle; operations that need gravity check for it
        if not (self.g_ref >= 0 and math.isfinite(self.g_ref)):
            raise DomainError("g_ref must be finite and non-negative")

    @classmethod
    def si(cls, hbar: float = HBAR_SI, g_ref: float = G_STANDARD) -> "PhysicsContext":
        return cls(hbar=hbar, g_ref=g_ref, unit_mode=UnitMode.SI)

    @classmethod
    def natural(cls, hbar: float = 1.0, g_ref: float = 1.0) -> "PhysicsContext":
        return cls(hbar=hbar, g_ref=g_ref, unit_mode=UnitMode.NATURAL, k_boltzmann=1.0)

    @property
    def natural_units(self) -> bool:
        return self.unit_mode is UnitMode.NATURAL


RB87 = MassPair.equal(86.909 * ATOMIC_MASS_UNIT, "rb87")
UNIT_MASS = MassPair.equal(1.0, "unit")

_BUILTIN_SPECIES = {"rb87": RB87, "unit": UNIT_MASS}


def load_registry(path: str | Path | None = None) -> dict[str, MassPair]:
    """Built-in species merged with a JSON array of ``{label, m_i_kg, m_g_kg}``."""
    registry = dict(_BUILTIN_SPECIES)
    if path is None:
        return registry
    entries = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(entries, list):
        raise RegistryError("species registry must be a JSON array")
    for entry in entries:
        try:
            pair = MassPair(float(entry["m_i_kg"]), float(entry["m_g_kg"]), str(entry["label"]))
        except (KeyError, TypeError) as exc:
            raise RegistryError(f"malformed registry entry {entry!r}") from exc
        registry[pair.label] = pair
    return registry


def lookup_species(label: str, registry: dict[str, MassPair] | None = None) -> MassPair:
    registry = load_registry() if registry is None else registry
    try:
        return registry[label.lower()]
    except KeyError:
        raise RegistryError(f"unknown species {label!r}; known: {sorted(registry)}") from None


def specific_acceleration(species: MassPair, ctx: PhysicsContext) -> float:
    """g~ = g (m_g / m_i)."""
    return ctx.g_ref * species.m_g / species.m_i


def eotvos(a: MassPair, b: MassPair) -> float:
    """Normalized difference 2 (r_A - r_B) / (r_A + r_B) of the mass ratios."""
    ra, rb = a.ratio(), b.ratio()
    return 2.0 * (ra - rb) / (ra + rb)


def wave_vector(species: MassPair, ctx: PhysicsContext) -> float:
    """Inverse length scale (2 m_i m_g g / hbar^2)^(1/3) of the linear potential."""
    return (2.0 * species.m_i * species.m_g * ctx.g_ref / ctx.hbar**2) ** (1.0 / 3.0)


def _gravity(species: MassPair, ctx: PhysicsContext) -> float:
    gt = specific_acceleration(species, ctx)
    if gt == 0:
        raise DomainError("operation requires a nonzero gravitational acceleration")
    return gt


def energy_scale(species: MassPair, ctx: PhysicsContext) -> float:
    """(m_i hbar^2 g~^2 / 2)^(1/3)."""
    gt = _gravity(species, ctx)
    return (species.m_i * ctx.hbar**2 * gt**2 / 2.0) ** (1.0 / 3.0)


def dimensionless_energy(E, species: MassPair, ctx: PhysicsContext):
    """epsilon = E / energy_scale; accepts arrays."""
    return E / energy_scale(species, ctx)


def turning_point(E, species: MassPair, ctx: PhysicsContext):
    """z_E = E / (m_i g~)."""
    return E / (species.m_i * _gravity(species, ctx))


def phase_space_alpha(species: MassPair, ctx: PhysicsContext) -> float:
    """(8 / (hbar^2 m_i g~^2))^(1/3), the inverse energy scale of W_E."""
    gt = _gravity(species, ctx)
    return (8.0 / (ctx.hbar**2 * species.m_i * gt**2)) ** (1.0 / 3.0)


def joule_to_ev(E):
    return E / EV
