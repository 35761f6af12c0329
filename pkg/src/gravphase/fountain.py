"""Atomic-fountain interferometer: phase, fringe probability, phase-space crescent.

``two_path_oracle`` is an independent check of the phase: it propagates a
Gaussian wavepacket through both pulse orderings with exact thawed-Gaussian
dynamics (exact for quadratic Hamiltonians) and reads the relative phase off
the overlap of the two output states.
"""
from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, replace

import numpy as np

from .eigen import jwkb_phase
from .errors import DomainError
from .model import MassPair, PhysicsContext, specific_acceleration

RECOIL_RATIO_WARN = 0.05


class RecoilRatioWarning(UserWarning):
    """Photon recoil is not small compared with the launch momentum."""


@dataclass(frozen=True)
class FountainConfig:
    """Pulse interval ``tau`` and laser wave number ``k_laser``.

    ``E`` is the launch energy used for the crescent construction; by default
    it is the energy whose transit time from z = 0 to the apex equals ``tau``.
    """

    k_laser: float
    tau: float
    species: MassPair
    ctx: PhysicsContext
    E: float | None = None

    def __post_init__(self):
        if not self.k_laser > 0:
            raise DomainError("k_laser must be positive")
        if self.tau < 0:
            raise DomainError("tau must be non-negative")
        if self.E is not None and not self.E > 0:
            raise DomainError("launch energy must be positive")

    @property
    def gtilde(self) -> float:
        return specific_acceleration(self.species, self.ctx)

    @property
    def launch_energy(self) -> float:
        if self.E is not None:
            return self.E
        m = self.species.m_i
        return 0.5 * m * (self.gtilde * self.tau) ** 2


@dataclass(frozen=True)
class CrescentResult:
    crescent_phase: float
    delta_E: float
    momentum_ratio: float


@dataclass(frozen=True)
class FountainResult:
    delta_phi: float
    p_ground: float
    crescent_phase: float
    delta_E: float


def fountain_phase(cfg: FountainConfig) -> float:
    """Delta phi = k g~ tau^2."""
    return cfg.k_laser * cfg.gtilde * cfg.tau**2


def ground_probability_from_phase(delta_phi):
    return 0.5 * (1.0 + np.cos(delta_phi))


def ground_probability(cfg: FountainConfig) -> float:
    """P_g = (1 + cos Delta phi) / 2."""
    return float(ground_probability_from_phase(fountain_phase(cfg)))


def crescent_area(cfg: FountainConfig) -> CrescentResult:
    """Area between the parabolas of E and E + Delta E, in units of hbar.

    Delta E = p_E hbar k / m to first order in the recoil; the area is
    2 [phi(0; E + Delta E) - phi(0; E)] with the closed-form JWKB phase.
    """
    E = cfg.launch_energy
    if not E > 0:
        raise DomainError("launch energy must be positive")
    m = cfg.species.m_i
    p_E = math.sqrt(2.0 * m * E)
    dp = cfg.ctx.hbar * cfg.k_laser
    ratio = dp / p_E
    if ratio > RECOIL_RATIO_WARN:
        warnings.warn(
            f"recoil ratio hbar k / p_E = {ratio:.3g} exceeds {RECOIL_RATIO_WARN}",
            RecoilRatioWarning,
            stacklevel=2,
        )
    dE = p_E * dp / m
    phase = 2.0 * (
        jwkb_phase(0.0, E + dE, cfg.species, cfg.ctx) - jwkb_phase(0.0, E, cfg.species, cfg.ctx)
    )
    return CrescentResult(phase, dE, ratio)


def run(cfg: FountainConfig) -> FountainResult:
    cres = crescent_area(cfg)
    return FountainResult(
        delta_phi=fountain_phase(cfg),
        p_ground=ground_probability(cfg),
        crescent_phase=cres.crescent_phase,
        delta_E=cres.delta_E,
    )


# --- thawed-Gaussian two-path oracle --------------------------------------------


@dataclass(frozen=True)
class GaussianPacket:
    """psi(z) = exp{(i/hbar)[alpha (z-q)^2 + p (z-q) + gamma]}."""

    q: float
    p: float
    alpha: complex
    gamma: complex

    @classmethod
    def minimum_uncertainty(cls, q: float, p: float, sigma_z: float, hbar: float) -> "GaussianPacket":
        alpha = 1j * hbar / (4.0 * sigma_z**2)
        gamma = 0.25j * hbar * math.log(2.0 * math.pi * sigma_z**2)
        return cls(q, p, alpha, gamma)

    def evolve(self, t: float, m: float, gt: float, hbar: float) -> "GaussianPacket":
        """Exact propagation under p^2/(2m) + m g~ z for time t."""
        q0, p0 = self.q, self.p
        q = q0 + p0 * t / m - 0.5 * gt * t * t
        p = p0 - m * gt * t
        denom = 1.0 + 2.0 * self.alpha * t / m
        alpha = self.alpha / denom
        # classical action Int (p^2/2m - m g~ q) dt along the centre
        kinetic = (p0 * p0 * t - p0 * m * gt * t * t + m * m * gt * gt * t**3 / 3.0) / (2.0 * m)
        potential = m * gt * (q0 * t + p0 * t * t / (2.0 * m) - gt * t**3 / 6.0)
        gamma = self.gamma + kinetic - potential + 0.5j * hbar * cmath.log(denom)
        return GaussianPacket(q, p, alpha, gamma)

    def kick(self, k: float, hbar: float) -> "GaussianPacket":
        """Multiply by exp(i k z)."""
        return GaussianPacket(self.q, self.p + hbar * k, self.alpha, self.gamma + hbar * k * self.q)

    def __call__(self, z, hbar: float):
        z = np.asarray(z, dtype=float)
        d = z - self.q
        return np.exp(1j / hbar * (self.alpha * d * d + self.p * d + self.gamma))


def log_overlap(bra: GaussianPacket, ket: GaussianPacket, hbar: float) -> complex:
    """log <bra|ket> with the imaginary part left unwrapped."""
    ab = bra.alpha.conjugate()
    gb = bra.gamma.conjugate()
    a = 1j / hbar * (ket.alpha - ab)
    b = 1j / hbar * (-2.0 * ket.alpha * ket.q + ket.p + 2.0 * ab * bra.q - bra.p)
    c = 1j / hbar * (
        ket.alpha * ket.q**2 - ket.p * ket.q + ket.gamma - ab * bra.q**2 + bra.p * bra.q - gb
    )
    return c - b * b / (4.0 * a) + 0.5 * cmath.log(math.pi / (-a))


def two_path_states(cfg: FountainConfig, sigma_z: float, z0: float = 0.0, p0: float = 0.0):
    """Output packets of the two orderings.

    Path A: evolve, kick, evolve, unkick.  Path B: kick, evolve, unkick, evolve.
    """
    if not sigma_z > 0:
        raise DomainError("sigma_z must be positive")
    hbar = cfg.ctx.hbar
    m = cfg.species.m_i
    gt = cfg.gtilde
    k, tau = cfg.k_laser, cfg.tau
    start = GaussianPacket.minimum_uncertainty(z0, p0, sigma_z, hbar)
    path_a = start.evolve(tau, m, gt, hbar).kick(k, hbar).evolve(tau, m, gt, hbar).kick(-k, hbar)
    path_b = start.kick(k, hbar).evolve(tau, m, gt, hbar).kick(-k, hbar).evolve(tau, m, gt, hbar)
    return path_a, path_b


def two_path_oracle(cfg: FountainConfig, sigma_z: float, z0: float = 0.0, p0: float = 0.0) -> float:
    """Relative phase arg <B|A> between the two pulse orderings."""
    a, b = two_path_states(cfg, sigma_z, z0, p0)
    return log_overlap(b, a, cfg.ctx.hbar).imag


def two_path_overlap_magnitude(cfg: FountainConfig, sigma_z: float, z0: float = 0.0, p0: float = 0.0) -> float:
    a, b = two_path_states(cfg, sigma_z, z0, p0)
    hbar = cfg.ctx.hbar
    num = log_overlap(b, a, hbar).real
    na = log_overlap(a, a, hbar).real
    nb = log_overlap(b, b, hbar).real
    return math.exp(num - 0.5 * (na + nb))


def with_tau(cfg: FountainConfig, tau: float) -> FountainConfig:
    return replace(cfg, tau=tau, E=None if cfg.E is None else cfg.E)
