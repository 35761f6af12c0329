"""Energy eigenstates of the linear potential, the bouncer spectrum and JWKB semiclassics."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ForbiddenRegionError, SaturationError
from .model import (
    MassPair,
    PhysicsContext,
    dimensionless_energy,
    energy_scale,
    phase_space_alpha,
    specific_acceleration,
    turning_point,
    wave_vector,
)
from .phasespace import FieldKind, WignerField
from .specfun import airy, airy_scaled, airy_zero

JWKB_VALIDITY = 3.0
EXP_LIMIT = 700.0
# the fused exponent is a difference of two terms; rounding in it is the relative error of the result
CANCELLATION_LIMIT = 1e-9


class JWKBValidityWarning(UserWarning):
    """JWKB evaluated closer to the turning point than its accuracy threshold."""


@dataclass(frozen=True)
class Eigenstate:
    """Unbounded-potential eigenstate of energy E; ``N`` is a caller-chosen amplitude."""

    E: float
    epsilon: float
    k: float
    z_E: float
    species: MassPair
    ctx: PhysicsContext
    N: float = 1.0

    @classmethod
    def from_energy(cls, E: float, species: MassPair, ctx: PhysicsContext, N: float = 1.0) -> "Eigenstate":
        return cls(
            E=E,
            epsilon=dimensionless_energy(E, species, ctx),
            k=wave_vector(species, ctx),
            z_E=turning_point(E, species, ctx),
            species=species,
            ctx=ctx,
            N=N,
        )

    @property
    def alpha(self) -> float:
        return phase_space_alpha(self.species, self.ctx)

    @property
    def gtilde(self) -> float:
        return specific_acceleration(self.species, self.ctx)

    def hamiltonian(self, z, p):
        m = self.species.m_i
        return p * p / (2.0 * m) + m * self.gtilde * z

    def wigner_field(self) -> WignerField:
        def func(z, p):
            return eigen_wigner(z, p, self)

        m = self.species.m_i
        # z window: a few oscillations into the allowed region and the decay tail
        z0 = self.z_E - 8.0 / self.k
        z1 = self.z_E + 3.0 / self.k
        p_max = math.sqrt(2.0 * m * max(self.E - m * self.gtilde * z0, 0.0)) * 1.2
        return WignerField(
            func,
            FieldKind.EIGENSTATE,
            ({"op": "eigenstate", "E": self.E, "N": self.N},),
            ((z0, z1), (-p_max, p_max)),
            normalizable=False,
        )


def classical_momentum(z, E: float, species: MassPair, ctx: PhysicsContext):
    """sqrt(2 m_i (E - m_i g~ z)); raises in the forbidden region z > z_E."""
    m = species.m_i
    gt = specific_acceleration(species, ctx)
    kin = E - m * gt * np.asarray(z, dtype=float)
    z_E = turning_point(E, species, ctx)
    if np.any(kin < 0):
        raise ForbiddenRegionError(f"z beyond the turning point z_E = {z_E:.6g}", z_E)
    out = np.sqrt(2.0 * m * kin)
    return float(out) if out.ndim == 0 else out


def eigenfunction_u(z, state: Eigenstate):
    """N Ai(k z - epsilon)."""
    a, _ = airy(state.k * np.asarray(z, dtype=float) - state.epsilon)
    return state.N * a


def eigen_wigner(z, p, state: Eigenstate):
    """N Ai[alpha (H_l(z, p) - E)]."""
    arg = state.alpha * (state.hamiltonian(np.asarray(z, dtype=float), np.asarray(p, dtype=float)) - state.E)
    a, _ = airy(arg)
    return state.N * a


def apodized_eigenfunction(state: Eigenstate, z, ramp_fraction: float = 0.2, ramp_width: float = 3.0):
    """Unit-normalized sample of u_E on a finite grid for the Wigner transform.

    u_E does not decay towards negative z, so it is multiplied by the ramp
    (1 + tanh((z - z_r) k / w)) / 2 with z_r a fraction ``ramp_fraction`` of
    the way into the grid from its left edge and w = ``ramp_width``.  Only the
    region well to the right of z_r reproduces the unwindowed Wigner function.
    """
    z = np.asarray(z, dtype=float)
    z_r = z[0] + ramp_fraction * (z[-1] - z[0])
    window = 0.5 * (1.0 + np.tanh((z - z_r) * state.k / ramp_width))
    psi = eigenfunction_u(z, state) * window
    dz = float(z[1] - z[0])
    return psi / math.sqrt(float(np.sum(psi * psi) * dz))


@dataclass(frozen=True)
class MarginalIdentityReport:
    z: np.ndarray
    integrated: np.ndarray
    closed_form: np.ndarray
    max_relative_deviation: float
    turning_point_integral: float


def _airy_quadratic_integral(y: np.ndarray, points: int) -> np.ndarray:
    """Int Ai(xi^2 + y) dxi by the trapezoidal rule on a range where the tail is < 1e-40."""
    y = np.atleast_1d(np.asarray(y, dtype=float))
    L = np.sqrt(np.maximum(40.0 - y, 1.0))
    t = np.linspace(-1.0, 1.0, points)
    xi = L[:, None] * t[None, :]
    vals, _ = airy(xi * xi + y[:, None])
    return np.trapezoid(vals, t, axis=1) * L


def marginal_identity_check(state: Eigenstate, z=None, p_points: int = 4001) -> MarginalIdentityReport:
    """Integrate the eigenstate Wigner function over p and compare with the Airy-square law.

    Int dp N Ai[alpha(H - E)] = N sqrt(2m/alpha) 2^(2/3) pi Ai^2(k z - eps).
    Both sides are reported divided by N sqrt(2m/alpha), i.e. as the
    dimensionless Int dxi Ai(xi^2 + y) with y = 2^(2/3)(k z - eps).
    Deviation is measured relative to the peak of the closed form on the window.
    """
    m = state.species.m_i
    alpha = state.alpha
    if z is None:
        z = np.linspace(state.z_E - 5.0 / state.k, state.z_E + 2.0 / state.k, 141)
    z = np.asarray(z, dtype=float)
    scale = state.N * math.sqrt(2.0 * m / alpha)
    y = alpha * (m * state.gtilde * z - state.E)
    # p range where alpha(H - E) reaches 40
    p_max = np.sqrt(np.maximum(40.0 - y, 1.0) * 2.0 * m / alpha)
    t = np.linspace(-1.0, 1.0, p_points)
    p = p_max[:, None] * t[None, :]
    vals = eigen_wigner(z[:, None], p, state)
    integrated = np.trapezoid(vals, t, axis=1) * p_max / scale
    c = 2.0 ** (2.0 / 3.0)
    a, _ = airy(state.k * z - state.epsilon)
    closed = c * math.pi * a * a
    dev = float(np.max(np.abs(integrated - closed)) / np.max(np.abs(closed)))
    tp = float(_airy_quadratic_integral(np.array([0.0]), p_points)[0])
    return MarginalIdentityReport(z, integrated, closed, dev, tp)


@dataclass(frozen=True)
class BouncerLevel:
    n: int
    E_n: float
    a: float


def bouncer_spectrum(levels: int, species: MassPair, ctx: PhysicsContext) -> list[BouncerLevel]:
    """Levels E_n = energy_scale a_(n+1) above a hard wall at z = 0."""
    if levels < 1:
        raise DomainError("levels must be >= 1")
    scale = energy_scale(species, ctx)
    out = []
    for n in range(levels):
        a = airy_zero(n + 1)
        out.append(BouncerLevel(n, scale * a, a))
    return out


def bouncer_wavefunction(n: int, z, species: MassPair, ctx: PhysicsContext):
    """Unit-normalized bouncer level n: sqrt(k) Ai(k z - a_(n+1)) / |Ai'(-a_(n+1))|."""
    if n < 0:
        raise DomainError("n must be >= 0")
    z = np.asarray(z, dtype=float)
    if np.any(z < 0):
        raise DomainError("bouncer wavefunction is defined for z >= 0 only")
    k = wave_vector(species, ctx)
    a = airy_zero(n + 1)
    _, slope = airy(-a)
    vals, _ = airy(k * z - a)
    out = math.sqrt(k) * vals / abs(slope)
    return float(out) if np.ndim(out) == 0 else out


def _depth(z, E, species, ctx, *, strict: bool):
    """eps - k z, the dimensionless distance below the turning point."""
    k = wave_vector(species, ctx)
    eps = dimensionless_energy(E, species, ctx)
    d = eps - k * np.asarray(z, dtype=float)
    # z = z_E computed from E may land a rounding error beyond the turning point
    slack = 64 * np.finfo(float).eps * max(1.0, abs(eps))
    bad = d <= slack if strict else d < -slack
    if np.any(bad):
        raise ForbiddenRegionError("evaluation at or beyond the turning point", turning_point(E, species, ctx))
    return np.maximum(d, 0.0)


def jwkb_phase(z, E: float, species: MassPair, ctx: PhysicsContext):
    """phi = (1/hbar) Int_z^{z_E} p_cl dz - pi/4 = (2/3)(eps - k z)^(3/2) - pi/4."""
    d = _depth(z, E, species, ctx, strict=False)
    out = (2.0 / 3.0) * d * np.sqrt(d) - math.pi / 4.0
    return float(out) if np.ndim(out) == 0 else out


def jwkb_wavefunction(z, E: float, species: MassPair, ctx: PhysicsContext, N: float = 1.0):
    """Sum of counter-running waves 2 A_E cos(phi), A_E = N / (2 sqrt(pi) (eps - k z)^(1/4))."""
    d = _depth(z, E, species, ctx, strict=True)
    if np.any(d < JWKB_VALIDITY * (1.0 - 1e-12)):
        warnings.warn(
            f"JWKB evaluated with eps - k z < {JWKB_VALIDITY}; accuracy contract does not hold",
            JWKBValidityWarning,
            stacklevel=2,
        )
    phi = (2.0 / 3.0) * d * np.sqrt(d) - math.pi / 4.0
    amp = N / (2.0 * math.sqrt(math.pi) * d**0.25)
    out = 2.0 * amp * np.cos(phi)
    return float(out) if np.ndim(out) == 0 else out


def jwkb_envelope(z, E: float, species: MassPair, ctx: PhysicsContext, N: float = 1.0):
    """Local amplitude 2 A_E of the JWKB standing wave."""
    d = _depth(z, E, species, ctx, strict=True)
    return N / (math.sqrt(math.pi) * d**0.25)


def classical_velocity(z, E: float, species: MassPair, ctx: PhysicsContext):
    """sqrt(2 g~ (z_E - z)); depends on the masses only through their ratio."""
    gt = specific_acceleration(species, ctx)
    zE = turning_point(E, species, ctx)
    dz = zE - np.asarray(z, dtype=float)
    if np.any(dz < 0):
        raise ForbiddenRegionError("z beyond the turning point", zE)
    out = np.sqrt(2.0 * gt * dz)
    return float(out) if out.ndim == 0 else out


def action(E: float, species: MassPair, ctx: PhysicsContext) -> float:
    """Closed-orbit action (4/3) sqrt(2 / (m g~^2)) E^(3/2) of the bouncer."""
    gt = specific_acceleration(species, ctx)
    return (4.0 / 3.0) * math.sqrt(2.0 / (species.m_i * gt * gt)) * E**1.5


def jwkb_energy(n: int, species: MassPair, ctx: PhysicsContext) -> float:
    """Energy quantized by J(E) = 2 pi hbar (n + 3/4)."""
    if n < 0:
        raise DomainError("n must be >= 0")
    return energy_scale(species, ctx) * (1.5 * math.pi * (n + 0.75)) ** (2.0 / 3.0)


def transit_time(z, E: float, species: MassPair, ctx: PhysicsContext):
    """Classical time from z up to the turning point, sqrt(2 (z_E - z) / g~)."""
    gt = specific_acceleration(species, ctx)
    zE = turning_point(E, species, ctx)
    dz = zE - np.asarray(z, dtype=float)
    if np.any(dz <= 0):
        raise ForbiddenRegionError("transit time requires z below the turning point", zE)
    out = np.sqrt(2.0 * dz / gt)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class IncoherentSpec:
    """Gaussian energy distribution of mean E0 and spread sigma."""

    E0: float
    sigma: float
    alpha: float

    def __post_init__(self):
        if self.sigma < 0:
            raise DomainError("sigma must be >= 0")
        if not self.alpha > 0:
            raise DomainError("alpha must be positive")

    @classmethod
    def build(cls, E0: float, sigma: float, species: MassPair, ctx: PhysicsContext) -> "IncoherentSpec":
        return cls(E0, sigma, phase_space_alpha(species, ctx))

    def weight(self, E):
        """Normalized Gaussian g(E)."""
        return np.exp(-0.5 * ((E - self.E0) / self.sigma) ** 2) / math.sqrt(2 * math.pi * self.sigma**2)


def incoherent_wigner(z, p, spec: IncoherentSpec, species: MassPair, ctx: PhysicsContext, N: float = 1.0):
    """Closed form of Int dE g(E) W_E for a Gaussian g:

    N exp[(a s)^2/2 (a(H - E0) + (a s)^4/6)] Ai[a(H - E0) + (a s)^4/4].
    For large positive Airy argument the exponential decay of Ai is folded into
    the exponent so the product stays finite.
    """
    z = np.asarray(z, dtype=float)
    p = np.asarray(p, dtype=float)
    m = species.m_i
    gt = specific_acceleration(species, ctx)
    H = p * p / (2.0 * m) + m * gt * z
    a = spec.alpha
    gam = a * spec.sigma
    xi0 = a * (H - spec.E0)
    arg = xi0 + gam**4 / 4.0
    expo = 0.5 * gam**2 * (xi0 + gam**4 / 6.0)
    pos = arg > 0
    decay = np.where(pos, (2.0 / 3.0) * np.maximum(arg, 0.0) ** 1.5, 0.0)
    total = expo - decay
    if np.any(total > EXP_LIMIT):
        worst = float(np.max(total))
        raise SaturationError(f"incoherent Wigner exponent {worst:.4g} exceeds {EXP_LIMIT}")
    if pos.any():
        terms = float(np.max(np.where(pos, np.maximum(np.abs(expo), decay), 0.0)))
        if terms * np.finfo(float).eps > CANCELLATION_LIMIT:
            raise SaturationError(
                f"incoherent Wigner exponent terms of size {terms:.4g} cancel beyond double precision "
                f"(alpha sigma = {gam:.4g}, alpha(H - E0) up to {float(np.max(xi0)):.4g})"
            )
    ai = np.empty(np.broadcast(arg).shape)
    arg_b = np.broadcast_to(arg, ai.shape)
    pos_b = np.broadcast_to(pos, ai.shape)
    if pos_b.any():
        ai[pos_b] = airy_scaled(arg_b[pos_b])
    if (~pos_b).any():
        ai[~pos_b] = airy(arg_b[~pos_b])[0]
    out = N * np.exp(np.minimum(total, EXP_LIMIT)) * ai
    return float(out) if out.ndim == 0 else out


def incoherent_field(spec: IncoherentSpec, species: MassPair, ctx: PhysicsContext, N: float = 1.0) -> WignerField:
    state = Eigenstate.from_energy(spec.E0, species, ctx)
    base = state.wigner_field()

    def func(z, p):
        return incoherent_wigner(z, p, spec, species, ctx, N)

    return WignerField(
        func,
        FieldKind.INCOHERENT_AIRY,
        ({"op": "incoherent", "E0": spec.E0, "sigma": spec.sigma, "N": N},),
        base.window,
        normalizable=False,
    )
