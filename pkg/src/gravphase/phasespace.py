"""Phase-space states, the exact linear-potential evolution map and grid diagnostics.

Classical distributions f(z, v) and Wigner functions W(z, p) share one carrier,
:class:`WignerField`, evaluated in (z, p) with p = m v.  For a linear potential
both evolve by the same map: a shear (free flight) followed by a rigid
displacement that carries all of the gravitational acceleration.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ._parallel import evaluate_on_grid
from .errors import (
    DegenerateFieldError,
    DomainError,
    NormalizationError,
    TransformConsistencyError,
)
from .model import MassPair, PhysicsContext, specific_acceleration

DEFAULT_POINTS = 512
WINDOW_SIGMAS = 6.0
IMAG_RESIDUE_TOL = 1e-10
NORM_TOL = 1e-6
TRUNCATION_TOL = 1e-6


class FieldKind(enum.Enum):
    GAUSSIAN = "Gaussian"
    CAT = "Cat"
    EIGENSTATE = "Eigenstate"
    INCOHERENT_AIRY = "IncoherentAiry"
    BOLTZMANN = "Boltzmann"
    CUSTOM = "Custom"
    SAMPLED = "Sampled"


Window = tuple[tuple[float, float], tuple[float, float]]


@dataclass(frozen=True)
class PhaseSpacePoint:
    z: float
    p: float

    def __post_init__(self):
        if not (math.isfinite(self.z) and math.isfinite(self.p)):
            raise DomainError("phase-space point must be finite")

    def velocity(self, m: float) -> float:
        return self.p / m


@dataclass(frozen=True)
class WignerField:
    """Real phase-space density evaluated pointwise.

    ``func(z, p)`` must broadcast over numpy arrays.  ``window`` is the
    default sampling rectangle ``((z_min, z_max), (p_min, p_max))``.
    """

    func: Callable
    kind: FieldKind = FieldKind.CUSTOM
    provenance: tuple = ()
    window: Window | None = None
    normalizable: bool = True

    def evaluate(self, z, p):
        return self.func(np.asarray(z, dtype=float), np.asarray(p, dtype=float))

    __call__ = evaluate

    def at(self, point: PhaseSpacePoint) -> float:
        return float(self.evaluate(point.z, point.p))

    def derive(self, func, step: str, window: Window | None, **params) -> "WignerField":
        return WignerField(
            func=func,
            kind=self.kind,
            provenance=self.provenance + ({"op": step, **params},),
            window=window,
            normalizable=self.normalizable,
        )

    def axes(self, nz: int = DEFAULT_POINTS, np_: int = DEFAULT_POINTS):
        if self.window is None:
            raise DomainError("field has no default window; pass explicit axes")
        (z0, z1), (p0, p1) = self.window
        return np.linspace(z0, z1, nz), np.linspace(p0, p1, np_)

    def sample(self, z_axis=None, p_axis=None, n: int = DEFAULT_POINTS) -> "WignerGrid":
        if z_axis is None or p_axis is None:
            dz, dp = self.axes(n, n)
            z_axis = dz if z_axis is None else z_axis
            p_axis = dp if p_axis is None else p_axis
        z_axis = np.asarray(z_axis, dtype=float)
        p_axis = np.asarray(p_axis, dtype=float)
        values = evaluate_on_grid(self.func, z_axis, p_axis)
        return WignerGrid(z_axis, p_axis, values)


@dataclass
class WignerGrid:
    """Samples ``values[i, j] = W(z[i], p[j])`` on uniform axes."""

    z: np.ndarray
    p: np.ndarray
    values: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.z = np.asarray(self.z, dtype=float)
        self.p = np.asarray(self.p, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        for name, ax in (("z", self.z), ("p", self.p)):
            if ax.ndim != 1 or ax.size < 2:
                raise DomainError(f"{name} axis must be 1-D with at least two samples")
            d = np.diff(ax)
            if np.any(d <= 0):
                raise DomainError(f"{name} axis must be strictly increasing")
            if np.max(np.abs(d - d.mean())) > 1e-8 * abs(d.mean()):
                raise DomainError(f"{name} axis must be uniformly spaced")
        if self.values.shape != (self.z.size, self.p.size):
            raise DomainError(
                f"values shape {self.values.shape} does not match axes ({self.z.size}, {self.p.size})"
            )

    @property
    def dz(self) -> float:
        return float(self.z[1] - self.z[0])

    @property
    def dp(self) -> float:
        return float(self.p[1] - self.p[0])

    def integral(self) -> float:
        return float(np.trapezoid(np.trapezoid(self.values, self.p, axis=1), self.z))

    def moments(self) -> dict:
        """Normalized first and second moments of z and p."""
        norm = self.integral()
        if norm == 0:
            raise DegenerateFieldError("grid integrates to zero")
        pz = np.trapezoid(self.values, self.p, axis=1)
        pp = np.trapezoid(self.values, self.z, axis=0)
        mz = np.trapezoid(self.z * pz, self.z) / norm
        mp = np.trapezoid(self.p * pp, self.p) / norm
        vz = np.trapezoid((self.z - mz) ** 2 * pz, self.z) / norm
        vp = np.trapezoid((self.p - mp) ** 2 * pp, self.p) / norm
        return {"mean_z": mz, "mean_p": mp, "var_z": vz, "var_p": vp, "norm": norm}

    def to_csv(self, path, metadata: dict | None = None, include_meta: bool = True) -> None:
        from .io import atomic_write_text

        lines = []
        if include_meta:
            meta = {**self.metadata, **(metadata or {})}
            for key, value in meta.items():
                lines.append(f"# {key}: {value}")
        lines.append("z,p,w")
        Z = np.repeat(self.z, self.p.size)
        P = np.tile(self.p, self.z.size)
        W = self.values.ravel()
        lines.extend(f"{a:.12e},{b:.12e},{c:.12e}" for a, b, c in zip(Z, P, W))
        atomic_write_text(path, "\n".join(lines) + "\n")

    @classmethod
    def from_csv(cls, path) -> "WignerGrid":
        metadata = {}
        rows = []
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                if line.startswith("#"):
                    key, _, value = line[1:].partition(":")
                    metadata[key.strip()] = value.strip()
                    continue
                if line == "z,p,w":
                    continue
                rows.append([float(x) for x in line.split(",")])
        data = np.array(rows)
        z = np.unique(data[:, 0])
        p = np.unique(data[:, 1])
        values = data[:, 2].reshape(z.size, p.size)
        return cls(z, p, values, metadata)


# --- state constructors -------------------------------------------------------


def _gaussian_window(z0, p0, sz, sp) -> Window:
    return (
        (z0 - WINDOW_SIGMAS * sz, z0 + WINDOW_SIGMAS * sz),
        (p0 - WINDOW_SIGMAS * sp, p0 + WINDOW_SIGMAS * sp),
    )


def gaussian_state(z0: float, p0: float, sigma_z: float, ctx: PhysicsContext, m: float) -> WignerField:
    """Minimum-uncertainty Gaussian centred at (z0, p0), momentum spread hbar/(2 sigma_z)."""
    if not sigma_z > 0:
        raise DomainError(f"sigma_z must be positive, got {sigma_z}")
    hbar = ctx.hbar
    sigma_p = hbar / (2.0 * sigma_z)
    peak = 1.0 / (math.pi * hbar)

    def func(z, p):
        return peak * np.exp(-((z - z0) ** 2) / (2 * sigma_z**2) - (p - p0) ** 2 / (2 * sigma_p**2))

    return WignerField(
        func,
        FieldKind.GAUSSIAN,
        ({"op": "gaussian_state", "z0": z0, "p0": p0, "sigma_z": sigma_z, "m": m},),
        _gaussian_window(z0, p0, sigma_z, sigma_p),
    )


def cat_state(
    z0: float, p1: float, p2: float, sigma_z: float, ctx: PhysicsContext, m: float
) -> WignerField:
    """Equal-weight superposition of two Gaussians at (z0, p1) and (z0, p2).

    The interference term sits at the mean momentum and oscillates along z with
    wavelength 2 pi hbar / |p1 - p2|.
    """
    if not sigma_z > 0:
        raise DomainError(f"sigma_z must be positive, got {sigma_z}")
    if p1 == p2:
        raise DomainError("degenerate cat: p1 == p2")
    hbar = ctx.hbar
    sp = hbar / (2.0 * sigma_z)
    dp = p1 - p2
    pbar = 0.5 * (p1 + p2)
    overlap = math.exp(-(dp**2) * sigma_z**2 / (2 * hbar**2))
    weight = 1.0 / (2.0 * (1.0 + overlap)) / (math.pi * hbar)

    def func(z, p):
        gz = np.exp(-((z - z0) ** 2) / (2 * sigma_z**2))
        lobes = np.exp(-((p - p1) ** 2) / (2 * sp**2)) + np.exp(-((p - p2) ** 2) / (2 * sp**2))
        ridge = 2.0 * np.exp(-((p - pbar) ** 2) / (2 * sp**2)) * np.cos(dp * (z - z0) / hbar)
        return weight * gz * (lobes + ridge)

    lo, hi = min(p1, p2), max(p1, p2)
    window = (
        (z0 - WINDOW_SIGMAS * sigma_z, z0 + WINDOW_SIGMAS * sigma_z),
        (lo - WINDOW_SIGMAS * sp, hi + WINDOW_SIGMAS * sp),
    )
    return WignerField(
        func,
        FieldKind.CAT,
        ({"op": "cat_state", "z0": z0, "p1": p1, "p2": p2, "sigma_z": sigma_z, "m": m},),
        window,
    )


def cat_fringe_wavelength(p1: float, p2: float, ctx: PhysicsContext) -> float:
    return 2.0 * math.pi * ctx.hbar / abs(p1 - p2)


def boltzmann_state(
    T: float,
    trap: Callable,
    ctx: PhysicsContext,
    m: float,
    z_window: tuple[float, float],
    n: int = 4097,
) -> WignerField:
    """Classical stationary distribution exp[-p^2/(2 m kT) - U(z)/kT] in (z, p).

    The momentum factor is normalized in closed form; the position factor by
    trapezoidal quadrature of the trap over ``z_window``.
    """
    if not T > 0:
        raise DomainError(f"temperature must be positive, got {T}")
    if not m > 0:
        raise DomainError("mass must be positive")
    kT = ctx.k_boltzmann * T
    zs = np.linspace(z_window[0], z_window[1], n)
    u = np.asarray(trap(zs), dtype=float)
    if not np.all(np.isfinite(u)):
        raise NormalizationError("trap potential is not finite on the window")
    u_min = float(u.min())
    weights = np.exp(-(u - u_min) / kT)
    if max(weights[0], weights[-1]) > TRUNCATION_TOL:
        raise NormalizationError(
            "Boltzmann factor does not decay inside the z window; trap is not confining there"
        )
    z_norm = float(np.trapezoid(weights, zs))
    if not (z_norm > 0 and math.isfinite(z_norm)):
        raise NormalizationError("Boltzmann distribution is not normalizable on the window")
    var_p = m * kT
    p_norm = math.sqrt(2.0 * math.pi * var_p)
    const = 1.0 / (z_norm * p_norm)

    def func(z, p):
        return const * np.exp(-(np.asarray(trap(z), dtype=float) - u_min) / kT - p**2 / (2 * var_p))

    sp = math.sqrt(var_p)
    window = ((z_window[0], z_window[1]), (-WINDOW_SIGMAS * sp, WINDOW_SIGMAS * sp))
    return WignerField(
        func,
        FieldKind.BOLTZMANN,
        ({"op": "boltzmann_state", "T": T, "m": m, "z_window": tuple(z_window)},),
        window,
    )


# --- phase-space maps -----------------------------------------------------------


def displace(field: WignerField, Z: float, P: float) -> WignerField:
    """Rigid translation: W'(z, p) = W(z - Z, p - P)."""
    f = field.func

    def func(z, p):
        return f(z - Z, p - P)

    window = None
    if field.window is not None:
        (z0, z1), (p0, p1) = field.window
        window = ((z0 + Z, z1 + Z), (p0 + P, p1 + P))
    return field.derive(func, "displace", window, Z=Z, P=P)


def shear(field: WignerField, t: float, m: float) -> WignerField:
    """Free-flight shear: W'(z, p) = W(z - (p/m) t, p)."""
    if not m > 0:
        raise DomainError("mass must be positive")
    f = field.func

    def func(z, p):
        return f(z - p * (t / m), p)

    window = None
    if field.window is not None:
        (z0, z1), (p0, p1) = field.window
        shifts = (p0 * t / m, p1 * t / m)
        window = ((z0 + min(shifts), z1 + max(shifts)), (p0, p1))
    return field.derive(func, "shear", window, t=t, m=m)


def linear_shift(t: float, species: MassPair, ctx: PhysicsContext) -> tuple[float, float]:
    """Displacement (-g~ t^2 / 2, -m_i g~ t) accumulated in time t."""
    gt = specific_acceleration(species, ctx)
    return -0.5 * gt * t * t, -species.m_i * gt * t


def evolve_linear(field: WignerField, t: float, species: MassPair, ctx: PhysicsContext) -> WignerField:
    """Exact evolution in the potential m_g g z: displace(shear(W, t), Z_l, P_l).

    Also the solution of the classical Liouville equation when the field is a
    classical distribution expressed in (z, p = m_i v).
    """
    Z, P = linear_shift(t, species, ctx)
    return displace(shear(field, t, species.m_i), Z, P)


def evolve_free(field: WignerField, t: float, m: float) -> WignerField:
    return shear(field, t, m)


@dataclass(frozen=True)
class FrameCheck:
    max_residual: float
    scale: float
    t: float

    @property
    def relative_residual(self) -> float:
        return self.max_residual / self.scale if self.scale else self.max_residual


def accelerated_frame_check(
    field: WignerField,
    t: float,
    species: MassPair,
    ctx: PhysicsContext,
    z_axis=None,
    p_axis=None,
    n: int = 201,
) -> FrameCheck:
    """Compare free evolution of ``field`` with its displacement by (g~t^2/2, m g~ t).

    The two agree exactly for functions of the linear-potential Hamiltonian,
    which are the non-spreading states.
    """
    gt = specific_acceleration(species, ctx)
    m = species.m_i
    free = evolve_free(field, t, m)
    moved = displace(field, 0.5 * gt * t * t, m * gt * t)
    if z_axis is None or p_axis is None:
        z_axis, p_axis = field.axes(n, n)
    a = free.sample(z_axis, p_axis).values
    b = moved.sample(z_axis, p_axis).values
    return FrameCheck(float(np.max(np.abs(a - b))), float(np.max(np.abs(b))), t)


# --- transforms and diagnostics -----------------------------------------------


def _upsample2(psi: np.ndarray) -> np.ndarray:
    """Band-limited interpolation onto the grid with half the spacing."""
    n = psi.size
    spec = np.fft.fftshift(np.fft.fft(psi))
    padded = np.zeros(2 * n, dtype=complex)
    padded[n // 2 : n // 2 + n] = spec
    out = np.fft.ifft(np.fft.ifftshift(padded)) * 2.0
    # samples on the original points (even indices) are reproduced exactly up to rounding
    return out


def wigner_from_wavefunction(
    psi, z, ctx: PhysicsContext, p_center: float = 0.0
) -> WignerGrid:
    """Wigner transform of a pure state sampled on a uniform z grid.

    W(z, p) = 1/(2 pi hbar) Int dxi exp(-i p xi / hbar) psi(z + xi/2) psi*(z - xi/2).
    The wavefunction is interpolated onto a half-spacing grid so that xi steps by
    dz; the momentum axis has N points spaced 2 pi hbar / (N dz), centred on
    ``p_center``.
    """
    psi = np.asarray(psi, dtype=complex)
    z = np.asarray(z, dtype=float)
    n = z.size
    if psi.shape != z.shape:
        raise DomainError("psi and z must have the same shape")
    dz = float(z[1] - z[0])
    norm = float(np.sum(np.abs(psi) ** 2) * dz)
    if abs(norm - 1.0) > NORM_TOL:
        raise NormalizationError(f"wavefunction norm {norm:.9g} differs from 1 by more than {NORM_TOL}")
    hbar = ctx.hbar
    fine = _upsample2(psi)  # fine[2 i] ~ psi[i], spacing dz / 2
    fine[::2] = psi
    m = np.arange(-(n // 2), n - n // 2)  # xi = m dz
    rows = 2 * np.arange(n)[:, None]
    ip = rows + m[None, :]
    im = rows - m[None, :]
    valid = (ip >= 0) & (ip < 2 * n) & (im >= 0) & (im < 2 * n)
    ipc = np.clip(ip, 0, 2 * n - 1)
    imc = np.clip(im, 0, 2 * n - 1)
    corr = np.where(valid, fine[ipc] * np.conj(fine[imc]), 0.0)
    xi = m * dz
    corr = corr * np.exp(-1j * p_center * xi / hbar)[None, :]
    # the unpaired xi = -N/2 dz sample breaks Hermitian symmetry; it lies at the window edge
    if n % 2 == 0:
        corr[:, 0] = corr[:, 0].real
    spectrum = np.fft.fftshift(np.fft.fft(np.fft.ifftshift(corr, axes=1), axis=1), axes=1)
    W = spectrum * dz / (2.0 * math.pi * hbar)
    dp = 2.0 * math.pi * hbar / (n * dz)
    p = p_center + np.arange(-(n // 2), n - n // 2) * dp
    scale = float(np.max(np.abs(W.real))) or 1.0
    residue = float(np.max(np.abs(W.imag))) / scale
    if residue > IMAG_RESIDUE_TOL:
        raise TransformConsistencyError(f"imaginary residue {residue:.3g} exceeds {IMAG_RESIDUE_TOL}")
    return WignerGrid(z, p, W.real, {"hbar": hbar, "source": "wigner_from_wavefunction"})


@dataclass(frozen=True)
class Marginal:
    axis: np.ndarray
    density: np.ndarray
    truncated: bool

    def integral(self) -> float:
        return float(np.trapezoid(self.density, self.axis))

    def mean(self) -> float:
        return float(np.trapezoid(self.axis * self.density, self.axis) / self.integral())

    def variance(self) -> float:
        mu = self.mean()
        return float(np.trapezoid((self.axis - mu) ** 2 * self.density, self.axis) / self.integral())


def marginal(grid: WignerGrid, axis: str) -> Marginal:
    """Probability density of ``axis`` ('position' or 'momentum') by trapezoidal quadrature."""
    values = grid.values
    scale = float(np.max(np.abs(values))) or 1.0
    if axis == "position":
        edge = max(np.max(np.abs(values[:, 0])), np.max(np.abs(values[:, -1])))
        density = np.trapezoid(values, grid.p, axis=1)
        coords = grid.z
    elif axis == "momentum":
        edge = max(np.max(np.abs(values[0, :])), np.max(np.abs(values[-1, :])))
        density = np.trapezoid(values, grid.z, axis=0)
        coords = grid.p
    else:
        raise DomainError(f"axis must be 'position' or 'momentum', got {axis!r}")
    truncated = edge / scale > TRUNCATION_TOL
    if truncated:
        warnings.warn("grid truncates the field along the integrated axis", RuntimeWarning, stacklevel=2)
    return Marginal(coords, density, bool(truncated))


@dataclass(frozen=True)
class AreaReport:
    area: float
    minimum: float
    at_minimum: bool

    @property
    def ratio(self) -> float:
        return self.area / self.minimum


def effective_area(grid: WignerGrid, ctx: PhysicsContext, tol: float = 1e-4) -> AreaReport:
    """Effective phase-space area [Int W^2 dz dp]^(-1), bounded below by 2 pi hbar."""
    sq = float(np.trapezoid(np.trapezoid(grid.values**2, grid.p, axis=1), grid.z))
    if sq == 0.0:
        raise DegenerateFieldError("field vanishes on the grid")
    area = 1.0 / sq
    minimum = 2.0 * math.pi * ctx.hbar
    return AreaReport(area, minimum, abs(area / minimum - 1.0) <= tol)
