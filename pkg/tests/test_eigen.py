import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, special

from gravphase import eigen, model
from gravphase import phasespace as ps
from gravphase.eigen import Eigenstate, IncoherentSpec
from gravphase.errors import DomainError, ForbiddenRegionError, SaturationError
from gravphase.model import MassPair, PhysicsContext

from oracles import bisect, d1_5pt, d2_5pt

AI0 = 0.355028053887817239


@pytest.fixture
def state(nat, unit):
    return Eigenstate.from_energy(1.3, unit, nat)


def test_eigenstate_invariants(si, rb87):
    E = 2.0e-31
    s = Eigenstate.from_energy(E, rb87, si)
    assert s.epsilon == pytest.approx(s.k * s.z_E, rel=1e-12)
    assert rb87.m_i * s.gtilde * s.z_E == pytest.approx(E, rel=1e-15)
    assert s.alpha == pytest.approx(2 ** (2 / 3) * s.k / (rb87.m_i * s.gtilde), rel=1e-13)


# --- classical momentum -----------------------------------------------------------


def test_classical_momentum(nat, unit):
    E = 2.0
    assert eigen.classical_momentum(2.0, E, unit, nat) == 0.0
    p0 = eigen.classical_momentum(0.0, E, unit, nat)
    assert p0 == pytest.approx(math.sqrt(2 * E))
    assert p0 == pytest.approx(eigen.transit_time(0.0, E, unit, nat), rel=1e-12)
    assert eigen.classical_momentum(0.0, 4 * E, unit, nat) == pytest.approx(2 * p0, rel=1e-15)
    with pytest.raises(ForbiddenRegionError) as info:
        eigen.classical_momentum(2.5, E, unit, nat)
    assert info.value.turning_point == pytest.approx(2.0)


# --- eigenfunction ----------------------------------------------------------------


def test_eigenfunction_at_turning_point(state):
    assert eigen.eigenfunction_u(state.z_E, state) == pytest.approx(AI0, rel=1e-14)
    s3 = Eigenstate.from_energy(state.E, state.species, state.ctx, N=3.0)
    assert eigen.eigenfunction_u(state.z_E, s3) == pytest.approx(3 * AI0, rel=1e-14)


def test_eigenfunction_zeros(state, bisection_zeros):
    for a in bisection_zeros[:10]:
        z = (state.epsilon - a) / state.k
        assert abs(eigen.eigenfunction_u(z, state)) < 1e-12


def schrodinger_residual(state, h):
    m, gt, hbar = state.species.m_i, state.gtilde, state.ctx.hbar
    z = np.linspace(state.z_E - 6, state.z_E + 2, 161)
    u = lambda x: eigen.eigenfunction_u(x, state)
    return np.max(np.abs(d2_5pt(u, z, h) - (2 * m / hbar**2) * (m * gt * z - state.E) * u(z)))


def test_schrodinger_residual(state):
    coarse = schrodinger_residual(state, 0.01)
    fine = schrodinger_residual(state, 0.005)
    assert coarse < 1e-6 and fine < 1e-6
    assert coarse / fine >= 4.0


# --- eigen Wigner -------------------------------------------------------------


def test_wigner_constant_on_orbits(state):
    rng = np.random.default_rng(3)
    p = rng.uniform(-3, 3, 50)
    H = rng.uniform(-2, 3, 50)
    z = H - p * p / 2
    z2 = H - 0.49 * p * p / 2  # same H with momentum 0.7 p
    a = eigen.eigen_wigner(z, p, state)
    b = eigen.eigen_wigner(z2, 0.7 * p, state)
    assert np.allclose(a, b, rtol=1e-11, atol=1e-13)


def test_wigner_forbidden_decay(state):
    p = 0.4
    z = (state.E + 5 / state.alpha - p * p / 2) / state.gtilde
    peak = np.max(np.abs(eigen.eigen_wigner(np.linspace(-5, 2, 2001), 0.0, state)))
    assert abs(eigen.eigen_wigner(z, p, state)) < 1e-3 * peak


def wigner_pde_residuals(state, h):
    m, gt, hbar = state.species.m_i, state.gtilde, state.ctx.hbar
    Z, P = np.meshgrid(np.linspace(-3, 1.5, 31), np.linspace(-2.5, 2.5, 31), indexing="ij")
    W = lambda z, p: eigen.eigen_wigner(z, p, state)
    dz = d1_5pt(lambda x: W(x, P), Z, h)
    dp = d1_5pt(lambda x: W(Z, x), P, h)
    transport = (P / m) * dz - m * gt * dp
    dzz = d2_5pt(lambda x: W(x, P), Z, h)
    eigval = (state.hamiltonian(Z, P) - state.E) * W(Z, P) - hbar**2 / (8 * m) * dzz
    return np.max(np.abs(transport)), np.max(np.abs(eigval))


def test_wigner_pde_pair(state):
    t1, e1 = wigner_pde_residuals(state, 0.005)
    t2, e2 = wigner_pde_residuals(state, 0.0025)
    assert max(t1, e1, t2, e2) < 1e-6
    assert t1 / t2 >= 4.0 and e1 / e2 >= 4.0


# --- marginal identity -----------------------------------------------------------


def test_marginal_identity(state):
    report = eigen.marginal_identity_check(state)
    assert report.max_relative_deviation < 1e-5
    assert report.z[0] == pytest.approx(state.z_E - 5 / state.k)
    assert report.z[-1] == pytest.approx(state.z_E + 2 / state.k)


def test_turning_point_integral():
    report = eigen.marginal_identity_check(Eigenstate.from_energy(0.0, model.UNIT_MASS, PhysicsContext.natural()))
    quad, _ = integrate.quad(lambda x: special.airy(x * x)[0], -np.inf, np.inf, epsabs=1e-13)
    closed = 2 ** (2 / 3) * math.pi * AI0**2
    assert quad == pytest.approx(closed, rel=1e-10)
    assert report.turning_point_integral == pytest.approx(quad, rel=1e-10)
    assert abs(report.turning_point_integral - 0.6287) < 2e-4


def test_marginal_identity_hbar_invariant(unit):
    devs = []
    for hbar in (1.0, 2.5):
        ctx = PhysicsContext.natural(hbar=hbar)
        s = Eigenstate.from_energy(0.7, unit, ctx)
        devs.append(eigen.marginal_identity_check(s).max_relative_deviation)
    assert max(devs) < 1e-5
    assert abs(devs[0] - devs[1]) < 1e-9


# --- bouncer -------------------------------------------------------------------


def test_bouncer_rb87(rb87, si):
    levels = eigen.bouncer_spectrum(3, rb87, si)
    ev = model.joule_to_ev(levels[0].E_n)
    assert ev == pytest.approx(6.2e-12, rel=0.02)
    assert ev == pytest.approx(model.joule_to_ev(model.energy_scale(rb87, si)) * 2.338107410459767, rel=1e-14)


def test_bouncer_natural(nat, unit, bisection_zeros):
    levels = eigen.bouncer_spectrum(10, unit, nat)
    assert levels[0].E_n == pytest.approx(1.8558, abs=1e-4)
    assert levels[0].E_n == pytest.approx(0.5 ** (1 / 3) * 2.338107410459767, rel=1e-14)
    for lv, a in zip(levels, bisection_zeros):
        assert lv.a == pytest.approx(a, abs=1e-12)
    assert all(b.E_n > a.E_n for a, b in zip(levels, levels[1:]))
    with pytest.raises(DomainError):
        eigen.bouncer_spectrum(0, unit, nat)


def test_bouncer_mass_scaling(nat):
    base = [lv.E_n for lv in eigen.bouncer_spectrum(5, MassPair(1.0, 1.0), nat)]
    heavy_g = [lv.E_n for lv in eigen.bouncer_spectrum(5, MassPair(1.0, 2.0), nat)]
    heavy_i = [lv.E_n for lv in eigen.bouncer_spectrum(5, MassPair(2.0, 1.0), nat)]
    assert np.allclose(np.array(heavy_g) / base, 2 ** (2 / 3), rtol=1e-13)
    assert np.allclose(np.array(heavy_i) / base, 2 ** (-1 / 3), rtol=1e-13)


@settings(max_examples=20, deadline=None)
@given(st.floats(0.1, 10.0), st.floats(0.1, 10.0))
def test_spectrum_ratios_species_independent(mi, mg):
    ctx = PhysicsContext.natural()
    ref = [lv.E_n for lv in eigen.bouncer_spectrum(6, model.UNIT_MASS, ctx)]
    other = [lv.E_n for lv in eigen.bouncer_spectrum(6, MassPair(mi, mg), ctx)]
    assert np.allclose(np.array(other) / other[0], np.array(ref) / ref[0], rtol=1e-13)
    assert other[0] / ref[0] == pytest.approx(mg ** (2 / 3) * mi ** (-1 / 3), rel=1e-12)


def test_bouncer_wavefunction(nat, unit):
    k = model.wave_vector(unit, nat)
    for n in range(6):
        assert abs(eigen.bouncer_wavefunction(n, 0.0, unit, nat)) < 1e-8
        norm, _ = integrate.quad(
            lambda z: eigen.bouncer_wavefunction(n, z, unit, nat) ** 2, 0, (20 + 2 * n) / k, limit=200
        )
        assert norm == pytest.approx(1.0, abs=1e-6)
        z = np.linspace(1e-6, 30 / k, 30001)
        u = eigen.bouncer_wavefunction(n, z, unit, nat)
        assert np.count_nonzero(np.sign(u[:-1]) * np.sign(u[1:]) < 0) == n
    with pytest.raises(DomainError):
        eigen.bouncer_wavefunction(0, -0.1, unit, nat)


# --- JWKB ------------------------------------------------------------------------


def test_jwkb_phase(nat, unit):
    E = 5.0
    zE = model.turning_point(E, unit, nat)
    assert eigen.jwkb_phase(zE, E, unit, nat) == pytest.approx(-math.pi / 4, abs=1e-15)
    for z in (-3.0, 0.0, 2.5):
        quad, _ = integrate.quad(lambda x: eigen.classical_momentum(x, E, unit, nat), z, zE, epsabs=0, epsrel=1e-13)
        assert eigen.jwkb_phase(z, E, unit, nat) + math.pi / 4 == pytest.approx(quad / nat.hbar, rel=1e-10)
        dphi = d1_5pt(lambda x: eigen.jwkb_phase(x, E, unit, nat), z, 1e-3)
        assert -nat.hbar * dphi == pytest.approx(eigen.classical_momentum(z, E, unit, nat), rel=1e-6)
    with pytest.raises(ForbiddenRegionError):
        eigen.jwkb_phase(zE + 0.1, E, unit, nat)


def test_jwkb_antinode_accuracy(nat, unit):
    E = 20.0
    s = Eigenstate.from_energy(E, unit, nat)
    # antinode nearest eps - k z = 10: phi = n pi
    n = round(((2 / 3) * 10**1.5 - math.pi / 4) / math.pi)
    d = (1.5 * (n * math.pi + math.pi / 4)) ** (2 / 3)
    z = (s.epsilon - d) / s.k
    exact = eigen.eigenfunction_u(z, s)
    approx = eigen.jwkb_wavefunction(z, E, unit, nat)
    assert abs(approx - exact) / abs(exact) < 3e-3


def test_jwkb_two_percent(nat, unit):
    E = 40.0
    s = Eigenstate.from_energy(E, unit, nat)
    d = np.linspace(3.0, 40.0, 20001)
    z = (s.epsilon - d) / s.k
    err = np.abs(eigen.jwkb_wavefunction(z, E, unit, nat) - eigen.eigenfunction_u(z, s))
    assert np.max(err / eigen.jwkb_envelope(z, E, unit, nat)) < 0.02


def test_jwkb_validity_and_forbidden(nat, unit):
    s = Eigenstate.from_energy(2.0, unit, nat)
    z = (s.epsilon - 1.0) / s.k
    with pytest.warns(eigen.JWKBValidityWarning):
        eigen.jwkb_wavefunction(z, 2.0, unit, nat)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        eigen.jwkb_wavefunction((s.epsilon - 5.0) / s.k, 2.0, unit, nat)
    with pytest.raises(ForbiddenRegionError):
        eigen.jwkb_wavefunction(s.z_E, 2.0, unit, nat)


@settings(max_examples=20, deadline=None)
@given(st.floats(0.1, 10.0))
def test_velocity_readout_mass_invariant(lam):
    ctx = PhysicsContext.natural(g_ref=2.0)
    base = MassPair(1.0, 1.5)
    z, zE = -1.0, 3.0
    for pair in (base, base.scaled(lam)):
        E = pair.m_i * model.specific_acceleration(pair, ctx) * zE
        dphi = d1_5pt(lambda x: eigen.jwkb_phase(x, E, pair, ctx), z, 1e-3)
        v = -(ctx.hbar / pair.m_i) * dphi
        assert v == pytest.approx(math.sqrt(2 * 3.0 * (zE - z)), rel=1e-6)
        assert eigen.classical_velocity(z, E, pair, ctx) == pytest.approx(math.sqrt(24.0), rel=1e-14)


def test_node_spacing_matches_local_wavelength(nat, unit):
    E = 60.0
    s = Eigenstate.from_energy(E, unit, nat)
    u = lambda x: eigen.eigenfunction_u(x, s)
    z = np.linspace(s.z_E - 40, s.z_E - 25, 20001)
    vals = u(z)
    idx = np.nonzero(vals[:-1] * vals[1:] < 0)[0]
    nodes = np.array([bisect(u, z[i], z[i + 1]) for i in idx])
    mids = 0.5 * (nodes[:-1] + nodes[1:])
    expected = math.pi * nat.hbar / eigen.classical_momentum(mids, E, unit, nat)
    assert np.allclose(np.diff(nodes), expected, rtol=1e-3)


def test_jwkb_energy(nat, unit):
    exact = [lv.E_n for lv in eigen.bouncer_spectrum(10, unit, nat)]
    errs = [abs(eigen.jwkb_energy(n, unit, nat) / exact[n] - 1) for n in range(10)]
    assert abs(errs[0] - 0.0076) < 5e-4
    assert all(b < a for a, b in zip(errs, errs[1:]))
    assert errs[9] < 1e-4
    for n in range(10):
        E = eigen.jwkb_energy(n, unit, nat)
        assert eigen.action(E, unit, nat) == pytest.approx(2 * math.pi * nat.hbar * (n + 0.75), rel=1e-12)
    with pytest.raises(DomainError):
        eigen.jwkb_energy(-1, unit, nat)


def test_transit_time():
    ctx = PhysicsContext.si(g_ref=9.81)
    pair = MassPair(1.0, 1.0)
    E = 9.81  # z_E = 1 m
    tau = eigen.transit_time(0.0, E, pair, ctx)
    assert tau == pytest.approx(0.4515, abs=1e-4)
    quad, _ = integrate.quad(lambda z: 1 / eigen.classical_velocity(z, E, pair, ctx), 0, 1, epsabs=0, epsrel=1e-12)
    assert tau == pytest.approx(quad, rel=1e-9)
    assert eigen.classical_momentum(0.0, E, pair, ctx) == pytest.approx(9.81 * tau, rel=1e-12)
    scaled = pair.scaled(3.7)
    assert eigen.transit_time(0.0, 3.7 * E, scaled, ctx) == pytest.approx(tau, rel=1e-15)
    with pytest.raises(ForbiddenRegionError):
        eigen.transit_time(1.0, E, pair, ctx)


def test_transit_time_is_phase_derivative(nat, unit):
    E, z, h = 4.0, -1.0, 1e-3
    dphi = d1_5pt(lambda e: eigen.jwkb_phase(z, e, unit, nat), E, h)
    assert nat.hbar * dphi == pytest.approx(eigen.transit_time(z, E, unit, nat), rel=1e-6)


# --- incoherent superposition -------------------------------------------------------


def test_incoherent_sigma_zero(nat, unit, state):
    spec = IncoherentSpec.build(state.E, 0.0, unit, nat)
    Z, P = np.meshgrid(np.linspace(-6, 3, 40), np.linspace(-3, 3, 40), indexing="ij")
    a = eigen.incoherent_wigner(Z, P, spec, unit, nat)
    b = eigen.eigen_wigner(Z, P, state)
    assert np.max(np.abs(a - b)) < 1e-10


def test_incoherent_matches_mixture(nat, unit):
    E0, sigma = 1.0, 0.3
    spec = IncoherentSpec.build(E0, sigma, unit, nat)
    for z, p in [(0.0, 0.0), (1.0, 0.0), (-1.0, 1.5), (0.5, 0.7), (-2.0, 0.0)]:
        def integrand(E):
            s = Eigenstate.from_energy(E, unit, nat)
            return spec.weight(E) * eigen.eigen_wigner(z, p, s)

        ref, _ = integrate.quad(integrand, E0 - 6 * sigma, E0 + 6 * sigma, epsabs=0, epsrel=1e-12, limit=200)
        val = eigen.incoherent_wigner(z, p, spec, unit, nat)
        assert val == pytest.approx(ref, rel=1e-6)


def test_incoherent_negativity_suppressed(nat, unit):
    z = np.linspace(-8, 1, 300)[:, None]
    p = np.linspace(-4, 4, 300)[None, :]
    minima = []
    for sigma in (0.0, 0.5):
        spec = IncoherentSpec.build(1.0, sigma, unit, nat)
        minima.append(np.min(eigen.incoherent_wigner(z, p, spec, unit, nat)))
    assert minima[0] < 0 and abs(minima[1]) < abs(minima[0])


def test_incoherent_saturation_and_domain(nat, unit):
    spec = IncoherentSpec.build(0.0, 20.0, unit, nat)
    with pytest.raises(SaturationError):
        eigen.incoherent_wigner(-50.0, 0.0, spec, unit, nat)
    with pytest.raises(DomainError):
        IncoherentSpec.build(0.0, -1.0, unit, nat)


def test_incoherent_large_argument_finite(nat, unit):
    spec = IncoherentSpec.build(0.0, 2.0, unit, nat)
    val = eigen.incoherent_wigner(200.0, 0.0, spec, unit, nat)
    assert math.isfinite(val) and val >= 0


# --- cross-representation and dynamics ----------------------------------------------


def test_cross_representation(nat, unit):
    s = Eigenstate.from_energy(0.0, unit, nat)
    z = np.linspace(-60.0, 8.0, 2048, endpoint=False)
    psi = eigen.apodized_eigenfunction(s, z)
    grid = ps.wigner_from_wavefunction(psi, z, nat)
    rows = (grid.z > -10) & (grid.z < 4)
    cols = np.abs(grid.p) < 6
    numeric = grid.values[np.ix_(rows, cols)].ravel()
    exact = eigen.eigen_wigner(grid.z[rows][:, None], grid.p[cols][None, :], s).ravel()
    assert np.corrcoef(numeric, exact)[0, 1] > 0.999


def test_invariance_class(nat, unit):
    s = Eigenstate.from_energy(0.8, unit, nat)
    gauss_of_H = ps.WignerField(lambda z, p: np.exp(-((s.hamiltonian(z, p) - 1.0) ** 2)))
    airy_of_H = s.wigner_field()
    Z, P = np.meshgrid(np.linspace(-5, 3, 33), np.linspace(-3, 3, 29), indexing="ij")
    for field in (gauss_of_H, airy_of_H):
        for t in (0.3, 1.7, -2.0):
            moved = ps.evolve_linear(field, t, unit, nat)
            assert np.max(np.abs(moved(Z, P) - field(Z, P))) < 1e-12


def test_non_spreading_marginal(unit):
    ctx = PhysicsContext.natural(g_ref=1.0)
    s = Eigenstate.from_energy(0.5, unit, ctx)
    t = 0.8
    free = ps.evolve_linear(s.wigner_field(), t, unit, PhysicsContext.natural(g_ref=0.0))
    z = np.linspace(-4, 2, 61) + 0.5 * t * t
    # p integration window centred on the displaced momentum m g t
    y = s.alpha * (s.gtilde * (z - 0.5 * t * t) - s.E)
    half = np.sqrt(np.maximum(40 - y, 1.0) * 2 / s.alpha)
    u = np.linspace(-1, 1, 4001)
    p = t + half[:, None] * u[None, :]
    density = np.trapezoid(free(z[:, None], p), u, axis=1) * half
    closed = math.sqrt(2 / s.alpha) * 2 ** (2 / 3) * math.pi * eigen.eigenfunction_u(z - 0.5 * t * t, s) ** 2
    assert np.max(np.abs(density - closed)) / np.max(closed) < 1e-6


def test_node_lattice_k_scaling(nat):
    nodes = []
    for pair in (MassPair(1.0, 1.0), MassPair(2.0, 2.0)):
        s = Eigenstate.from_energy(0.0, pair, nat)
        u = lambda x, s=s: eigen.eigenfunction_u(x, s)
        z = np.linspace(-12, 0, 12001)
        vals = u(z)
        idx = np.nonzero(vals[:-1] * vals[1:] < 0)[0][-5:]
        nodes.append(np.array([bisect(u, z[i], z[i + 1]) for i in idx]))
    heavy = nodes[1][-5:]
    light = nodes[0][-5:]
    assert np.allclose(heavy, light * 2 ** (-2 / 3), rtol=1e-10)
