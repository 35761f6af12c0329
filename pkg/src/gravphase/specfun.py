"""Airy function Ai, its derivative, and the zeros of Ai.

Evaluation regions:

* ``|y| <= 10``: Taylor series of the Airy equation about the nearest node
  of a precomputed table (node spacing 0.25).  The table is seeded with the
  exact Maclaurin values ``Ai(0)``, ``Ai'(0)``; nodes on the negative axis are
  reached by stepping outward from zero, nodes on the positive axis by
  stepping inward from ``y = 10`` where the exponential asymptotic expansion
  is accurate to ~1e-18.  Both directions are the numerically stable ones.
* ``y > 10``: exponential asymptotic expansion.
* ``y < -10``: oscillatory (amplitude/phase) asymptotic expansion.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

# 3**(-2/3)/Gamma(2/3) and -3**(-1/3)/Gamma(1/3), 18 significant digits (mpmath, 40 dps)
AI0 = 0.355028053887817239
AIP0 = -0.258819403792806798

SWITCH = 10.0
_NODE_STEP = 0.25
_LOCAL_TERMS = 32
_STEP_TERMS = 48
_ASYM_TERMS = 30
_MAX_ZERO_INDEX = 1000


@dataclass(frozen=True)
class AiryValue:
    ai: float
    ai_prime: float
    argument: float


def _asymptotic_coefficients(n: int) -> tuple[np.ndarray, np.ndarray]:
    u = np.empty(n)
    u[0] = 1.0
    for k in range(1, n):
        u[k] = u[k - 1] * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216 * k)
    ks = np.arange(n)
    v = -(6 * ks + 1) / (6 * ks - 1) * u
    return u, v


_U, _V = _asymptotic_coefficients(2 * _ASYM_TERMS)


def _airy_exp_asymptotic(x: np.ndarray, scaled: bool = False) -> tuple[np.ndarray, np.ndarray]:
    """Ai, Ai' for large positive x; with ``scaled`` the factor exp(-zeta) is dropped."""
    zeta = (2.0 / 3.0) * x * np.sqrt(x)
    inv = -1.0 / zeta
    su = np.zeros_like(x)
    sv = np.zeros_like(x)
    for k in range(_ASYM_TERMS - 1, -1, -1):
        su = su * inv + _U[k]
        sv = sv * inv + _V[k]
    x4 = np.sqrt(np.sqrt(x))
    pref = 1.0 if scaled else np.exp(-zeta)
    ai = pref * su / (2.0 * math.sqrt(math.pi) * x4)
    aip = -pref * x4 * sv / (2.0 * math.sqrt(math.pi))
    return ai, aip


def _airy_osc_asymptotic(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Ai(-x), Ai'(-x) for large positive x."""
    zeta = (2.0 / 3.0) * x * np.sqrt(x)
    inv2 = -1.0 / (zeta * zeta)
    u_even = np.zeros_like(x)
    u_odd = np.zeros_like(x)
    v_even = np.zeros_like(x)
    v_odd = np.zeros_like(x)
    for k in range(_ASYM_TERMS - 1, -1, -1):
        u_even = u_even * inv2 + _U[2 * k]
        u_odd = u_odd * inv2 + _U[2 * k + 1]
        v_even = v_even * inv2 + _V[2 * k]
        v_odd = v_odd * inv2 + _V[2 * k + 1]
    u_odd /= zeta
    v_odd /= zeta
    theta = zeta + math.pi / 4.0
    s, c = np.sin(theta), np.cos(theta)
    x4 = np.sqrt(np.sqrt(x))
    rpi = 1.0 / math.sqrt(math.pi)
    ai = rpi / x4 * (s * u_even - c * u_odd)
    aip = -rpi * x4 * (c * v_even + s * v_odd)
    return ai, aip


def _taylor(x0, a0, a1, h, terms: int):
    """Advance the solution of w'' = x w from x0 by h using its Taylor series."""
    # w(x0 + h) = sum c_n h^n with n(n-1) c_n = x0 c_{n-2} + c_{n-3}
    c3, c2, c1 = a0, a1, x0 * a0 / 2.0  # c_{n-3}, c_{n-2}, c_{n-1} for n = 3
    val = a0 + a1 * h + c1 * h * h
    der = a1 + 2.0 * c1 * h
    hp = h * h  # h**(n-1)
    for n in range(3, terms):
        cn = (x0 * c2 + c3) / (n * (n - 1))
        der = der + n * cn * hp
        hp = hp * h
        val = val + cn * hp
        c3, c2, c1 = c2, c1, cn
    return val, der


def _build_table():
    nodes = np.arange(-SWITCH, SWITCH + _NODE_STEP / 2, _NODE_STEP)
    ai = np.empty_like(nodes)
    aip = np.empty_like(nodes)
    i0 = int(np.argmin(np.abs(nodes)))
    ai[i0], aip[i0] = AI0, AIP0
    for i in range(i0 - 1, -1, -1):
        a, d = _taylor(nodes[i + 1], ai[i + 1], aip[i + 1], -_NODE_STEP, _STEP_TERMS)
        ai[i], aip[i] = a, d
    top_a, top_d = _airy_exp_asymptotic(np.array([nodes[-1]]))
    ai[-1], aip[-1] = top_a[0], top_d[0]
    for i in range(len(nodes) - 2, i0, -1):
        a, d = _taylor(nodes[i + 1], ai[i + 1], aip[i + 1], -_NODE_STEP, _STEP_TERMS)
        ai[i], aip[i] = a, d
    return nodes, ai, aip


_NODES, _NODE_AI, _NODE_AIP = _build_table()


def airy(y):
    """Vectorized ``(Ai(y), Ai'(y))`` for real finite ``y``."""
    y = np.asarray(y, dtype=float)
    if not np.all(np.isfinite(y)):
        raise DomainError("Airy argument must be finite")
    scalar = y.ndim == 0
    y = np.atleast_1d(y)
    ai = np.empty_like(y)
    aip = np.empty_like(y)

    mid = np.abs(y) <= SWITCH
    if mid.any():
        ym = y[mid]
        idx = np.rint((ym + SWITCH) / _NODE_STEP).astype(int)
        x0 = _NODES[idx]
        ai[mid], aip[mid] = _taylor(x0, _NODE_AI[idx], _NODE_AIP[idx], ym - x0, _LOCAL_TERMS)
    hi = y > SWITCH
    if hi.any():
        ai[hi], aip[hi] = _airy_exp_asymptotic(y[hi])
    lo = y < -SWITCH
    if lo.any():
        ai[lo], aip[lo] = _airy_osc_asymptotic(-y[lo])
    if scalar:
        return float(ai[0]), float(aip[0])
    return ai, aip


def airy_scaled(y):
    """``Ai(y)·exp(2/3 y^{3/2})`` for ``y > 0``; used where Ai alone underflows."""
    y = np.asarray(y, dtype=float)
    out = np.empty_like(y)
    big = y > SWITCH
    out[big] = _airy_exp_asymptotic(y[big], scaled=True)[0]
    small = ~big
    if small.any():
        ys = y[small]
        out[small] = airy(ys)[0] * np.exp((2.0 / 3.0) * ys * np.sqrt(np.maximum(ys, 0.0)))
    return out


def airy_ai(y: float) -> AiryValue:
    """Ai(y) and Ai'(y) at a single finite argument."""
    if not math.isfinite(y):
        raise DomainError(f"Airy argument must be finite, got {y!r}")
    a, d = airy(float(y))
    return AiryValue(ai=a, ai_prime=d, argument=float(y))


def airy_zero_asymptotic(j: int) -> float:
    """Leading-order estimate ``[3π(4j-1)/8]^{2/3}`` of the j-th zero magnitude."""
    if int(j) != j or j < 1:
        raise DomainError(f"zero index must be a positive integer, got {j!r}")
    return (3.0 * math.pi * (4 * j - 1) / 8.0) ** (2.0 / 3.0)


def airy_zero(j: int) -> float:
    """Magnitude a_j of the j-th negative zero of Ai, so that Ai(-a_j) = 0.

    Newton iteration on ``x -> Ai(-x)`` seeded with the asymptotic estimate;
    falls back to bisection whenever a step leaves the sign-change bracket.
    """
    if int(j) != j or not 1 <= j <= _MAX_ZERO_INDEX:
        raise DomainError(f"zero index must be in [1, {_MAX_ZERO_INDEX}], got {j!r}")
    seed = airy_zero_asymptotic(j)
    # neighbouring zeros are separated by more than ~pi / sqrt(a_j)
    half = 0.45 * math.pi / math.sqrt(seed) if j > 1 else 0.3
    lo, hi = seed - half, seed + half
    f_lo = airy(-lo)[0]
    f_hi = airy(-hi)[0]
    if f_lo * f_hi > 0:
        raise ArithmeticError(f"failed to bracket Airy zero {j}")
    x = seed
    for _ in range(100):
        f, d = airy(-x)
        if f == 0.0:
            return x
        if f * f_lo > 0:
            lo, f_lo = x, f
        else:
            hi = x
        # d/dx Ai(-x) = -Ai'(-x)
        step = f / (-d) if d != 0.0 else math.inf
        nxt = x - step
        if not lo < nxt < hi:
            nxt = 0.5 * (lo + hi)
        if abs(nxt - x) <= 1e-15 * max(1.0, x):
            return nxt
        x = nxt
    return x
