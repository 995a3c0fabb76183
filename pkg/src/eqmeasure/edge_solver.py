"""Support endpoints of the constrained equilibrium measure.

For a convex polynomial potential ``Q`` the two edge functions are

    phi(a, b) = int_a^b Q'(t) dt / sqrt((t - a)(b - t))
    psi(a, b) = int_a^b Q'(t) sqrt((t - a)/(b - t)) dt - 2 pi

``phi = 0`` is the balance condition at a soft left edge and ``psi = 0`` the
unit-mass condition of a measure with a soft right edge.  Both are evaluated
exactly through :mod:`eqmeasure.polycalc`, so the root finders below work on
noise-free objectives.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from scipy.optimize import brentq

from .polycalc import Polynomial, WeightKind, _integrate_width, as_polynomial, derivative

__all__ = [
    "Barriers",
    "EdgeCase",
    "EdgeClassification",
    "SolverError",
    "phi",
    "psi",
    "edge_ratio",
    "solve_b_of_a",
    "solve_a_of_tau",
    "solve_free_edges",
    "classify",
]

MAX_DOUBLINGS = 60
_XTOL = 1e-15
_RTOL = 4 * 2.220446049250313e-16


class SolverError(RuntimeError):
    """Bracketing or convergence failure in an edge equation."""


@dataclass(frozen=True)
class Barriers:
    """Confinement interval ``[sigma, tau]``; either end may be infinite."""

    sigma: float = -math.inf
    tau: float = math.inf

    def __post_init__(self):
        s, t = float(self.sigma), float(self.tau)
        if math.isnan(s) or math.isnan(t):
            raise ValueError("barriers must not be NaN")
        if s == math.inf or t == -math.inf:
            raise ValueError("sigma cannot be +inf and tau cannot be -inf")
        if not s < t:
            raise ValueError(f"need sigma < tau, got sigma={s}, tau={t}")
        object.__setattr__(self, "sigma", s)
        object.__setattr__(self, "tau", t)

    def mirrored(self) -> Barriers:
        return Barriers(-self.tau, -self.sigma)

    def contains(self, x) -> bool:
        return self.sigma <= x <= self.tau


class EdgeCase(str, enum.Enum):
    SOFT_SOFT = "SoftSoft"
    HARD_SOFT = "HardSoft"
    SOFT_HARD = "SoftHard"
    HARD_HARD = "HardHard"

    @property
    def hard_left(self) -> bool:
        return self in (EdgeCase.HARD_SOFT, EdgeCase.HARD_HARD)

    @property
    def hard_right(self) -> bool:
        return self in (EdgeCase.SOFT_HARD, EdgeCase.HARD_HARD)

    def mirrored(self) -> EdgeCase:
        return {
            EdgeCase.HARD_SOFT: EdgeCase.SOFT_HARD,
            EdgeCase.SOFT_HARD: EdgeCase.HARD_SOFT,
        }.get(self, self)


@dataclass(frozen=True)
class EdgeClassification:
    case: EdgeCase
    a: float
    b: float

    def __post_init__(self):
        if not self.a < self.b:
            raise ValueError(f"support must satisfy a < b, got [{self.a}, {self.b}]")


def _check_interval(a, b):
    if not a < b:
        raise ValueError(f"need a < b, got a={a}, b={b}")


def _check_potential(Q: Polynomial) -> Polynomial:
    Q = as_polynomial(Q)
    if Q.degree < 2 or Q.degree % 2 or Q.coeffs[-1] <= 0:
        raise ValueError("potential must be a polynomial of even degree >= 2 with positive leading coefficient")
    return Q


def phi(Q, a: float, b: float) -> float:
    _check_interval(a, b)
    return _integrate_width(derivative(Q), a, b - a, WeightKind.ARCSINE)


def _psi_width(dQ: Polynomial, a: float, width: float) -> float:
    return _integrate_width(dQ, a, width, WeightKind.SQRT_RATIO_RIGHT) - 2 * math.pi


def psi(Q, a: float, b: float) -> float:
    _check_interval(a, b)
    return _psi_width(derivative(Q), a, b - a)


def edge_ratio(Q, a: float, b: float) -> float:
    return psi(Q, a, b) / (b - a)


def solve_b_of_a(Q, a: float) -> float:
    """Unique ``b > a`` with ``psi(a, b) = 0``.

    ``psi(a, a+) = -2 pi`` and ``psi / (b - a)`` increases to ``+inf``; the
    width is doubled from 1 until ``psi`` turns positive, then refined with
    Brent's method.
    """
    Q = _check_potential(Q)
    dQ = derivative(Q)
    a = float(a)

    def f(w):
        return _psi_width(dQ, a, w)

    lo, hi = 0.0, 1.0
    for _ in range(MAX_DOUBLINGS):
        if f(hi) > 0:
            break
        lo, hi = hi, 2 * hi
    else:
        raise SolverError(f"no sign change of psi(a={a}, .) within {MAX_DOUBLINGS} doublings")
    w = brentq(f, lo, hi, xtol=_XTOL * max(1.0, hi), rtol=_RTOL, maxiter=500)
    return a + w


def solve_a_of_tau(Q, tau: float) -> float:
    """Soft left edge for a hard wall at ``tau``, via ``a(tau) = -b_{Q(-x)}(-tau)``."""
    Q = _check_potential(Q)
    return -solve_b_of_a(Q.reflect(), -float(tau))


def solve_free_edges(Q) -> tuple[float, float]:
    """Unconstrained support ``(a0, b0)`` with ``phi = psi = 0``.

    ``g(a) = phi(a, b(a))`` is increasing; a sign change is bracketed by a
    geometric scan from ``a = 0`` and then refined.
    """
    Q = _check_potential(Q)

    def g(a):
        return phi(Q, a, solve_b_of_a(Q, a))

    g0 = g(0.0)
    if g0 == 0.0:
        return 0.0, solve_b_of_a(Q, 0.0)
    direction = -1.0 if g0 > 0 else 1.0
    near, step = 0.0, 1.0
    for _ in range(MAX_DOUBLINGS):
        far = direction * step
        if (g(far) > 0) != (g0 > 0):
            break
        near, step = far, 2 * step
    else:
        raise SolverError(f"no sign change of phi(a, b(a)) within {MAX_DOUBLINGS} doublings")
    lo, hi = sorted((near, far))
    a0 = brentq(g, lo, hi, xtol=_XTOL * max(1.0, abs(far)), rtol=_RTOL, maxiter=500)
    return a0, solve_b_of_a(Q, a0)


def classify(Q, barriers: Barriers) -> EdgeClassification:
    """Edge configuration and support for ``Q`` confined to ``barriers``."""
    Q = _check_potential(Q)
    sigma, tau = barriers.sigma, barriers.tau
    a0, b0 = solve_free_edges(Q)
    if sigma > a0:
        b_sigma = solve_b_of_a(Q, sigma)
        if tau >= b_sigma:
            return EdgeClassification(EdgeCase.HARD_SOFT, sigma, b_sigma)
        return EdgeClassification(EdgeCase.HARD_HARD, sigma, tau)
    if tau >= b0:
        return EdgeClassification(EdgeCase.SOFT_SOFT, a0, b0)
    a_tau = solve_a_of_tau(Q, tau)
    if sigma <= a_tau:
        return EdgeClassification(EdgeCase.SOFT_HARD, a_tau, tau)
    # both walls active although sigma clears the free left edge
    return EdgeClassification(EdgeCase.HARD_HARD, sigma, tau)
