"""Equilibrium measures of convex polynomial potentials on an interval.

A measure is stored as its edge configuration plus a weight polynomial ``w``;
the density on the support ``(a, b)`` is ``w(x) / pi`` times the edge factor

==========  ===================================
SoftSoft    sqrt((x - a)(b - x))
HardSoft    sqrt((b - x)/(x - a))
SoftHard    sqrt((x - a)/(b - x))
HardHard    1 / sqrt((x - a)(b - x))
==========  ===================================

Prefactor convention: every weight polynomial is ``1/(2 pi)`` times a kernel
integral plus the local correction, and the density carries ``1/pi``.  With
this choice the density has unit mass exactly when the edge equations hold.

Integrals against the density use ``t = c + h cos(theta)`` with
``c = (a + b)/2`` and ``h = (b - a)/2``.  Every edge factor times ``dt``
becomes a polynomial in ``cos(theta)``, so the transformed integrand has no
endpoint singularity at all.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import chebyshev as C

from .edge_solver import Barriers, EdgeCase, EdgeClassification, _check_potential, classify
from .polycalc import (
    Polynomial,
    WeightKind,
    derivative,
    divided_difference,
    integrate_weighted,
    kernel_integrals,
)

__all__ = [
    "EquilibriumMeasure",
    "MeasureError",
    "build_measure",
    "measure_from_classification",
    "density_at",
    "cdf",
    "stieltjes",
    "log_potential",
    "robin_constant",
    "robin_probes",
    "energy",
    "mass",
]

# edge weight appearing in the density of each case
DENSITY_KIND = {
    EdgeCase.SOFT_SOFT: WeightKind.SEMICIRCLE,
    EdgeCase.HARD_SOFT: WeightKind.SQRT_RATIO_LEFT,
    EdgeCase.SOFT_HARD: WeightKind.SQRT_RATIO_RIGHT,
    EdgeCase.HARD_HARD: WeightKind.ARCSINE,
}

# kernel weight in the construction of each weight polynomial
KERNEL_KIND = {
    EdgeCase.SOFT_SOFT: WeightKind.ARCSINE,
    EdgeCase.HARD_SOFT: WeightKind.SQRT_RATIO_RIGHT,
    EdgeCase.SOFT_HARD: WeightKind.SQRT_RATIO_LEFT,
    EdgeCase.HARD_HARD: WeightKind.SEMICIRCLE,
}

QUAD_START = 512
QUAD_CAP = 4096
QUAD_TOL = 1e-9
POSITIVITY_TOL = 1e-9
ROBIN_FAIL = 1e-5


class MeasureError(RuntimeError):
    """A constructed measure violates positivity or consistency."""


@dataclass(frozen=True)
class EquilibriumMeasure:
    classification: EdgeClassification
    weight_poly: Polynomial
    potential: Polynomial
    barriers: Barriers = field(default_factory=Barriers)

    @property
    def case(self) -> EdgeCase:
        return self.classification.case

    @property
    def a(self) -> float:
        return self.classification.a

    @property
    def b(self) -> float:
        return self.classification.b

    @property
    def density_kind(self) -> WeightKind:
        return DENSITY_KIND[self.case]

    def scaled(self, factor: float) -> EquilibriumMeasure:
        """Copy with the weight polynomial multiplied by ``factor`` (fault injection)."""
        return EquilibriumMeasure(self.classification, self.weight_poly * factor, self.potential, self.barriers)


def weight_polynomial(Q: Polynomial, cls: EdgeClassification) -> Polynomial:
    dQ = derivative(Q)
    kernel = divided_difference(dQ)
    base = kernel_integrals(kernel, cls.a, cls.b, KERNEL_KIND[cls.case]) * (1 / (2 * math.pi))
    if cls.case is EdgeCase.SOFT_SOFT:
        return base
    if cls.case is EdgeCase.HARD_SOFT:
        return base + dQ * 0.5
    if cls.case is EdgeCase.SOFT_HARD:
        return base - dQ * 0.5
    # ((a + b)/2 - x) Q'(x) / 2 + 1
    lin = Polynomial(((cls.a + cls.b) / 4, -0.5))
    return base + lin * dQ + Polynomial((1.0,))


def measure_from_classification(Q, cls: EdgeClassification, barriers: Barriers | None = None,
                                check: bool = True) -> EquilibriumMeasure:
    Q = _check_potential(Q)
    if barriers is None:
        barriers = Barriers(cls.a if cls.case.hard_left else -math.inf,
                            cls.b if cls.case.hard_right else math.inf)
    m = EquilibriumMeasure(cls, weight_polynomial(Q, cls), Q, barriers)
    if check:
        xs = np.linspace(m.a, m.b, 1001)
        w = m.weight_poly(xs)
        scale = max(1.0, float(np.max(np.abs(w))))
        if np.min(w) < -POSITIVITY_TOL * scale:
            raise MeasureError(
                f"{m.case.value} density negative on [{m.a}, {m.b}] (min weight {np.min(w):.3e})"
            )
    return m


def build_measure(Q, barriers: Barriers, check: bool = True) -> EquilibriumMeasure:
    """Classify ``Q`` on ``barriers`` and build the equilibrium measure."""
    Q = _check_potential(Q)
    return measure_from_classification(Q, classify(Q, barriers), barriers, check=check)


# --- theta-space representation -------------------------------------------------

def _edge_factor_poly(m: EquilibriumMeasure, h: float) -> Polynomial:
    # edge factor times |dt/dtheta| as a polynomial in y = cos(theta)
    kind = m.density_kind
    if kind is WeightKind.SEMICIRCLE:
        return Polynomial((h * h, 0.0, -h * h))
    if kind is WeightKind.SQRT_RATIO_LEFT:
        return Polynomial((h, -h))
    if kind is WeightKind.SQRT_RATIO_RIGHT:
        return Polynomial((h, h))
    return Polynomial((1.0,))


def _theta_cheb(m: EquilibriumMeasure) -> np.ndarray:
    """Cosine-series coefficients of ``g(theta) = density(t) |dt/dtheta|``."""
    c, h = (m.a + m.b) / 2, (m.b - m.a) / 2
    poly = m.weight_poly.compose_affine(c, h) * _edge_factor_poly(m, h) * (1 / math.pi)
    if not poly.coeffs:
        return np.zeros(1)
    return C.poly2cheb(np.array(poly.coeffs))


def _theta_density(m: EquilibriumMeasure, theta):
    c, h = (m.a + m.b) / 2, (m.b - m.a) / 2
    y = np.cos(theta)
    return m.weight_poly(c + h * y) * _edge_factor_poly(m, h)(y) / math.pi


def _gauss(n: int, lo: float, hi: float):
    x, w = _leggauss(n)
    half = (hi - lo) / 2
    return lo + half * (x + 1), half * w


_LEG_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _leggauss(n):
    if n not in _LEG_CACHE:
        _LEG_CACHE[n] = np.polynomial.legendre.leggauss(n)
    return _LEG_CACHE[n]


def _converged(rule, start=QUAD_START, cap=QUAD_CAP, tol=QUAD_TOL):
    # rule(n) -> estimate; doubles n until successive estimates agree
    n = start
    prev = rule(n)
    while n < cap:
        n *= 2
        cur = rule(n)
        if abs(cur - prev) < tol * max(1.0, abs(cur)):
            return cur
        prev = cur
    return prev


# --- public evaluations ---------------------------------------------------------

def mass(m: EquilibriumMeasure) -> float:
    """Total mass from the exact moment of the weight polynomial."""
    return integrate_weighted(m.weight_poly, m.a, m.b, m.density_kind) / math.pi


def density_at(m: EquilibriumMeasure, x):
    """Density at ``x`` (scalar or array); ``inf`` exactly at a hard edge."""
    x = np.asarray(x, dtype=float)
    a, b = m.a, m.b
    out = np.zeros_like(x)
    inside = (x > a) & (x < b)
    xi = x[inside]
    w = m.weight_poly(xi) / math.pi
    kind = m.density_kind
    if kind is WeightKind.SEMICIRCLE:
        out[inside] = w * np.sqrt((xi - a) * (b - xi))
    elif kind is WeightKind.SQRT_RATIO_LEFT:
        out[inside] = w * np.sqrt((b - xi) / (xi - a))
    elif kind is WeightKind.SQRT_RATIO_RIGHT:
        out[inside] = w * np.sqrt((xi - a) / (b - xi))
    else:
        out[inside] = w / np.sqrt((xi - a) * (b - xi))
    if m.case.hard_left:
        out[x == a] = math.inf
    if m.case.hard_right:
        out[x == b] = math.inf
    return out if out.ndim else float(out)


def cdf(m: EquilibriumMeasure, x):
    """``mu((-inf, x])``, exact through the cosine series of the transformed density."""
    x = np.asarray(x, dtype=float)
    c, h = (m.a + m.b) / 2, (m.b - m.a) / 2
    coef = _theta_cheb(m)
    theta = np.arccos(np.clip((x - c) / h, -1.0, 1.0))
    # int_theta^pi sum_j c_j cos(j s) ds
    total = coef[0] * (math.pi - theta)
    for j in range(1, coef.size):
        total = total - coef[j] * np.sin(j * theta) / j
    out = np.clip(total, 0.0, 1.0)
    out = np.where(x <= m.a, 0.0, np.where(x >= m.b, 1.0, out))
    return out if out.ndim else float(out)


def stieltjes(m: EquilibriumMeasure, z: complex) -> complex:
    """Cauchy transform ``G(z) = int dmu(t) / (z - t)`` for ``z`` off the support."""
    z = complex(z)
    if abs(z.imag) <= 1e-12 and m.a - 1e-12 <= z.real <= m.b + 1e-12:
        raise ValueError(f"z={z} lies on the support [{m.a}, {m.b}]")
    c, h = (m.a + m.b) / 2, (m.b - m.a) / 2

    def rule(n):
        th, wq = _gauss(n, 0.0, math.pi)
        return np.sum(wq * _theta_density(m, th) / (z - (c + h * np.cos(th))))

    return complex(_converged(rule))


def _log_distance(xc: float, h: float, theta_x: float, theta):
    # log|x - t(theta)| with cos(theta_x) - cos(theta) in product form
    prod = 2 * np.sin((theta + theta_x) / 2) * np.sin((theta - theta_x) / 2)
    return math.log(h) + np.log(np.abs(prod))


def log_potential(m: EquilibriumMeasure, x: float) -> float:
    """``U(x) = int log(1/|x - t|) dmu(t)``.

    Off the support the transformed integrand is smooth.  On the support the
    theta-integral is split at the image of ``x`` and each half is graded
    cubically toward the logarithmic point.
    """
    x = float(x)
    a, b = m.a, m.b
    c, h = (a + b) / 2, (b - a) / 2
    if x < a or x > b:
        def rule(n):
            th, wq = _gauss(n, 0.0, math.pi)
            t = c + h * np.cos(th)
            return -np.sum(wq * _theta_density(m, th) * np.log(np.abs(x - t)))

        return float(_converged(rule, start=256))

    theta_x = math.acos(min(1.0, max(-1.0, (x - c) / h)))

    def rule(n):
        v, wv = _gauss(n, 0.0, 1.0)
        total = 0.0
        for end in (0.0, math.pi):
            span = end - theta_x
            if span == 0.0:
                continue
            th = theta_x + span * v**3
            jac = abs(span) * 3 * v**2
            total -= np.sum(wv * jac * _theta_density(m, th) * _log_distance(c, h, theta_x, th))
        return total

    return float(_converged(rule, start=128))


def robin_probes(m: EquilibriumMeasure) -> np.ndarray:
    """``U + Q/2`` at the support midpoint and the two quarter points."""
    pts = m.a + (m.b - m.a) * np.array([0.5, 0.25, 0.75])
    return np.array([log_potential(m, p) + 0.5 * m.potential(p) for p in pts])


def robin_constant(m: EquilibriumMeasure) -> float:
    """Modified Robin constant ``C`` with ``U + Q/2 = C`` on the support."""
    vals = robin_probes(m)
    spread = float(np.ptp(vals))
    if spread > ROBIN_FAIL:
        raise MeasureError(f"U + Q/2 is not constant on the support (spread {spread:.3e})")
    return float(vals[0])


def energy(m: EquilibriumMeasure) -> float:
    """Minimal energy ``C + (1/2) int Q dmu``."""
    q_mean = integrate_weighted(m.potential * m.weight_poly, m.a, m.b, m.density_kind) / math.pi
    return robin_constant(m) + 0.5 * q_mean
