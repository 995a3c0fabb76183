"""Closed-form reference densities.

Two families are covered:

* the Gaussian potential ``Q(x) = x**2`` with hard walls, whose edges and
  densities are explicit;
* the logarithmic family ``Q(x) = x**2 - 2 alpha log(x)`` on the positive
  half line.  This is the large-n limit of the weight
  ``x**(2 mu) exp(-x**2)`` rescaled by ``sqrt(n)`` with ``mu / n -> alpha``,
  so ``Q'(x) = 2x - 2 alpha / x``.  Its edge functions are not polynomial and
  are integrated numerically in the cosine variable.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from .edge_solver import EdgeCase, EdgeClassification, SolverError

__all__ = [
    "LogPotentialParams",
    "gauss_b_of_sigma",
    "gauss_a_of_tau",
    "semicircle_density",
    "gauss_hard_hard_density",
    "gauss_hard_soft_density",
    "gauss_soft_hard_density",
    "logpot_edge_residuals",
    "logpot_phi",
    "logpot_psi",
    "solve_logpot_soft_edges",
    "logpot_soft_density",
    "logpot_soft_mass_factor",
    "logpot_hard_edge",
    "logpot_hard_density",
    "logpot_classify",
    "logpot_density",
]

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class LogPotentialParams:
    alpha: float
    sigma: float = 0.0

    def __post_init__(self):
        if not (self.alpha >= 0 and self.sigma >= 0):
            raise ValueError("alpha and sigma must be nonnegative")


# --- Gaussian ----------------------------------------------------------------

def gauss_b_of_sigma(sigma: float) -> float:
    """Soft right edge for ``x**2`` with a hard wall at ``sigma >= -sqrt(2)``."""
    return (2.0 / 3.0) * (sigma / 2 + math.sqrt(sigma * sigma + 6))


def gauss_a_of_tau(tau: float) -> float:
    return (2.0 / 3.0) * (tau / 2 - math.sqrt(tau * tau + 6))


def semicircle_density(x: float) -> float:
    return math.sqrt(2 - x * x) / math.pi if abs(x) < SQRT2 else 0.0


def gauss_hard_hard_density(sigma: float, tau: float, x: float) -> float:
    if not sigma < x < tau:
        raise ValueError(f"x={x} outside ({sigma}, {tau})")
    top = (sigma - tau) ** 2 / 8 + 1 + x * (sigma + tau) / 2 - x * x
    return top / (math.pi * math.sqrt((tau - x) * (x - sigma)))


def gauss_hard_soft_density(sigma: float, x: float) -> float:
    b = gauss_b_of_sigma(sigma)
    if not sigma < x < b:
        return 0.0
    return math.sqrt((b - x) / (x - sigma)) * (2 * x + b - sigma) / (2 * math.pi)


def gauss_soft_hard_density(tau: float, x: float) -> float:
    # sign chosen so the density is nonnegative
    a = gauss_a_of_tau(tau)
    if not a < x < tau:
        return 0.0
    return math.sqrt((x - a) / (tau - x)) * (tau - a - 2 * x) / (2 * math.pi)


# --- logarithmic family ----------------------------------------------------------

def logpot_edge_residuals(alpha: float, a: float, b: float) -> tuple[float, float]:
    """Closed-form ``phi / pi`` and ``psi / pi`` of the log family at ``(a, b)``."""
    r = math.sqrt(a / b)
    f1 = b + a - 2 * alpha / math.sqrt(a * b)
    f2 = 0.75 * (b - a) ** 2 + a * (b - a) + 2 * alpha * r - 2 * alpha - 2
    return f1, f2


def _logpot_dQ(alpha, t):
    return 2 * t - 2 * alpha / t


def _theta_quad(fn, start=64, cap=8192, tol=1e-13):
    n = start
    prev = None
    while n <= cap:
        x, w = np.polynomial.legendre.leggauss(n)
        th = math.pi * (x + 1) / 2
        cur = float(np.sum(w * fn(th)) * math.pi / 2)
        if prev is not None and abs(cur - prev) <= tol * max(1.0, abs(cur)):
            return cur
        prev = cur
        n *= 2
    return prev


def logpot_phi(alpha: float, a: float, b: float) -> float:
    """``int_a^b Q'(t) / sqrt((t-a)(b-t)) dt`` by quadrature in ``theta``."""
    c, h = (a + b) / 2, (b - a) / 2
    return _theta_quad(lambda th: _logpot_dQ(alpha, c + h * np.cos(th)))


def logpot_psi(alpha: float, a: float, b: float) -> float:
    c, h = (a + b) / 2, (b - a) / 2
    return _theta_quad(lambda th: _logpot_dQ(alpha, c + h * np.cos(th)) * h * (1 + np.cos(th))) - 2 * math.pi


def solve_logpot_soft_edges(alpha: float, max_iter: int = 200, tol: float = 1e-12) -> tuple[float, float]:
    """Soft edges ``0 < a_c < b_c`` of the log family by damped Newton."""
    if not alpha > 0:
        raise ValueError("alpha must be positive")

    def resid(v):
        return np.array(logpot_edge_residuals(alpha, v[0], v[1]))

    def admissible(v):
        return 0 < v[0] < v[1]

    v = np.array([max(alpha / 2, 0.05), SQRT2 + alpha])
    r = resid(v)
    for _ in range(max_iter):
        norm = np.linalg.norm(r)
        if norm <= tol:
            return float(v[0]), float(v[1])
        jac = np.empty((2, 2))
        for k in range(2):
            dv = np.zeros(2)
            dv[k] = 1e-7 * max(abs(v[k]), 1e-3)
            dv[k] = min(dv[k], 0.5 * v[0]) if k == 0 else dv[k]
            jac[:, k] = (resid(v + dv) - resid(v - dv)) / (2 * dv[k])
        step = np.linalg.solve(jac, -r)
        lam = 1.0
        while lam > 1e-12:
            trial = v + lam * step
            if admissible(trial):
                r_trial = resid(trial)
                if np.linalg.norm(r_trial) < norm:
                    break
            lam /= 2
        else:
            break
        v, r = trial, r_trial
    if np.linalg.norm(r) <= 1e-10:
        return float(v[0]), float(v[1])
    raise SolverError(f"log-potential edge solve did not converge for alpha={alpha} (residual {np.linalg.norm(r):.3e})")


def _logpot_soft_unnormalized(alpha, a, b, x):
    return np.sqrt((b - x) * (x - a)) * (1 + alpha / (math.sqrt(a * b) * x)) / math.pi


@lru_cache(maxsize=64)
def logpot_soft_mass_factor(alpha: float) -> float:
    """Mass of the soft log density carrying the ``1/pi`` prefactor (should be 1)."""
    a, b = solve_logpot_soft_edges(alpha)
    c, h = (a + b) / 2, (b - a) / 2
    # sqrt((b - t)(t - a)) dt = h**2 sin(theta)**2 dtheta
    return _theta_quad(lambda th: _logpot_soft_unnormalized(alpha, a, b, c + h * np.cos(th))
                       / np.sqrt((b - (c + h * np.cos(th))) * ((c + h * np.cos(th)) - a)) * h * h * np.sin(th) ** 2)


def logpot_soft_density(alpha: float, x):
    """Soft-edge log-family density on ``(a_c, b_c)``, normalized to unit mass."""
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ValueError("log-family density is defined for x > 0 only")
    a, b = solve_logpot_soft_edges(alpha)
    inside = (x > a) & (x < b)
    out = np.zeros_like(x)
    out[inside] = _logpot_soft_unnormalized(alpha, a, b, x[inside]) / logpot_soft_mass_factor(alpha)
    return out if out.ndim else float(out)


def _hard_mass(alpha, a, b):
    c, h = (a + b) / 2, (b - a) / 2
    r = math.sqrt(a / b) if alpha > 0 else 0.0

    def integrand(th):
        t = c + h * np.cos(th)
        inner = 2 * t + b - a - (2 * alpha * r / t if alpha > 0 else 0.0)
        # sqrt((b - t)/(t - a)) dt = h (1 - cos(theta)) dtheta
        return h * (1 - np.cos(th)) * inner / (2 * math.pi)

    return _theta_quad(integrand)


def _check_hard(alpha, sigma):
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")
    if alpha > 0:
        if sigma <= 0:
            raise ValueError("a hard wall needs sigma > 0 when alpha > 0")
        a_c, _ = solve_logpot_soft_edges(alpha)
        if sigma < a_c:
            raise ValueError(f"sigma={sigma} is below the critical edge a_c={a_c}; the edge is soft")
    elif sigma < -SQRT2:
        raise ValueError("for alpha = 0 the wall must satisfy sigma >= -sqrt(2)")


@lru_cache(maxsize=256)
def logpot_hard_edge(alpha: float, sigma: float) -> float:
    """Soft right edge ``b`` for a hard wall at ``sigma``: unit mass by quadrature."""
    _check_hard(alpha, sigma)

    def f(w):
        return _hard_mass(alpha, sigma, sigma + w) - 1.0

    lo, hi = 0.0, 1.0
    for _ in range(60):
        if f(hi) > 0:
            break
        lo, hi = hi, 2 * hi
    else:
        raise SolverError(f"no mass bracket for alpha={alpha}, sigma={sigma}")
    lo = max(lo, 1e-12 * hi)
    if f(lo) > 0:
        raise SolverError(f"no mass bracket for alpha={alpha}, sigma={sigma}")
    return sigma + brentq(f, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)


def logpot_hard_density(alpha: float, sigma: float, x):
    x = np.asarray(x, dtype=float)
    a = sigma
    b = logpot_hard_edge(alpha, sigma)
    out = np.zeros_like(x)
    inside = (x > a) & (x < b)
    xi = x[inside]
    inner = 2 * xi + b - a
    if alpha > 0:
        inner = inner - 2 * alpha * math.sqrt(a / b) / xi
    out[inside] = np.sqrt((b - xi) / (xi - a)) * inner / (2 * math.pi)
    out[x == a] = math.inf
    return out if out.ndim else float(out)


def logpot_classify(alpha: float, sigma: float = 0.0) -> EdgeClassification:
    """Edge configuration of the log family on ``[sigma, inf)``."""
    if alpha == 0:
        if sigma <= -SQRT2:
            return EdgeClassification(EdgeCase.SOFT_SOFT, -SQRT2, SQRT2)
        return EdgeClassification(EdgeCase.HARD_SOFT, sigma, logpot_hard_edge(0.0, sigma))
    if sigma < 0:
        raise ValueError("sigma must be nonnegative for alpha > 0")
    a_c, b_c = solve_logpot_soft_edges(alpha)
    if sigma <= a_c:
        return EdgeClassification(EdgeCase.SOFT_SOFT, a_c, b_c)
    return EdgeClassification(EdgeCase.HARD_SOFT, sigma, logpot_hard_edge(alpha, sigma))


def logpot_density(alpha: float, sigma: float, x):
    """Density of the log family on ``[sigma, inf)`` in whichever edge regime applies."""
    cls = logpot_classify(alpha, sigma)
    if cls.case is EdgeCase.HARD_SOFT:
        return logpot_hard_density(alpha, sigma, x)
    if alpha == 0:
        x = np.asarray(x, dtype=float)
        out = np.sqrt(np.clip(2 - x * x, 0, None)) / math.pi
        return out if out.ndim else float(out)
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = logpot_soft_density(alpha, x[pos])
    return out if out.ndim else float(out)
