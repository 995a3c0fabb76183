"""Half-line Hermite-type orthogonal polynomials and the finite-n density.

The weight is ``x**(2 mu) exp(-x**2)`` on ``[0, inf)``.  Recurrence
coefficients come from the Cholesky factor of the Hankel moment matrix,
computed with mpmath at 60 significant digits because the Hankel matrix is
badly conditioned; only the resulting coefficients are rounded to float.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np

from .reference_families import logpot_density

__all__ = [
    "MAX_BASIS",
    "OrthoBasis",
    "half_line_moment",
    "build_basis",
    "monic_values",
    "orthonormal_values",
    "fn_density",
    "limit_density",
    "integrate_half_line",
    "l1_distance",
]

MAX_BASIS = 16
_DPS = 60


def half_line_moment(mu: float, j: int) -> float:
    """``int_0^inf x**(j + 2 mu) exp(-x**2) dx = Gamma((j + 2 mu + 1)/2) / 2``."""
    if j < 0 or mu < 0:
        raise ValueError("need j >= 0 and mu >= 0")
    return math.gamma((j + 2 * mu + 1) / 2) / 2


@dataclass(frozen=True)
class OrthoBasis:
    mu: float
    n: int
    recurrence: tuple[tuple[float, float], ...]  # (alpha_k, beta_k), beta_0 = d_0
    norms: tuple[float, ...]                     # d_k = int H_k**2 w

    @property
    def alphas(self) -> np.ndarray:
        return np.array([r[0] for r in self.recurrence])

    @property
    def betas(self) -> np.ndarray:
        return np.array([r[1] for r in self.recurrence])


def build_basis(mu: float, n: int) -> OrthoBasis:
    """Recurrence coefficients of the first ``n`` monic orthogonal polynomials."""
    if not 1 <= n <= MAX_BASIS:
        raise ValueError(f"basis size must be in [1, {MAX_BASIS}], got {n}")
    if mu < 0:
        raise ValueError("mu must be nonnegative")
    with mpmath.workdps(_DPS):
        mu_mp = mpmath.mpf(mu)
        mom = [mpmath.gamma((j + 2 * mu_mp + 1) / 2) / 2 for j in range(2 * n + 1)]
        hankel = mpmath.matrix(n + 1, n + 1)
        for i in range(n + 1):
            for j in range(n + 1):
                hankel[i, j] = mom[i + j]
        try:
            low = mpmath.cholesky(hankel)
        except ValueError as exc:
            raise ValueError(f"Hankel matrix not positive definite for mu={mu}, n={n}") from exc
        r = low.T  # upper factor, hankel = r.T r
        recurrence = []
        norms = []
        for k in range(n):
            alpha = r[k, k + 1] / r[k, k] - (r[k - 1, k] / r[k - 1, k - 1] if k > 0 else 0)
            beta = r[k, k] ** 2 if k == 0 else (r[k, k] / r[k - 1, k - 1]) ** 2
            if beta <= 0:
                raise ValueError(f"nonpositive recurrence coefficient beta_{k} for mu={mu}")
            recurrence.append((float(alpha), float(beta)))
            norms.append(float(r[k, k] ** 2))
    return OrthoBasis(float(mu), n, tuple(recurrence), tuple(norms))


def monic_values(basis: OrthoBasis, x) -> np.ndarray:
    """Rows ``H_0(x), ..., H_{n-1}(x)`` from the three-term recurrence."""
    x = np.asarray(x, dtype=float)
    out = np.empty((basis.n,) + x.shape)
    out[0] = 1.0
    a, b = basis.alphas, basis.betas
    if basis.n > 1:
        out[1] = x - a[0]
    for k in range(1, basis.n - 1):
        out[k + 1] = (x - a[k]) * out[k] - b[k] * out[k - 1]
    return out


def orthonormal_values(basis: OrthoBasis, x) -> np.ndarray:
    """``H_k(x) / sqrt(d_k)`` through the normalized recurrence (no overflow)."""
    x = np.asarray(x, dtype=float)
    a, b = basis.alphas, np.sqrt(basis.betas)
    out = np.empty((basis.n,) + x.shape)
    out[0] = 1.0 / b[0]
    prev = np.zeros_like(x)
    for k in range(basis.n - 1):
        nxt = ((x - a[k]) * out[k] - (b[k] * prev if k > 0 else 0.0)) / b[k + 1]
        prev = out[k]
        out[k + 1] = nxt
    return out


def fn_density(basis: OrthoBasis, x):
    """``(1/sqrt(n)) sum_k phi_k(sqrt(n) x)**2`` with ``phi_k`` the orthonormal functions."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("fn_density is defined on x >= 0")
    root_n = math.sqrt(basis.n)
    y = root_n * x
    p = orthonormal_values(basis, y)
    weight = np.exp(-y * y) * (np.power(y, 2 * basis.mu) if basis.mu else 1.0)
    out = np.sum(p * p, axis=0) * weight / root_n
    return out if out.ndim else float(out)


def limit_density(alpha: float, x):
    """Large-n limit of ``fn_density`` with ``mu / n -> alpha`` (wall at 0)."""
    return logpot_density(alpha, 0.0, x)


def integrate_half_line(fn, upper: float, panels: int = 400, order: int = 16) -> float:
    """``int_0^upper fn(x) dx`` with ``x = u**2`` (absorbs 1/sqrt(x) at 0), composite Gauss-Legendre."""
    g, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(0.0, math.sqrt(upper), panels + 1)
    lo, hi = edges[:-1, None], edges[1:, None]
    u = (lo + hi) / 2 + (hi - lo) / 2 * g
    wu = (hi - lo) / 2 * w
    vals = np.asarray(fn(u.ravel() ** 2), dtype=float).reshape(u.shape)
    return float(np.sum(wu * vals * 2 * u))


def l1_distance(basis: OrthoBasis, alpha: float, upper: float = 6.0) -> float:
    """``int_0^upper |f_n - f_alpha| dx``."""
    return integrate_half_line(lambda x: np.abs(fn_density(basis, x) - limit_density(alpha, x)), upper)
