"""Independent reference computations used only by the tests.

Everything here goes through QUADPACK's algebraic-weight rule
(``scipy.integrate.quad(weight="alg")``) or plain adaptive quadrature, never
through the package's moment tables or cosine substitution.
"""
import math

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

# exponents (on t - a, on b - t) of each edge weight
ALG = {
    "arcsine": (-0.5, -0.5),
    "sqrt_ratio_right": (0.5, -0.5),
    "sqrt_ratio_left": (-0.5, 0.5),
    "semicircle": (0.5, 0.5),
}


def alg_integral(f, a, b, kind):
    val, _ = quad(f, a, b, weight="alg", wvar=ALG[kind], epsabs=1e-14, epsrel=1e-13, limit=200)
    return val


def quad_phi(dq, a, b):
    return alg_integral(dq, a, b, "arcsine")


def quad_psi(dq, a, b):
    return alg_integral(dq, a, b, "sqrt_ratio_right") - 2 * math.pi


def quad_b_of_a(dq, a):
    hi = a + 1.0
    while quad_psi(dq, a, hi) < 0:
        hi = a + 2 * (hi - a)
    return brentq(lambda b: quad_psi(dq, a, b), a + 1e-9, hi, xtol=1e-14)


def newton_free_edges(dq, a, b, iters=60):
    """2-D Newton on (phi, psi) with finite-difference Jacobian and quadrature integrals."""
    v = np.array([a, b], dtype=float)
    for _ in range(iters):
        F = np.array([quad_phi(dq, *v), quad_psi(dq, *v)])
        if np.max(np.abs(F)) < 1e-13:
            break
        J = np.empty((2, 2))
        for k in range(2):
            d = np.zeros(2)
            d[k] = 1e-6
            Fp = np.array([quad_phi(dq, *(v + d)), quad_psi(dq, *(v + d))])
            Fm = np.array([quad_phi(dq, *(v - d)), quad_psi(dq, *(v - d))])
            J[:, k] = (Fp - Fm) / 2e-6
        v = v - np.linalg.solve(J, F)
    return float(v[0]), float(v[1])


def quad_density_integral(density, a, b, f=lambda x: 1.0):
    val, _ = quad(lambda x: f(x) * density(x), a, b, limit=400, epsabs=1e-13, epsrel=1e-12)
    return val
