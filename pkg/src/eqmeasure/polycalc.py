"""Dense polynomial calculus and exact integration against square-root weights.

All four edge weights on an interval ``[a, b]`` are handled by the affine map
``t = a + (b - a) u`` onto ``[0, 1]``, where every weight becomes a Beta-type
density whose moments are known in closed form:

====================  ==========================  ==========================
kind                  weight on [0, 1]            k-th moment
====================  ==========================  ==========================
``ARCSINE``           1 / sqrt(u (1 - u))         A_k = B(k + 1/2, 1/2)
``SQRT_RATIO_RIGHT``  sqrt(u / (1 - u))           A_{k+1}
``SQRT_RATIO_LEFT``   sqrt((1 - u) / u)           A_k / (2 (k + 1))
``SEMICIRCLE``        sqrt(u (1 - u))             A_{k+1} / (2 (k + 2))
====================  ==========================  ==========================

with ``A_0 = pi`` and ``A_{k+1} / A_k = (2k + 1) / (2k + 2)``.  The ratio
recurrence never forms factorials, so it stays finite for any degree.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

__all__ = [
    "Polynomial",
    "BivariateKernel",
    "WeightKind",
    "derivative",
    "divided_difference",
    "weighted_moment",
    "integrate_weighted",
]


@dataclass(frozen=True)
class Polynomial:
    """Real polynomial with ascending coefficients (``coeffs[k]`` multiplies x**k).

    Trailing zeros are stripped on construction, so the zero polynomial has an
    empty coefficient tuple and ``degree == -1``.
    """

    coeffs: tuple[float, ...] = ()

    def __post_init__(self):
        c = [float(v) for v in self.coeffs]
        while c and c[-1] == 0.0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    @classmethod
    def monomial(cls, k: int, scale: float = 1.0) -> Polynomial:
        return cls((0.0,) * k + (scale,))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __len__(self):
        return len(self.coeffs)

    def __call__(self, x):
        # Horner; works elementwise on numpy arrays and on complex input
        if not self.coeffs:
            return 0.0 * x
        acc = self.coeffs[-1] + 0.0 * x
        for c in reversed(self.coeffs[:-1]):
            acc = acc * x + c
        return acc

    def __add__(self, other: Polynomial) -> Polynomial:
        n = max(len(self), len(other))
        a = list(self.coeffs) + [0.0] * (n - len(self))
        b = list(other.coeffs) + [0.0] * (n - len(other))
        return Polynomial(tuple(x + y for x, y in zip(a, b)))

    def __neg__(self) -> Polynomial:
        return Polynomial(tuple(-c for c in self.coeffs))

    def __sub__(self, other: Polynomial) -> Polynomial:
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, Polynomial):
            if not self.coeffs or not other.coeffs:
                return Polynomial()
            return Polynomial(tuple(np.convolve(self.coeffs, other.coeffs)))
        return Polynomial(tuple(float(other) * c for c in self.coeffs))

    __rmul__ = __mul__

    def compose_affine(self, shift: float, scale: float) -> Polynomial:
        """Coefficients of ``u -> p(shift + scale * u)``."""
        out = np.zeros(max(len(self), 1))
        lin = np.array([shift, scale])
        # Horner in polynomial arithmetic
        for c in reversed(self.coeffs):
            out = np.convolve(out, lin)[: len(out)]
            out[0] += c
        return Polynomial(tuple(out))

    def reflect(self) -> Polynomial:
        """``x -> p(-x)``."""
        return Polynomial(tuple(c if k % 2 == 0 else -c for k, c in enumerate(self.coeffs)))

    def allclose(self, other: Polynomial, atol: float) -> bool:
        n = max(len(self), len(other))
        a = np.zeros(n)
        b = np.zeros(n)
        a[: len(self)] = self.coeffs
        b[: len(other)] = other.coeffs
        return bool(np.all(np.abs(a - b) <= atol))


def as_polynomial(p) -> Polynomial:
    if isinstance(p, Polynomial):
        return p
    return Polynomial(tuple(p))


@dataclass(frozen=True)
class BivariateKernel:
    """``sum_j rows[j](x) * t**j``, the divided difference of a polynomial."""

    rows: tuple[Polynomial, ...]

    def __call__(self, x, t):
        acc = 0.0 * x * t
        for j in reversed(range(len(self.rows))):
            acc = acc * t + self.rows[j](x)
        return acc

    @property
    def total_degree(self) -> int:
        return max(j + r.degree for j, r in enumerate(self.rows))


class WeightKind(enum.Enum):
    ARCSINE = "arcsine"                    # 1/sqrt((t-a)(b-t))
    SQRT_RATIO_RIGHT = "sqrt_ratio_right"  # sqrt((t-a)/(b-t))
    SQRT_RATIO_LEFT = "sqrt_ratio_left"    # sqrt((b-t)/(t-a))
    SEMICIRCLE = "semicircle"              # sqrt((t-a)(b-t))


# power of (b - a) picked up by each weight under t = a + (b - a) u
_LENGTH_POWER = {
    WeightKind.ARCSINE: 0,
    WeightKind.SQRT_RATIO_RIGHT: 1,
    WeightKind.SQRT_RATIO_LEFT: 1,
    WeightKind.SEMICIRCLE: 2,
}


def derivative(p: Polynomial) -> Polynomial:
    p = as_polynomial(p)
    return Polynomial(tuple(k * c for k, c in enumerate(p.coeffs) if k > 0))


def divided_difference(p: Polynomial) -> BivariateKernel:
    """Kernel ``K`` with ``K(x, t) = (p(x) - p(t)) / (x - t)``.

    Uses ``(x**k - t**k)/(x - t) = sum_{i+j=k-1} x**i t**j``, so the
    coefficient of ``x**i t**j`` is ``c[i + j + 1]``.
    """
    p = as_polynomial(p)
    if p.degree < 1:
        raise ValueError("divided difference needs a polynomial of degree >= 1")
    c = p.coeffs
    n = p.degree
    rows = tuple(Polynomial(tuple(c[i + j + 1] for i in range(n - j))) for j in range(n))
    return BivariateKernel(rows)


@lru_cache(maxsize=None)
def _arcsine_moments(kmax: int) -> tuple[float, ...]:
    m = [math.pi]
    for k in range(kmax):
        m.append(m[-1] * (2 * k + 1) / (2 * k + 2))
    return tuple(m)


def _moments(kind: WeightKind, kmax: int) -> np.ndarray:
    """Moments 0..kmax of ``kind`` on [0, 1]."""
    size = 64
    while size < kmax + 2:
        size *= 2
    arc = np.array(_arcsine_moments(size))
    k = np.arange(kmax + 1)
    if kind is WeightKind.ARCSINE:
        return arc[: kmax + 1]
    if kind is WeightKind.SQRT_RATIO_RIGHT:
        return arc[1 : kmax + 2]
    if kind is WeightKind.SQRT_RATIO_LEFT:
        return arc[: kmax + 1] / (2.0 * (k + 1))
    if kind is WeightKind.SEMICIRCLE:
        return arc[1 : kmax + 2] / (2.0 * (k + 2))
    raise ValueError(f"unknown weight kind {kind!r}")


def weighted_moment(kind: WeightKind, k: int) -> float:
    """``int_0^1 u**k w(u) du`` for the weight ``kind``."""
    if k < 0:
        raise ValueError("moment order must be nonnegative")
    return float(_moments(kind, k)[k])


def integrate_weighted(p, a: float, b: float, kind: WeightKind) -> float:
    """Exact ``int_a^b p(t) w(t) dt`` for one of the four edge weights."""
    if not a < b:
        raise ValueError(f"need a < b, got a={a}, b={b}")
    return _integrate_width(as_polynomial(p), a, b - a, kind)


def _integrate_width(p: Polynomial, a: float, width: float, kind: WeightKind) -> float:
    # also valid for width == 0 (degenerate interval), used by the edge solver
    if not p.coeffs:
        return 0.0
    c = np.array(p.compose_affine(a, width).coeffs)
    if c.size == 0:
        return 0.0
    m = _moments(kind, c.size - 1)
    return float(np.dot(c, m)) * width ** _LENGTH_POWER[kind]


def kernel_integrals(kernel: BivariateKernel, a: float, b: float, kind: WeightKind) -> Polynomial:
    """Polynomial ``x -> int_a^b K(x, t) w(t) dt`` computed row by row."""
    out = Polynomial()
    for j, row in enumerate(kernel.rows):
        out = out + row * integrate_weighted(Polynomial.monomial(j), a, b, kind)
    return out


def check_coeffs(coeffs: Sequence[float]) -> Polynomial:
    p = Polynomial(tuple(coeffs))
    if not all(math.isfinite(c) for c in p.coeffs):
        raise ValueError("polynomial coefficients must be finite")
    return p
