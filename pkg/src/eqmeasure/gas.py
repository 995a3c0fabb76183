"""Metropolis sampling of the confined eigenvalue gas.

The target is the joint density

    exp(-n (beta/2) sum_i Q(x_i)) prod_{i<j} |x_i - x_j|**beta

restricted to ``[sigma, tau]**n``.  Each sweep proposes a uniform move of
width ``step_scale`` for every coordinate in turn.  Proposals leaving the
barriers, or landing within ``COINCIDENCE`` of another particle, are
rejected.

Random numbers come from ``numpy.random.Generator(PCG64(seed))`` drawn in
fixed blocks of ``BLOCK`` sweeps (steps first, then acceptance uniforms), so
a seed pins the whole sample stream.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .edge_solver import Barriers
from .measure import EquilibriumMeasure, cdf
from .polycalc import Polynomial, as_polynomial

__all__ = [
    "GasConfig",
    "ChainState",
    "ChainRun",
    "log_weight",
    "initial_positions",
    "run_chain",
    "empirical_distance",
    "ks_distance",
]

BLOCK = 2048
COINCIDENCE = 1e-14


@dataclass(frozen=True)
class GasConfig:
    n: int
    beta: float = 2.0
    sweeps: int = 10_000
    burn_in: int = 1_000
    step_scale: float = 0.5
    seed: int = 0
    barriers: Barriers = field(default_factory=Barriers)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if not self.beta > 0:
            raise ValueError("beta must be positive")
        if not self.sweeps > self.burn_in >= 0:
            raise ValueError("need sweeps > burn_in >= 0")
        if not self.step_scale > 0:
            raise ValueError("step_scale must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class ChainState:
    positions: np.ndarray  # sorted ascending
    log_weight: float


@dataclass(frozen=True)
class ChainRun:
    samples: np.ndarray  # (sweeps - burn_in, n), each row sorted
    acceptance_rate: float
    final_state: ChainState

    def __len__(self):
        return len(self.samples)


def log_weight(Q, config: GasConfig, positions) -> float:
    """Unnormalized log density of a configuration."""
    Q = as_polynomial(Q)
    x = np.asarray(positions, dtype=float)
    if x.shape != (config.n,):
        raise ValueError(f"expected {config.n} positions, got shape {x.shape}")
    b = config.barriers
    if np.any(x < b.sigma) or np.any(x > b.tau):
        raise ValueError("positions outside the barriers")
    conf = -config.n * config.beta / 2 * float(np.sum(Q(x)))
    diff = np.abs(x[:, None] - x[None, :])[np.triu_indices(config.n, 1)]
    if np.any(diff == 0):
        return -math.inf
    return conf + config.beta * float(np.sum(np.log(diff)))


def initial_positions(config: GasConfig) -> np.ndarray:
    """Evenly spaced start inside the barriers (a unit-scale window if unbounded)."""
    s, t = config.barriers.sigma, config.barriers.tau
    lo = s if math.isfinite(s) else min(-1.0, t - 2.0)
    hi = t if math.isfinite(t) else max(1.0, lo + 2.0)
    k = np.arange(config.n)
    return lo + (hi - lo) * (k + 0.5) / config.n


@njit(cache=True)
def _horner(coeffs, x):
    acc = 0.0
    for k in range(coeffs.shape[0] - 1, -1, -1):
        acc = acc * x + coeffs[k]
    return acc


@njit(cache=True)
def _run_block(pos, coeffs, conf_scale, beta, sigma, tau, steps, logu, out, row0, record_from):
    n = pos.shape[0]
    accepted = 0
    delta_total = 0.0
    for s in range(steps.shape[0]):
        for i in range(n):
            old = pos[i]
            new = old + steps[s, i]
            if new < sigma or new > tau:
                continue
            delta = -conf_scale * (_horner(coeffs, new) - _horner(coeffs, old))
            ok = True
            for j in range(n):
                if j == i:
                    continue
                dn = abs(new - pos[j])
                if dn < 1e-14:
                    ok = False
                    break
                delta += beta * (math.log(dn) - math.log(abs(old - pos[j])))
            if not ok:
                continue
            if logu[s, i] < delta:
                pos[i] = new
                accepted += 1
                delta_total += delta
        r = row0 + s - record_from
        if r >= 0:
            out[r, :] = np.sort(pos)
    return accepted, delta_total


def run_chain(Q, config: GasConfig, start: np.ndarray | None = None) -> ChainRun:
    """Single-site Metropolis chain; keeps the states after ``burn_in`` sweeps."""
    Q = as_polynomial(Q)
    coeffs = np.array(Q.coeffs if Q.coeffs else (0.0,), dtype=float)
    pos = (initial_positions(config) if start is None else np.array(start, dtype=float)).copy()
    lw = log_weight(Q, config, pos)
    if not math.isfinite(lw):
        raise ValueError("starting configuration has zero weight")
    rng = np.random.Generator(np.random.PCG64(config.seed))
    kept = config.sweeps - config.burn_in
    out = np.empty((kept, config.n))
    conf_scale = config.n * config.beta / 2
    sigma, tau = config.barriers.sigma, config.barriers.tau
    accepted = 0
    done = 0
    while done < config.sweeps:
        m = min(BLOCK, config.sweeps - done)
        steps = config.step_scale * (rng.random((m, config.n)) - 0.5)
        logu = np.log(rng.random((m, config.n)))
        acc, dlw = _run_block(pos, coeffs, conf_scale, config.beta, sigma, tau,
                              steps, logu, out, done, config.burn_in)
        accepted += acc
        lw += dlw
        done += m
    rate = accepted / (config.sweeps * config.n)
    return ChainRun(out, rate, ChainState(np.sort(pos), lw))


def ks_distance(points, cdf_fn) -> float:
    """Kolmogorov-Smirnov distance between the empirical CDF of ``points`` and ``cdf_fn``."""
    x = np.sort(np.asarray(points, dtype=float).ravel())
    if x.size == 0:
        raise ValueError("need at least one sample")
    f = np.asarray(cdf_fn(x), dtype=float)
    i = np.arange(1, x.size + 1)
    d_plus = np.max(i / x.size - f)
    d_minus = np.max(f - (i - 1) / x.size)
    return float(max(d_plus, d_minus))


def empirical_distance(samples, m: EquilibriumMeasure) -> float:
    """KS distance between all pooled eigenvalue samples and ``m``."""
    if isinstance(samples, ChainRun):
        samples = samples.samples
    return ks_distance(samples, lambda x: cdf(m, x))
