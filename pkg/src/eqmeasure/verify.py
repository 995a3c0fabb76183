"""Diagnostics for a constructed equilibrium measure.

Each check quantifies one defining property of the measure: unit mass,
nonnegativity, the Euler-Lagrange equality on the support and inequality off
it, the ``z G(z) -> 1`` decay and constancy of the Robin probes.  Failures are
reported in the returned :class:`DiagnosticsReport`, never raised.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np

from .measure import (
    EquilibriumMeasure,
    density_at,
    log_potential,
    mass,
    robin_probes,
    stieltjes,
)
from .polycalc import derivative

__all__ = ["DiagnosticsReport", "DEFAULT_TOLERANCES", "run_diagnostics", "compare_closed_form"]

DEFAULT_TOLERANCES = {
    "mass": 1e-10,
    "min_density": 1e-12,          # allowed negativity
    "euler_lagrange_equality": 1e-5,
    "euler_lagrange_inequality": 1e-8,  # allowed negativity
    "stieltjes_decay": 1e-6,
    "robin_spread": 1e-6,
}

N_DENSITY_GRID = 1000
N_EL_PROBES = 20
EL_WINDOW = 3.0
N_EL_INEQ = 200
DECAY_Z = 1e8


@dataclass(frozen=True)
class DiagnosticsReport:
    mass_error: float
    min_density: float
    euler_lagrange_equality_error: float
    euler_lagrange_inequality_margin: float
    stieltjes_decay_error: float
    robin_spread: float
    passed: bool

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def _interior_grid(m: EquilibriumMeasure, n: int, margin: float = 0.0) -> np.ndarray:
    length = m.b - m.a
    lo = m.a + (margin * length if m.case.hard_left else 0.0)
    hi = m.b - (margin * length if m.case.hard_right else 0.0)
    return np.linspace(lo, hi, n + 2)[1:-1]


def _el_equality_error(m: EquilibriumMeasure) -> float:
    length = m.b - m.a
    probes = m.a + length * np.linspace(0.05, 0.95, N_EL_PROBES)
    step = 1e-5 * length
    dQ = derivative(m.potential)
    err = 0.0
    for x in probes:
        dU = (log_potential(m, x + step) - log_potential(m, x - step)) / (2 * step)
        err = max(err, abs(-dU - 0.5 * dQ(x)))
    return err


def _el_inequality_margin(m: EquilibriumMeasure, robin: float) -> float:
    # most negative 2U + Q - 2C on the part of the barriers outside the support
    sigma, tau = m.barriers.sigma, m.barriers.tau
    pts = []
    if m.b < tau:
        hi = min(tau, m.b + EL_WINDOW)
        pts.append(np.linspace(m.b, hi, N_EL_INEQ + 1)[1:])
    if m.a > sigma:
        lo = max(sigma, m.a - EL_WINDOW)
        pts.append(np.linspace(lo, m.a, N_EL_INEQ + 1)[:-1])
    if not pts:
        return 0.0
    xs = np.concatenate(pts)
    vals = [2 * log_potential(m, x) + m.potential(x) - 2 * robin for x in xs]
    return float(min(vals))


def run_diagnostics(m: EquilibriumMeasure, tolerances: Mapping[str, float] | None = None) -> DiagnosticsReport:
    tol = dict(DEFAULT_TOLERANCES)
    if tolerances:
        unknown = set(tolerances) - set(tol)
        if unknown:
            raise KeyError(f"unknown tolerance names: {sorted(unknown)}")
        tol.update(tolerances)

    mass_error = abs(mass(m) - 1.0)
    min_density = float(np.min(density_at(m, _interior_grid(m, N_DENSITY_GRID))))
    el_eq = _el_equality_error(m)
    probes = robin_probes(m)
    robin_spread = float(np.ptp(probes))
    el_ineq = _el_inequality_margin(m, float(probes[0]))
    z = 0.5 * (m.a + m.b) + DECAY_Z
    decay = abs(z * stieltjes(m, z) - 1.0)

    passed = (
        mass_error <= tol["mass"]
        and min_density >= -tol["min_density"]
        and el_eq <= tol["euler_lagrange_equality"]
        and el_ineq >= -tol["euler_lagrange_inequality"]
        and decay <= tol["stieltjes_decay"]
        and robin_spread <= tol["robin_spread"]
    )
    return DiagnosticsReport(
        mass_error=float(mass_error),
        min_density=min_density,
        euler_lagrange_equality_error=float(el_eq),
        euler_lagrange_inequality_margin=el_ineq,
        stieltjes_decay_error=float(decay),
        robin_spread=robin_spread,
        passed=bool(passed),
    )


def compare_closed_form(m: EquilibriumMeasure, oracle_density: Callable[[float], float],
                        grid_size: int = 1000) -> float:
    """Sup-norm gap between ``m`` and ``oracle_density`` on an interior grid.

    Hard edges are cut back by 1% of the support length; both densities
    diverge there.
    """
    xs = _interior_grid(m, grid_size, margin=0.01)
    ours = density_at(m, xs)
    ref = np.array([oracle_density(x) for x in xs], dtype=float)
    return float(np.max(np.abs(ours - ref)))
