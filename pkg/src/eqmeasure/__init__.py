"""Equilibrium measures of invariant random-matrix ensembles confined to an interval."""
from .edge_solver import (
    Barriers,
    EdgeCase,
    EdgeClassification,
    SolverError,
    classify,
    edge_ratio,
    phi,
    psi,
    solve_a_of_tau,
    solve_b_of_a,
    solve_free_edges,
)
from .measure import (
    EquilibriumMeasure,
    MeasureError,
    build_measure,
    cdf,
    density_at,
    energy,
    log_potential,
    robin_constant,
    stieltjes,
)
from .polycalc import Polynomial, WeightKind, derivative, divided_difference, integrate_weighted, weighted_moment
from .verify import DiagnosticsReport, compare_closed_form, run_diagnostics

__version__ = "0.1.0"
