import math

import numpy as np
import pytest

from eqmeasure.edge_solver import Barriers, EdgeCase, EdgeClassification, classify, phi, solve_b_of_a
from eqmeasure.measure import (
    MeasureError,
    build_measure,
    cdf,
    density_at,
    energy,
    log_potential,
    mass,
    measure_from_classification,
    robin_constant,
    robin_probes,
    stieltjes,
    weight_polynomial,
)
from eqmeasure.polycalc import Polynomial, derivative

from oracles import ALG

R2 = math.sqrt(2)
B0 = 2 * math.sqrt(6) / 3
GAUSS = Polynomial((0, 0, 1))
QUARTIC = Polynomial((0, 0, 0, 0, 1))
GENERAL_QUARTIC = Polynomial((0, -0.5, 1, 0.2, 1))
ROBIN_WIGNER = (1 + math.log(2)) / 2

CONFIGS = [
    (GAUSS, Barriers()),
    (GAUSS, Barriers(0, math.inf)),
    (GAUSS, Barriers(-math.inf, 0.3)),
    (GAUSS, Barriers(-1, 1)),
    (QUARTIC, Barriers()),
    (QUARTIC, Barriers(-0.5, math.inf)),
    (GENERAL_QUARTIC, Barriers(-0.4, 0.6)),
    (GENERAL_QUARTIC, Barriers(-math.inf, 0.2)),
]


@pytest.fixture(scope="module")
def wigner():
    return build_measure(GAUSS, Barriers())


@pytest.fixture(scope="module")
def hard_soft():
    return build_measure(GAUSS, Barriers(0, math.inf))


@pytest.fixture(scope="module")
def hard_hard():
    return build_measure(GAUSS, Barriers(-1, 1))


def _density_oracle(m):
    # independent quadrature of the density against its edge weight
    from scipy.integrate import quad

    kind = m.density_kind.value

    def integral(f):
        re, _ = quad(lambda t: f(t) * m.weight_poly(t) / math.pi, m.a, m.b,
                     weight="alg", wvar=ALG[kind], epsabs=1e-13, epsrel=1e-12, limit=200)
        return re

    return integral


# --- construction -----------------------------------------------------------------

def test_wigner_weight_and_density(wigner):
    assert wigner.case is EdgeCase.SOFT_SOFT
    assert wigner.weight_poly.allclose(Polynomial((1.0,)), atol=1e-13)
    assert density_at(wigner, 0.0) == pytest.approx(R2 / math.pi, rel=1e-13)
    x = np.linspace(-1.4, 1.4, 29)
    assert np.allclose(density_at(wigner, x), np.sqrt(2 - x * x) / math.pi, atol=1e-13)


def test_semicircle_recovered_from_hard_hard():
    cls = EdgeClassification(EdgeCase.HARD_HARD, -R2, R2)
    m = measure_from_classification(GAUSS, cls)
    assert m.weight_poly.allclose(Polynomial((2.0, 0.0, -1.0)), atol=1e-12)


def test_hard_soft_weight(hard_soft):
    assert hard_soft.case is EdgeCase.HARD_SOFT
    assert hard_soft.b == pytest.approx(B0, abs=1e-13)
    assert hard_soft.weight_poly.allclose(Polynomial((B0 / 2, 1.0)), atol=1e-12)
    x = np.linspace(0.01, B0 - 0.01, 50)
    expected = np.sqrt((B0 - x) / x) * (2 * x + B0) / (2 * math.pi)
    assert np.allclose(density_at(hard_soft, x), expected, rtol=1e-12, atol=0)


def test_hard_hard_weight(hard_hard):
    assert hard_hard.weight_poly.allclose(Polynomial((1.5, 0.0, -1.0)), atol=1e-12)
    assert density_at(hard_hard, 0.0) == pytest.approx(1.5 / math.pi, rel=1e-13)


def test_soft_hard_is_mirror_of_hard_soft(hard_soft):
    m = build_measure(GAUSS, Barriers(-math.inf, 0))
    assert m.case is EdgeCase.SOFT_HARD
    x = np.linspace(0.02, B0 - 0.02, 40)
    assert np.allclose(density_at(m, -x), density_at(hard_soft, x), atol=1e-12)
    assert np.all(m.weight_poly(-x) > 0)


@pytest.mark.parametrize("Q, bar", CONFIGS)
def test_weight_degree(Q, bar):
    m = build_measure(Q, bar)
    extra = {EdgeCase.SOFT_SOFT: -2, EdgeCase.HARD_SOFT: -1, EdgeCase.SOFT_HARD: -1, EdgeCase.HARD_HARD: 0}
    assert m.weight_poly.degree == Q.degree + extra[m.case]


@pytest.mark.parametrize("Q, bar", CONFIGS)
def test_unit_mass_and_positivity(Q, bar):
    m = build_measure(Q, bar)
    assert abs(mass(m) - 1) <= 1e-10
    x = np.linspace(m.a, m.b, 1000)[1:-1]
    assert np.min(density_at(m, x)) >= -1e-12
    assert _density_oracle(m)(lambda t: 1.0) == pytest.approx(1.0, abs=1e-10)


def test_density_outside_and_at_edges(hard_soft, hard_hard, wigner):
    assert density_at(hard_soft, -0.1) == 0.0
    assert density_at(hard_soft, B0 + 0.1) == 0.0
    assert density_at(hard_soft, 0.0) == math.inf
    assert density_at(hard_soft, hard_soft.b) == 0.0
    assert density_at(hard_hard, -1.0) == math.inf and density_at(hard_hard, 1.0) == math.inf
    assert density_at(wigner, R2) == 0.0
    assert density_at(wigner, 5.0) == 0.0


def test_negative_density_is_rejected():
    with pytest.raises(MeasureError):
        measure_from_classification(GAUSS, EdgeClassification(EdgeCase.HARD_SOFT, -1.0, 0.5))


# --- factorization identities -------------------------------------------------------

@pytest.mark.parametrize("Q, sigma", [(GAUSS, 0.0), (GAUSS, -0.8), (QUARTIC, -0.5), (GENERAL_QUARTIC, 0.1)])
def test_hard_soft_factorization(Q, sigma):
    b = solve_b_of_a(Q, sigma)
    p = weight_polynomial(Q, EdgeClassification(EdgeCase.HARD_SOFT, sigma, b))
    q = weight_polynomial(Q, EdgeClassification(EdgeCase.SOFT_SOFT, sigma, b))
    rebuilt = Polynomial((p(sigma),)) + Polynomial((-sigma, 1.0)) * q
    assert p.allclose(rebuilt, atol=1e-10)
    assert p(sigma) == pytest.approx(phi(Q, sigma, b) / (2 * math.pi), abs=1e-10)


@pytest.mark.parametrize("Q, sigma, tau", [(GAUSS, -1.0, 1.0), (GAUSS, 0.0, 1.2), (QUARTIC, -0.5, 0.7),
                                           (GENERAL_QUARTIC, -0.4, 0.6)])
def test_hard_hard_factorization(Q, sigma, tau):
    r = weight_polynomial(Q, EdgeClassification(EdgeCase.HARD_HARD, sigma, tau))
    p = weight_polynomial(Q, EdgeClassification(EdgeCase.HARD_SOFT, sigma, tau))
    rebuilt = Polynomial((r(tau),)) + Polynomial((tau, -1.0)) * p
    assert r.allclose(rebuilt, atol=1e-10)


def test_transition_continuity(hard_soft):
    b = hard_soft.b
    sups = []
    r_tau = []
    for eps in (1e-2, 1e-3, 1e-4):
        tau = b - eps
        hh = build_measure(GAUSS, Barriers(0.0, tau))
        assert hh.case is EdgeCase.HARD_HARD
        x = np.linspace(0.01 * tau, 0.99 * tau, 1000)
        sups.append(float(np.max(np.abs(density_at(hh, x) - density_at(hard_soft, x)))))
        r_tau.append(hh.weight_poly(tau))
    assert sups[-1] <= 1e-2
    assert sups[0] > sups[1] > sups[2]
    assert r_tau[0] / r_tau[1] == pytest.approx(10, rel=0.2)
    assert r_tau[1] / r_tau[2] == pytest.approx(10, rel=0.2)


# --- cdf ------------------------------------------------------------------------------

def test_cdf_examples(wigner, hard_soft):
    assert cdf(wigner, -2.0) == 0.0 and cdf(wigner, 2.0) == 1.0
    assert cdf(wigner, 0.0) == pytest.approx(0.5, abs=1e-14)
    assert cdf(hard_soft, hard_soft.b) == 1.0
    assert cdf(hard_soft, 0.0) == 0.0


@pytest.mark.parametrize("Q, bar", CONFIGS[:5])
def test_cdf_matches_density_integral(Q, bar):
    m = build_measure(Q, bar)
    integral = _density_oracle(m)
    for frac in (0.1, 0.37, 0.8):
        x = m.a + frac * (m.b - m.a)
        assert cdf(m, x) == pytest.approx(integral(lambda t: float(t <= x)), abs=1e-7)


def test_cdf_is_monotone(hard_hard):
    x = np.linspace(-1.2, 1.2, 500)
    assert np.all(np.diff(cdf(hard_hard, x)) >= 0)


def test_cdf_wigner_closed_form(wigner):
    x = np.linspace(-1.3, 1.3, 11)
    s = x / R2
    exact = 0.5 + (np.arcsin(s) + s * np.sqrt(1 - s * s)) / math.pi
    assert np.allclose(cdf(wigner, x), exact, atol=1e-14)


# --- Stieltjes transform ----------------------------------------------------------------

def test_stieltjes_wigner(wigner):
    assert stieltjes(wigner, 10).real == pytest.approx(10 - math.sqrt(98), abs=1e-12)
    g = stieltjes(wigner, 1j)
    assert abs(g.real) < 1e-14
    assert g.imag == pytest.approx(1 - math.sqrt(3), abs=1e-10)


@pytest.mark.parametrize("Q, bar", CONFIGS)
def test_stieltjes_decay(Q, bar):
    m = build_measure(Q, bar)
    z = 1e8
    assert abs(z * stieltjes(m, z) - 1) <= 1e-6


def test_stieltjes_rejects_support(wigner):
    with pytest.raises(ValueError):
        stieltjes(wigner, 0.3)


def test_stieltjes_closed_forms(hard_soft, hard_hard):
    # G(z) = Q'(z)/2 + (edge-factor form of the weight), continued off the support
    for z in (3.0, -0.5 + 0.7j, 0.4 - 2j):
        zc = complex(z)
        hs = zc - hard_soft.weight_poly(zc) * np.sqrt(zc - B0) / np.sqrt(zc)
        assert stieltjes(hard_soft, zc) == pytest.approx(hs, abs=1e-10)
        hh = zc + hard_hard.weight_poly(zc) / (np.sqrt(zc - 1) * np.sqrt(zc + 1))
        assert stieltjes(hard_hard, zc) == pytest.approx(hh, abs=1e-10)


@pytest.mark.parametrize("Q, bar", CONFIGS[4:])
def test_stieltjes_against_quadrature(Q, bar):
    m = build_measure(Q, bar)
    integral = _density_oracle(m)
    z = complex(m.b + 0.5, 0.3)
    re = integral(lambda t: ((z - t) ** -1).real)
    im = integral(lambda t: ((z - t) ** -1).imag)
    assert stieltjes(m, z) == pytest.approx(complex(re, im), abs=1e-10)


# --- potential, Robin constant, energy ------------------------------------------------------

def test_log_potential_wigner_center(wigner):
    assert log_potential(wigner, 0.0) == pytest.approx(ROBIN_WIGNER, abs=1e-9)
    assert robin_constant(wigner) == pytest.approx(ROBIN_WIGNER, abs=1e-9)


def test_log_potential_far_field(hard_soft):
    for x in (1e3, -1e4, 1e6):
        mean = _density_oracle(hard_soft)(lambda t: t)
        assert abs(log_potential(hard_soft, x) + math.log(abs(x))) <= 2 * abs(mean) / abs(x)


def test_log_potential_symmetry():
    m = build_measure(QUARTIC, Barriers(-0.9, 0.9))
    for x in (0.1, 0.5, 0.85, 1.7):
        assert log_potential(m, x) == pytest.approx(log_potential(m, -x), abs=1e-9)


@pytest.mark.parametrize("Q, bar", CONFIGS[:5])
def test_log_potential_against_quadrature(Q, bar):
    m = build_measure(Q, bar)
    from scipy.integrate import quad

    x = m.a + 0.3 * (m.b - m.a)
    kind = m.density_kind.value
    parts = 0.0
    for lo, hi in ((m.a, x), (x, m.b)):
        f = lambda t: -math.log(abs(x - t)) * m.weight_poly(t) / math.pi * (
            (t - m.a) ** ALG[kind][0] * (m.b - t) ** ALG[kind][1])
        val, _ = quad(f, lo, hi, limit=400, epsabs=1e-12, epsrel=1e-12)
        parts += val
    assert log_potential(m, x) == pytest.approx(parts, abs=1e-8)


@pytest.mark.parametrize("Q, bar", CONFIGS)
def test_euler_lagrange_equality(Q, bar):
    m = build_measure(Q, bar)
    L = m.b - m.a
    dq = derivative(Q)
    h = 1e-5 * L
    for x in np.linspace(m.a + 0.05 * L, m.b - 0.05 * L, 20):
        du = (log_potential(m, x + h) - log_potential(m, x - h)) / (2 * h)
        assert -du == pytest.approx(dq(x) / 2, abs=1e-5)


def test_euler_lagrange_inequality_hard_soft(hard_soft):
    c = robin_constant(hard_soft)
    x = np.linspace(hard_soft.b, hard_soft.b + 3, 201)[1:]
    vals = [2 * log_potential(hard_soft, t) + GAUSS(t) - 2 * c for t in x]
    assert min(vals) >= -1e-8


def test_robin_probes_agree(hard_soft):
    assert np.ptp(robin_probes(hard_soft)) <= 1e-6


def test_robin_detects_wrong_measure():
    m = measure_from_classification(GAUSS, EdgeClassification(EdgeCase.SOFT_SOFT, -0.5, 1.5), check=False)
    with pytest.raises(MeasureError):
        robin_constant(m)


def test_energy_wigner(wigner):
    assert energy(wigner) == pytest.approx(ROBIN_WIGNER + 0.25, abs=1e-9)


@pytest.mark.parametrize("bar", [Barriers(), Barriers(0, math.inf), Barriers(-1, 1)])
def test_constant_shift(bar):
    c = 0.75
    m0 = build_measure(GAUSS, bar)
    m1 = build_measure(GAUSS + Polynomial((c,)), bar)
    assert robin_constant(m1) == pytest.approx(robin_constant(m0) + c / 2, abs=1e-9)
    assert energy(m1) == pytest.approx(energy(m0) + c, abs=1e-9)


def test_constrained_energy_exceeds_free(wigner, hard_hard, hard_soft):
    assert energy(hard_hard) > energy(wigner)
    assert energy(hard_soft) > energy(wigner)


def test_classification_round_trip():
    cls = classify(GAUSS, Barriers(-1, 1))
    m = measure_from_classification(GAUSS, cls)
    assert m.barriers == Barriers(-1, 1)
