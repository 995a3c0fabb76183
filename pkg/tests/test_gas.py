import math

import numpy as np
import pytest

from eqmeasure.edge_solver import Barriers
from eqmeasure.gas import (
    ChainRun,
    GasConfig,
    empirical_distance,
    initial_positions,
    ks_distance,
    log_weight,
    run_chain,
)
from eqmeasure.measure import build_measure, cdf
from eqmeasure.polycalc import Polynomial

GAUSS = Polynomial((0, 0, 1))
FLAT = Polynomial(())
HALF_LINE = Barriers(0.0, math.inf)


@pytest.fixture(scope="module")
def hard_soft():
    return build_measure(GAUSS, HALF_LINE)


def test_config_validation():
    with pytest.raises(ValueError):
        GasConfig(n=0)
    with pytest.raises(ValueError):
        GasConfig(n=2, beta=0)
    with pytest.raises(ValueError):
        GasConfig(n=2, sweeps=10, burn_in=10)
    with pytest.raises(ValueError):
        GasConfig(n=2, step_scale=0)
    with pytest.raises(ValueError):
        GasConfig(n=2, seed=-1)


@pytest.mark.parametrize(
    "Q, n, beta, pos, expected",
    [
        (GAUSS, 1, 2.0, [0.5], -0.25),
        (FLAT, 2, 2.0, [0.0, 1.0], 0.0),
        (GAUSS, 3, 1.0, [-1.0, 0.0, 1.0], -3 + math.log(2)),
    ],
)
def test_log_weight_examples(Q, n, beta, pos, expected):
    assert log_weight(Q, GasConfig(n=n, beta=beta), pos) == pytest.approx(expected, abs=1e-15)


def test_log_weight_coincident_and_outside():
    cfg = GasConfig(n=2, barriers=Barriers(0, 1))
    assert log_weight(GAUSS, cfg, [0.3, 0.3]) == -math.inf
    with pytest.raises(ValueError):
        log_weight(GAUSS, cfg, [0.3, 1.2])
    with pytest.raises(ValueError):
        log_weight(GAUSS, cfg, [0.3])


def test_initial_positions_inside_barriers():
    for bar in (Barriers(), HALF_LINE, Barriers(-math.inf, -3.0), Barriers(2, 2.5)):
        pos = initial_positions(GasConfig(n=5, barriers=bar))
        assert np.all(np.diff(pos) > 0)
        assert all(bar.contains(p) for p in pos)


def test_same_seed_same_stream():
    cfg = GasConfig(n=6, sweeps=3000, burn_in=100, seed=42, barriers=HALF_LINE)
    r1 = run_chain(GAUSS, cfg)
    r2 = run_chain(GAUSS, cfg)
    assert np.array_equal(r1.samples, r2.samples)
    assert r1.acceptance_rate == r2.acceptance_rate
    r3 = run_chain(GAUSS, GasConfig(n=6, sweeps=3000, burn_in=100, seed=43, barriers=HALF_LINE))
    assert not np.array_equal(r1.samples, r3.samples)


def test_chain_shape_and_sorting():
    cfg = GasConfig(n=5, sweeps=5000, burn_in=1234, seed=1)
    run = run_chain(GAUSS, cfg)
    assert isinstance(run, ChainRun)
    assert run.samples.shape == (5000 - 1234, 5) and len(run) == 5000 - 1234
    assert np.all(np.diff(run.samples, axis=1) > 0)


def test_barrier_enforced():
    run = run_chain(GAUSS, GasConfig(n=8, sweeps=6000, burn_in=0, step_scale=1.0, seed=3, barriers=HALF_LINE))
    assert run.samples.min() >= 0.0
    run = run_chain(GAUSS, GasConfig(n=4, sweeps=6000, burn_in=0, seed=3, barriers=Barriers(-0.5, 0.5)))
    assert run.samples.min() >= -0.5 and run.samples.max() <= 0.5


def test_cached_log_weight_consistent():
    cfg = GasConfig(n=8, sweeps=8000, burn_in=0, seed=9, barriers=HALF_LINE)
    run = run_chain(GAUSS, cfg)
    st = run.final_state
    assert st.log_weight == pytest.approx(log_weight(GAUSS, cfg, st.positions), abs=1e-9)


def test_acceptance_rate_calibration():
    run = run_chain(GAUSS, GasConfig(n=8, sweeps=20000, burn_in=1000, step_scale=0.5, seed=0, barriers=HALF_LINE))
    assert 0.2 <= run.acceptance_rate <= 0.7


def test_ks_single_sample_at_median():
    m = build_measure(GAUSS, Barriers())
    assert ks_distance([0.0], lambda x: cdf(m, x)) == pytest.approx(0.5, abs=1e-14)


def test_ks_rejects_empty():
    with pytest.raises(ValueError):
        ks_distance([], lambda x: x)


def test_ks_matches_scipy():
    from scipy.stats import kstest

    pts = np.random.default_rng(0).normal(size=500)
    from scipy.stats import norm

    assert ks_distance(pts, norm.cdf) == pytest.approx(kstest(pts, "norm").statistic, abs=1e-14)


def test_ks_inverse_cdf_samples(hard_soft):
    grid = np.linspace(hard_soft.a, hard_soft.b, 200001)
    u = np.random.default_rng(2024).random(100_000)
    draws = np.interp(u, cdf(hard_soft, grid), grid)
    assert empirical_distance(draws, hard_soft) <= 0.01


def test_empirical_distance_accepts_run(hard_soft):
    run = run_chain(GAUSS, GasConfig(n=8, sweeps=4000, burn_in=500, seed=5, barriers=HALF_LINE))
    assert empirical_distance(run, hard_soft) == empirical_distance(run.samples, hard_soft)


def _marginal_bin_mass(edges):
    # one-particle marginal of |x - y|**2 on [0, 1]**2 is 6 (x**2 - x + 1/3)
    F = 6 * (edges**3 / 3 - edges**2 / 2 + edges / 3)
    return np.diff(F)


def test_detailed_balance_two_particles():
    cfg = GasConfig(n=2, beta=2.0, sweeps=2_002_000, burn_in=2_000, step_scale=0.6, seed=21, barriers=Barriers(0, 1))
    run = run_chain(FLAT, cfg)
    edges = np.linspace(0, 1, 21)
    expected = _marginal_bin_mass(edges)
    batches = run.samples.reshape(100, -1, 2)
    freq = np.array([np.histogram(b.ravel(), bins=edges)[0] / b.size for b in batches])
    mean = freq.mean(axis=0)
    se = freq.std(axis=0, ddof=1) / math.sqrt(len(batches))
    assert np.all(np.abs(mean - expected) <= 3 * se)


def test_ks_reasonable_at_n8(hard_soft):
    cfg = GasConfig(n=8, sweeps=51_000, burn_in=1_000, step_scale=0.5, seed=0, barriers=HALF_LINE)
    assert empirical_distance(run_chain(GAUSS, cfg), hard_soft) <= 0.05


def _median_ks(n, m, seeds=range(5), kept=30_000):
    vals = []
    for seed in seeds:
        cfg = GasConfig(n=n, sweeps=kept + 1_000, burn_in=1_000, step_scale=4.0 / n, seed=seed, barriers=HALF_LINE)
        vals.append(empirical_distance(run_chain(GAUSS, cfg), m))
    return float(np.median(vals))


def test_ks_decreases_with_n(hard_soft):
    meds = [_median_ks(n, hard_soft) for n in (4, 8, 16)]
    assert meds[0] > meds[1] > meds[2]


def test_beta_independence(hard_soft):
    for beta in (1.0, 2.0, 4.0):
        cfg = GasConfig(n=16, beta=beta, sweeps=31_000, burn_in=1_000, step_scale=0.25, seed=7, barriers=HALF_LINE)
        assert empirical_distance(run_chain(GAUSS, cfg), hard_soft) <= 0.05 * 1.5
