import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats as sps

from trendlab import exact_distribution, monte_carlo, stats
from trendlab.errors import DomainError, RegimeMismatch
from trendlab.oracle import cross_moment, mean_variance_path

from .conftest import P1, P2, P3


def test_fluctuation_scales():
    assert stats.fluctuation_scale(P1, 100) == 10.0
    assert stats.fluctuation_scale(P2, 100) == pytest.approx(math.sqrt(100 * math.log(100)))
    assert stats.fluctuation_scale(P3, 32) == pytest.approx(32**0.6)
    with pytest.raises(DomainError):
        stats.fluctuation_scale(P2, 1)
    with pytest.raises(DomainError):
        stats.fluctuation_scale(P1, 0)


@given(st.floats(0.1, 100.0), st.floats(-3.0, 3.0))
def test_scaling_exponent_exact_power_law(c, k):
    n = np.array([16, 64, 256, 1024, 4096], dtype=float)
    fit = stats.estimate_scaling_exponent(n, c * n**k)
    assert fit.slope == pytest.approx(k, abs=1e-9)
    assert fit.local_slope == pytest.approx(k, abs=1e-9)
    np.testing.assert_allclose(fit.predict(n), c * n**k, rtol=1e-8)


def test_scaling_exponent_pairs_and_errors():
    pairs = [(2, 2.0), (4, 4.0), (8, 8.0), (16, 16.0)]
    assert stats.estimate_scaling_exponent(pairs).slope == pytest.approx(1.0)
    with pytest.raises(DomainError):
        stats.estimate_scaling_exponent([1, 2, 3], [1, 2, 3])
    with pytest.raises(DomainError):
        stats.estimate_scaling_exponent([1, 2, 2, 3], [1, 2, 3, 4])
    with pytest.raises(DomainError):
        stats.estimate_scaling_exponent([1, 2, 3, 4], [1, 0, 3, 4])


def test_moment_diagnostics_against_scipy():
    x = np.random.default_rng(0).gamma(2.0, size=5000)
    d = stats.moment_diagnostics(x)
    assert d.mean == pytest.approx(x.mean())
    assert d.variance == pytest.approx(np.var(x, ddof=1))
    assert d.skewness == pytest.approx(sps.skew(x))
    assert d.excess_kurtosis == pytest.approx(sps.kurtosis(x))
    assert d.raw[1] == pytest.approx(np.mean(x**2))
    assert not d.looks_normal


def test_normal_sample_looks_normal():
    x = np.random.default_rng(1).standard_normal(20000)
    assert stats.normality_diagnostics(x).looks_normal


def test_degenerate_sample():
    d = stats.moment_diagnostics(np.ones(10))
    assert d.degenerate and not d.looks_normal
    with pytest.raises(DomainError):
        stats.moment_diagnostics([1.0])


def test_scaled_sample_and_duality():
    ens = monte_carlo(P1, 400, [100, 400], 500, seed=8)
    s = stats.scaled_sample(ens, 400)
    assert s.center == pytest.approx(400 / 3)
    np.testing.assert_allclose(s.values, (ens.at(400) - 400 / 3) / 20.0)
    m = ens.m_counts[ens.index(400)]
    # M fluctuation about n p_B, up to the seeders' deterministic offset
    np.testing.assert_allclose(s.m_values, (m - 400 * 2 / 3 - P1.seeders) / 20.0, atol=1e-12)
    assert len(stats.scale_ensemble(ens)) == 2


def test_empirical_covariance_against_exact_finite_n():
    n = 400
    ens = monte_carlo(P1, n, [200, 400], 20000, seed=12)
    est = stats.empirical_covariance(ens, 0.5, 1.0, n)
    exact = cross_moment(P1, 200, 400, 200 / 3, 400 / 3) / n
    assert est[0, 0] == pytest.approx(exact, rel=0.05)
    np.testing.assert_allclose(est, est[0, 0] * np.array([[1, -1], [-1, 1]]))


def test_critical_functional_steps():
    assert stats.functional_steps(P2, (0.5, 1.0), 10**4) == [100, 10000]
    assert stats.functional_steps(P1, (0.5, 1.0), 10**4) == [5000, 10000]


def test_regime_gates():
    ens = monte_carlo(P3, 50, [50], 10)
    with pytest.raises(RegimeMismatch):
        stats.empirical_covariance(ens, 0.5, 1.0, 50)
    with pytest.raises(RegimeMismatch):
        stats.superdiffusive_moments(monte_carlo(P1, 50, [50], 10))
    assert stats.superdiffusive_moments(ens).count == 10


def test_terminal_proportions_and_tv():
    ens = monte_carlo(P1, 40, [40], 1000, seed=2)
    props = stats.terminal_proportions(ens)
    assert np.all((props > 0) & (props < 1))
    dist = exact_distribution(P1, 40)
    assert 0 <= stats.total_variation(ens.at(40), dist) < 0.1
    with pytest.raises(DomainError):
        stats.total_variation([0], dist)


def test_scaled_variance_tracks_exact_variance():
    n = 2000
    mean, var = mean_variance_path(P1, [n])[n]
    ens = monte_carlo(P1, n, [n], 4000, seed=5)
    assert np.var(ens.at(n), ddof=1) == pytest.approx(var, rel=0.08)
