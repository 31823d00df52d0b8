import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import binom

from trendlab import ModelParams, exact_distribution, exact_moments, monte_carlo, stats
from trendlab.errors import DomainError, ResourceLimit
from trendlab.oracle import cross_moment, mean_variance_path

from .conftest import P1, P3, valid_params


def _enumerate_paths(params, n):
    """Exact law of every path prefix by brute force over all 2^n choice sequences."""
    a, lam = Fraction(params.a), Fraction(params.lambda2)
    paths = []
    for choices in itertools.product((0, 1), repeat=n):
        prob, count, counts = Fraction(1), params.n0, [params.n0]
        for j, x in enumerate(choices):
            q = a + lam * Fraction(count, params.seeders + j)
            prob *= q if x else 1 - q
            count += x
            counts.append(count)
        paths.append((prob, counts))
    return paths


@pytest.mark.parametrize("params", [P1, P3, ModelParams(0.5, 0.3, 0.2, 0.6, 2, 3)])
def test_dp_matches_path_enumeration(params):
    n = 10
    paths = _enumerate_paths(params, n)
    law = {}
    for prob, counts in paths:
        law[counts[-1]] = law.get(counts[-1], 0) + prob
    dist = exact_distribution(params, n)
    for k in dist.support:
        assert dist.prob(int(k)) == pytest.approx(float(law.get(int(k), 0)), abs=1e-16)


def test_cross_moment_matches_enumeration():
    n, early = 10, 4
    paths = _enumerate_paths(P1, n)
    c1, c2 = 2.3, 4.1
    expected = sum(float(p) * (c[early] - c1) * (c[n] - c2) for p, c in paths)
    assert cross_moment(P1, early, n, c1, c2) == pytest.approx(expected, abs=1e-13)


def test_binomial_reduction():
    p = ModelParams(0.37, 0.0, 0.0, 0.0)
    dist = exact_distribution(p, 200)
    np.testing.assert_allclose(dist.pmf, binom.pmf(np.arange(201), 200, 0.37), atol=1e-14)


def test_pmf_normalised_and_supported():
    dist = exact_distribution(P3, 2000)
    assert math.fsum(dist.pmf) == pytest.approx(1.0, abs=1e-13)
    assert dist.support[0] == 1 and dist.support[-1] == 2001
    assert dist.prob(0) == 0.0
    assert sum(dist.as_dict().values()) == pytest.approx(1.0, abs=1e-13)


def test_exact_moments_against_recursion():
    mom = exact_moments(P3, 1500)
    mean, var = mean_variance_path(P3, [1500])[1500]
    assert mom.mean == pytest.approx(mean, rel=1e-13)
    assert mom.variance == pytest.approx(var, rel=1e-11)


@settings(max_examples=40, deadline=None)
@given(valid_params(), st.integers(0, 120))
def test_mean_recursion_vs_dp(params, n):
    mean, var = mean_variance_path(params, [n])[n]
    mom = exact_moments(params, n, order=2)
    assert mom.mean == pytest.approx(mean, rel=1e-12, abs=1e-12)
    assert mom.variance == pytest.approx(var, rel=1e-9, abs=1e-10)


def test_scaled_moments():
    dist = exact_distribution(P1, 30)
    m1, m2 = dist.scaled_moments(10.0, 2.0, orders=(1, 2))
    mean = dist.expect(dist.support)
    assert m1 == pytest.approx((mean - 10.0) / 2.0, abs=1e-14)
    assert m2 == pytest.approx(dist.expect(((dist.support - 10.0) / 2.0) ** 2), abs=1e-14)


def test_monte_carlo_matches_exact_distribution():
    ens = monte_carlo(P1, 30, [30], 200000, seed=2024)
    dist = exact_distribution(P1, 30)
    # TV of 2e5 draws on 31 cells is around 0.005
    assert stats.total_variation(ens.at(30), dist) < 0.012


def test_limits():
    with pytest.raises(ResourceLimit):
        exact_distribution(P1, 10, cap=5)
    with pytest.raises(DomainError):
        exact_distribution(P1, -1)
    with pytest.raises(DomainError):
        exact_moments(P1, 5, order=5)
    with pytest.raises(DomainError):
        cross_moment(P1, 5, 3, 0.0, 0.0)
