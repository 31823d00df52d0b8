import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm, solve_continuous_lyapunov
from scipy.special import roots_laguerre

from trendlab import DomainError, ModelParams, theory
from trendlab.errors import DegenerateSpectrum, QuadratureFailure, RegimeMismatch

from .conftest import P1, P2, P3, random_diffusive, valid_params

PATTERN = np.array([[1.0, -1.0], [-1.0, 1.0]])


def _literal_psi(params, s):
    # exp(sA) - v1 (1 1) int_0^s exp(tA) dt, with the integral from a block exponential
    a = theory.mean_replacement_matrix(params)
    block = np.zeros((4, 4))
    block[:2, :2] = a
    block[:2, 2:] = np.eye(2)
    e = expm(s * block)
    v1 = np.array(theory.limiting_proportions(params))
    return e[:2, :2] - np.outer(v1, np.ones(2)) @ e[:2, 2:]


def _sigma1_by_lyapunov(params):
    # the diffusive covariance solves (A - I/2) S + S (A - I/2)^T = -(B - v1 v1^T)
    a = theory.mean_replacement_matrix(params)
    v1 = np.array(theory.limiting_proportions(params))
    return solve_continuous_lyapunov(a - 0.5 * np.eye(2), -(theory.b_matrix(params) - np.outer(v1, v1)))


def test_replacement_matrix_p1():
    np.testing.assert_allclose(theory.mean_replacement_matrix(P1), [[0.4, 0.3], [0.6, 0.7]], atol=1e-15)


def test_frozen_sigma1_p1():
    assert theory.sigma1_scalar(P1) == pytest.approx(0.18 / 0.648, abs=1e-15)
    assert theory.sigma1_scalar(P1) == pytest.approx(0.277778, abs=5e-7)
    np.testing.assert_allclose(theory.sigma1_closed(P1), 0.18 / 0.648 * PATTERN, atol=1e-15)


def test_frozen_functional_p1():
    cov = theory.functional_covariance(P1, 0.5, 1.0)
    assert cov[0, 0] == pytest.approx(0.148857, abs=5e-7)
    np.testing.assert_allclose(cov, cov[0, 0] * PATTERN, atol=1e-15)


def test_frozen_critical():
    np.testing.assert_allclose(theory.sigma2_critical(P2), 0.25 * PATTERN, atol=1e-15)
    assert theory.functional_covariance(P2, 0.5, 1.0)[0, 0] == pytest.approx(0.125, abs=1e-15)


def test_elephant_formula_values():
    w = theory.elephant_w_moments(0.2)
    # direct evaluation with gamma(1.6), gamma(2.2), gamma(2.8) from tables
    assert w.m1 == pytest.approx(1 / (2 * 0.8935153493), abs=1e-9)
    assert w.m2 == pytest.approx(2.8 / (2 * 1.1018024908797128), abs=1e-12)
    assert w.m3 == pytest.approx(9.28 / (2 * 1.6764907877644364), abs=1e-12)
    assert w.m1 == pytest.approx(0.559594, abs=1e-5)
    assert w.m2 == pytest.approx(1.270645, abs=1e-6)
    with pytest.raises(DomainError):
        theory.elephant_w_moments(0.25)


def test_elephant_params_is_p3():
    assert theory.elephant_params(0.2, 0.6) == P3
    assert theory.elephant_params(0.2).lambda2 == pytest.approx(0.6)


def test_eigenstructure_p1():
    eig = theory.eigenstructure(P1)
    a = theory.mean_replacement_matrix(P1)
    np.testing.assert_allclose(a @ eig.v1, eig.v1, atol=1e-14)
    np.testing.assert_allclose(a @ eig.v2, 0.1 * eig.v2, atol=1e-14)
    np.testing.assert_allclose(eig.u2 @ a, 0.1 * eig.u2, atol=1e-14)


def test_degenerate_spectrum():
    with pytest.raises(DegenerateSpectrum):
        theory.eigenstructure(ModelParams(0.0, 1.0, 1.0, 0.0))


@pytest.mark.parametrize("s", [0.0, 0.3, 2.0, 10.0])
def test_psi_against_expm(s):
    np.testing.assert_allclose(theory.psi_A(P1, s), _literal_psi(P1, s), atol=1e-12)


def test_psi_large_s_stays_finite():
    assert np.all(np.isfinite(theory.psi_A(P1, 800.0)))
    with pytest.raises(DomainError):
        theory.psi_A(P1, -1.0)


@pytest.mark.parametrize("x", [0.0, 0.7, -1.3])
def test_expm_replacement_against_scipy(x):
    a = theory.mean_replacement_matrix(P1)
    np.testing.assert_allclose(theory.expm_replacement(P1, x), expm(x * a), atol=1e-13)
    np.testing.assert_allclose(theory.expm_replacement(P1, x, transpose=True), expm(x * a.T), atol=1e-13)


def test_laguerre_rule_matches_scipy_small_n():
    x, w = theory.laguerre_rule(32)
    xs, ws = roots_laguerre(32)
    # weights below ~1e-35 may come back as exact zeros and are dropped
    idx = np.searchsorted(xs, x - 1e-9)
    np.testing.assert_allclose(x, xs[idx], rtol=1e-12)
    np.testing.assert_allclose(w, ws[idx], rtol=1e-8, atol=1e-14)
    assert np.sum(w) == pytest.approx(1.0, abs=1e-14)
    assert np.sum(w * x) == pytest.approx(1.0, abs=1e-12)


def test_sigma1_integral_against_lyapunov():
    for p in [P1, ModelParams(0.5, 0.3, 0.2, 0.6), ModelParams(0.1, 0.8, 0.5, 0.0)]:
        np.testing.assert_allclose(theory.sigma1_integral(p), _sigma1_by_lyapunov(p), atol=1e-9)


def test_sigma1_integral_randomized():
    rng = np.random.default_rng(7)
    for p in random_diffusive(rng, 40):
        np.testing.assert_allclose(theory.sigma1_integral(p), theory.sigma1_closed(p), rtol=0, atol=1e-8)


def test_sigma1_integral_fails_loudly_near_critical():
    with pytest.raises(QuadratureFailure):
        theory.sigma1_integral(ModelParams(0.25, 0.499, 1.0, 0.0))


def test_regime_gates():
    with pytest.raises(RegimeMismatch):
        theory.sigma1_scalar(P2)
    with pytest.raises(RegimeMismatch):
        theory.sigma2_critical(P1)
    with pytest.raises(RegimeMismatch):
        theory.functional_covariance(P3, 0.5, 1.0)
    with pytest.raises(DomainError):
        theory.functional_covariance(P1, 1.0, 0.5)


def test_bhw_embedding():
    params, var = theory.bhw_embedding(0.75, 0.4)
    assert var == pytest.approx(0.48, abs=1e-15)
    assert theory.sigma1_scalar(params) == pytest.approx(var, abs=1e-12)
    assert theory.bhw_embedding(0.5, 0.4)[1] is None


@given(valid_params())
def test_eigen_biorthonormal(p):
    if abs(1 - p.lambda2) < 1e-6:
        return
    eig = theory.eigenstructure(p)
    np.testing.assert_allclose(eig.left @ eig.right, np.eye(2), atol=1e-9)
    np.testing.assert_allclose(eig.projector(1) + eig.projector(2), np.eye(2), atol=1e-9)


@given(valid_params())
def test_replacement_matrix_column_stochastic(p):
    a = theory.mean_replacement_matrix(p)
    np.testing.assert_allclose(a.sum(axis=0), [1.0, 1.0], atol=1e-12)
    assert np.trace(a) == pytest.approx(1 + p.lambda2, abs=1e-12)


@given(st.floats(0.5 + 1e-6, 1.0), st.floats(0.0, 1.0))
def test_heyde_identity(theta, p):
    params, var = theory.bhw_embedding(theta, p)
    if params.lambda2 < 0.5 - 1e-12:
        assert theory.sigma1_scalar(params) == pytest.approx(var, rel=1e-12, abs=1e-12)


@given(st.floats(0.0, 0.5))
def test_critical_routes(a):
    # lambda2 = 1/2 with b = 1/2, alpha = 1
    p = ModelParams(a, 0.5, 1.0, 0.0)
    np.testing.assert_allclose(theory.sigma2_critical(p), 2 * a * (1 - 2 * a) * PATTERN, atol=1e-12)


@settings(max_examples=50, deadline=None)
@given(valid_params(), st.floats(0.01, 1.0), st.floats(1.0, 4.0))
def test_functional_routes(p, s, ratio):
    if p.lambda2 < 0.5 - 1e-12 and abs(1 - p.lambda2) > 1e-6:
        cov = theory.functional_covariance(p, s, s * ratio)
        assert cov[0, 0] >= -1e-15
        np.testing.assert_allclose(theory.functional_covariance(p, s, s), s * theory.sigma1_closed(p), atol=1e-12)


@given(valid_params())
def test_covariances_have_pattern(p):
    if p.lambda2 < 0.45:
        sig = theory.sigma1_closed(p)
        np.testing.assert_allclose(sig, sig[0, 0] * PATTERN, atol=0)
        assert sig[0, 0] >= -1e-15
