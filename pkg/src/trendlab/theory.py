"""Limit quantities of the two-colour urn behind the random-trend model.

The model is a generalized Polya urn whose mean replacement matrix is

    A = [[a + lambda2, a], [1 - a - lambda2, 1 - a]],

column-stochastic with spectrum {1, lambda2}.  Everything here is a function
of ``ModelParams`` only; matrices are plain 2x2 ``numpy`` arrays.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import DegenerateSpectrum, DomainError, QuadratureFailure, RegimeMismatch
from .model import ModelParams, Regime, classify_regime, limiting_proportions, validate_params

__all__ = [
    "EigenStructure",
    "WMoments",
    "FLUCTUATION_PATTERN",
    "mean_replacement_matrix",
    "eigenstructure",
    "b_matrix",
    "expm_replacement",
    "psi_A",
    "sigma1_scalar",
    "sigma1_closed",
    "sigma1_integral",
    "sigma2_scalar",
    "sigma2_critical",
    "critical_centering",
    "functional_covariance",
    "elephant_w_moments",
    "elephant_params",
    "bhw_embedding",
    "laguerre_rule",
]

#: Every limiting covariance is a scalar multiple of this matrix.
FLUCTUATION_PATTERN = np.array([[1.0, -1.0], [-1.0, 1.0]])
FLUCTUATION_PATTERN.setflags(write=False)

_ONES = np.ones(2)


def _pattern(scale):
    return scale * FLUCTUATION_PATTERN


def mean_replacement_matrix(params: ModelParams) -> np.ndarray:
    a, lam = params.a, params.lambda2
    return np.array([[a + lam, a], [1.0 - a - lam, 1.0 - a]])


@dataclass(frozen=True)
class EigenStructure:
    """Eigenpairs of ``A`` normalised so that ``u_i . v_j = delta_ij``."""

    lambda1: float
    lambda2: float
    v1: np.ndarray
    v2: np.ndarray
    u1: np.ndarray
    u2: np.ndarray

    def projector(self, i: int) -> np.ndarray:
        """Spectral projector ``v_i u_i`` onto the i-th eigenspace."""
        if i == 1:
            return np.outer(self.v1, self.u1)
        if i == 2:
            return np.outer(self.v2, self.u2)
        raise IndexError(i)

    @property
    def right(self) -> np.ndarray:
        return np.column_stack([self.v1, self.v2])

    @property
    def left(self) -> np.ndarray:
        return np.vstack([self.u1, self.u2])


def eigenstructure(params: ModelParams) -> EigenStructure:
    a, lam = params.a, params.lambda2
    gap = 1.0 - lam
    if abs(gap) < 1e-12:
        raise DegenerateSpectrum("lambda2 coincides with the Perron eigenvalue 1")
    return EigenStructure(
        lambda1=1.0,
        lambda2=lam,
        v1=np.array([a, 1.0 - a - lam]) / gap,
        v2=np.array([1.0, -1.0]) / gap,
        u1=_ONES.copy(),
        u2=np.array([1.0 - a - lam, -a]),
    )


def b_matrix(params: ModelParams) -> np.ndarray:
    """Diagonal second-moment matrix of the replacement vectors, weighted by v1."""
    p_a, p_b = limiting_proportions(params)
    return np.diag([p_a, p_b])


def expm_replacement(params: ModelParams, x: float, transpose: bool = False) -> np.ndarray:
    """``exp(x A)`` (or ``exp(x A^T)``) through the spectral decomposition."""
    eig = eigenstructure(params)
    out = math.exp(x) * eig.projector(1) + math.exp(eig.lambda2 * x) * eig.projector(2)
    return out.T if transpose else out


def psi_A(params: ModelParams, s: float) -> np.ndarray:
    """``exp(sA) - v1 (1 1) int_0^s exp(tA) dt`` in closed form.

    Since (1 1) is the left Perron vector, ``(1 1) exp(tA) = e^t (1 1)`` and the
    two ``e^s`` contributions cancel exactly, leaving ``v1 u1 + e^(lambda2 s) v2 u2``.
    Using the cancelled form keeps the value finite for large ``s``.
    """
    if s < 0:
        raise DomainError(f"s must be non-negative, got {s}")
    eig = eigenstructure(params)
    return eig.projector(1) + math.exp(eig.lambda2 * s) * eig.projector(2)


def _require(params, *regimes):
    regime = classify_regime(params)
    if regime not in regimes:
        allowed = ", ".join(str(r) for r in regimes)
        raise RegimeMismatch(f"lambda2={params.lambda2} is {regime}; expected {allowed}")
    return regime


def sigma1_scalar(params: ModelParams) -> float:
    _require(params, Regime.DIFFUSIVE)
    a, lam = params.a, params.lambda2
    return a * (1.0 - a - lam) / ((1.0 - lam) ** 2 * (1.0 - 2.0 * lam))


def sigma1_closed(params: ModelParams) -> np.ndarray:
    """Diffusive limiting covariance of ``((N_n, M_n) - n v1) / sqrt(n)``."""
    return _pattern(sigma1_scalar(params))


@functools.lru_cache(maxsize=16)
def laguerre_rule(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Laguerre nodes and weights (Golub-Welsch), underflowed weights dropped."""
    k = np.arange(n, dtype=float)
    nodes, vecs = eigh_tridiagonal(2.0 * k + 1.0, k[1:])
    weights = vecs[0] ** 2
    keep = weights > 0.0
    nodes, weights = nodes[keep], weights[keep]
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def _sigma1_quadrature(params, nodes, weights):
    # int_0^inf psi(s) B psi(s)^T e^{-s} ds with s = u / c, where c is the slowest
    # decay rate among {1, 1 - lambda2, 1 - 2 lambda2}.  After the substitution the
    # integrand is e^{-u} g(u) with g built from non-positive exponents only.
    eig = eigenstructure(params)
    lam = eig.lambda2
    c = min(1.0, 1.0 - 2.0 * lam)
    p1, p2 = eig.projector(1), eig.projector(2)
    bmat = b_matrix(params)
    e1 = np.exp(0.5 * (1.0 - 1.0 / c) * nodes)
    e2 = np.exp((2.0 * lam - 1.0 + c) / (2.0 * c) * nodes)
    # phi[k] = e^{u_k/2} e^{-s_k/2} psi(s_k)
    phi = e1[:, None, None] * p1 + e2[:, None, None] * p2
    integrand = phi @ bmat @ np.transpose(phi, (0, 2, 1))
    integral = np.tensordot(weights, integrand, axes=1) / c
    return integral - np.outer(eig.v1, eig.v1)


def sigma1_integral(params: ModelParams, tol: float = 1e-8, start_nodes: int = 64, max_nodes: int = 4096) -> np.ndarray:
    """Diffusive covariance from the urn covariance integral, by quadrature.

    The node count doubles from ``start_nodes`` until two successive estimates
    agree to ``tol / 10`` in every entry.
    """
    _require(params, Regime.DIFFUSIVE)
    if not tol > 0:
        raise DomainError("tol must be positive")
    n = start_nodes
    previous = _sigma1_quadrature(params, *laguerre_rule(n))
    while n < max_nodes:
        n *= 2
        current = _sigma1_quadrature(params, *laguerre_rule(n))
        if np.max(np.abs(current - previous)) < tol / 10:
            return current
        previous = current
    raise QuadratureFailure(
        f"covariance integral did not converge to {tol} with {max_nodes} Laguerre nodes (lambda2={params.lambda2})"
    )


def sigma2_scalar(params: ModelParams) -> float:
    _require(params, Regime.CRITICAL)
    return 2.0 * params.a * (1.0 - 2.0 * params.a)


def sigma2_critical(params: ModelParams) -> np.ndarray:
    """Critical covariance ``(I - T1) P B P^T (I - T1)^T`` with ``P = v2 u2``.

    Checked against the closed form ``2a(1-2a)`` pattern before returning.
    """
    _require(params, Regime.CRITICAL)
    eig = eigenstructure(params)
    t1 = np.outer(eig.v1, _ONES)
    proj = eig.projector(2)
    lead = np.eye(2) - t1
    sigma = lead @ proj @ b_matrix(params) @ proj.T @ lead.T
    closed = _pattern(sigma2_scalar(params))
    if not np.allclose(sigma, closed, rtol=0.0, atol=1e-12):
        raise ArithmeticError(f"critical covariance routes disagree: {sigma.tolist()} vs {closed.tolist()}")
    return sigma


def critical_centering(params: ModelParams) -> tuple[float, float]:
    """Centering ``(2a, 1 - 2a)`` of the critical functional limit."""
    _require(params, Regime.CRITICAL)
    p_a, p_b = limiting_proportions(params)
    if abs(p_a - 2.0 * params.a) > 1e-9 or abs(p_b - (1.0 - 2.0 * params.a)) > 1e-9:
        raise ArithmeticError("critical centering inconsistent with the limiting proportions")
    return p_a, p_b


def functional_covariance(params: ModelParams, s: float, t: float) -> np.ndarray:
    """``E(W_s W_t^T)`` of the Gaussian process limit, for ``0 < s <= t``."""
    if not s > 0:
        raise DomainError(f"s must be positive, got {s}")
    if t < s:
        raise DomainError(f"t={t} must not be smaller than s={s}")
    regime = _require(params, Regime.DIFFUSIVE, Regime.CRITICAL)
    if regime is Regime.CRITICAL:
        return _pattern(s * sigma2_scalar(params))
    lam = params.lambda2
    direct = _pattern(s * (t / s) ** lam * sigma1_scalar(params))
    via_exp = s * sigma1_closed(params) @ expm_replacement(params, math.log(t / s), transpose=True)
    if not np.allclose(direct, via_exp, rtol=0.0, atol=1e-10):
        raise ArithmeticError("functional covariance routes disagree")
    return direct


@dataclass(frozen=True)
class WMoments:
    """First three raw moments of the first component of the superdiffusive limit.

    The second component is the negative of the first because ``N_n + M_n`` is
    deterministic, so these determine the vector moments.
    """

    m1: float
    m2: float
    m3: float

    def as_tuple(self):
        return (self.m1, self.m2, self.m3)


def elephant_w_moments(a: float) -> WMoments:
    """Moment formulas of the elephant specialisation (beta=0, alpha=(1-2a)/b, one A seeder)."""
    if not 0.0 < a < 0.25:
        raise DomainError(f"elephant moment formulas need 0 < a < 1/4, got a={a}")
    lapse = (1.0 - 2.0 * a) ** 2 / (1.0 - 4.0 * a)
    m1 = 1.0 / (2.0 * math.gamma(2.0 * (1.0 - a)))
    m2 = (1.0 + lapse) / (2.0 * math.gamma(3.0 - 4.0 * a))
    m3 = (1.0 + (5.0 - 2.0 * a) * lapse) / (2.0 * math.gamma(2.0 * (2.0 - 3.0 * a)))
    return WMoments(m1, m2, m3)


def elephant_params(a: float, b: float | None = None) -> ModelParams:
    """Parameters of the elephant specialisation, started from a single A opinion.

    ``b`` defaults to ``1 - 2a`` (so that ``alpha = 1``); any ``b`` in
    ``[1 - 2a, 1 - a]`` is admissible.
    """
    if b is None:
        b = 1.0 - 2.0 * a
    if b <= 0:
        raise DomainError("b must be positive")
    return validate_params(a, b, (1.0 - 2.0 * a) / b, 0.0, 1, 0)


def bhw_embedding(theta: float, p: float, n0: int = 1, m0: int = 1) -> tuple[ModelParams, float | None]:
    """Embed the BHW mixture ``theta*p + (1-theta)*N/(N+M)`` as random-trend parameters.

    Returns the parameters and Heyde's diffusive variance ``p(1-p)/(2 theta - 1)``,
    or ``None`` when ``theta <= 1/2`` (no diffusive limit).
    """
    if not 0.0 < theta <= 1.0:
        raise DomainError(f"theta must lie in (0, 1], got {theta}")
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"p must lie in [0, 1], got {p}")
    params = validate_params(theta * p, 1.0 - theta, 1.0, 0.0, n0, m0)
    variance = p * (1.0 - p) / (2.0 * theta - 1.0) if theta > 0.5 else None
    return params, variance
