"""Scaled statistics and verdicts computed from ensembles and exact laws.

Fluctuations are always centred on ``n * p_A`` from the limiting proportions,
never on the sample mean, so slow centring bias stays visible.  The
M-component of a fluctuation is the negative of the N-component (the total
``N_n + M_n`` is deterministic); the constant offset ``(n0 + m0) / scale``
that the literal centring would add is dropped.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, RegimeMismatch
from .model import ModelParams, Regime, classify_regime, limiting_proportions
from .oracle import ExactDist
from .sim import Ensemble
from .theory import FLUCTUATION_PATTERN

__all__ = [
    "ScaledSample",
    "ScalingFit",
    "MomentDiagnostics",
    "fluctuation_scale",
    "scaled_sample",
    "scale_ensemble",
    "functional_steps",
    "estimate_scaling_exponent",
    "empirical_covariance",
    "superdiffusive_moments",
    "moment_diagnostics",
    "normality_diagnostics",
    "terminal_proportions",
    "total_variation",
]


def fluctuation_scale(params: ModelParams, n: int) -> float:
    """``sqrt(n)``, ``sqrt(n log n)`` or ``n**lambda2`` according to the regime."""
    regime = classify_regime(params)
    if regime is Regime.CRITICAL:
        if n < 2:
            raise DomainError(f"critical scaling needs n >= 2, got {n}")
        return math.sqrt(n * math.log(n))
    if n < 1:
        raise DomainError(f"scaling needs n >= 1, got {n}")
    if regime is Regime.DIFFUSIVE:
        return math.sqrt(n)
    return n**params.lambda2


@dataclass(frozen=True)
class ScaledSample:
    step: int
    regime: Regime
    center: float
    scale: float
    values: np.ndarray

    @property
    def second_moment(self) -> float:
        """Mean square about the theoretical centre."""
        return float(np.mean(self.values**2))

    @property
    def variance(self) -> float:
        return float(np.var(self.values, ddof=1)) if self.values.size > 1 else 0.0

    @property
    def m_values(self) -> np.ndarray:
        return -self.values


def scaled_sample(ensemble: Ensemble, step: int) -> ScaledSample:
    params = ensemble.params
    p_a, _ = limiting_proportions(params)
    scale = fluctuation_scale(params, step)
    center = step * p_a
    values = (ensemble.at(step) - center) / scale
    return ScaledSample(step, classify_regime(params), center, scale, values)


def scale_ensemble(ensemble: Ensemble, steps=None) -> list[ScaledSample]:
    """Regime-scaled fluctuations at each requested snapshot (default: all)."""
    steps = ensemble.grid if steps is None else steps
    return [scaled_sample(ensemble, int(s)) for s in steps]


@dataclass(frozen=True)
class ScalingFit:
    n: np.ndarray
    variance: np.ndarray
    slope: float
    intercept: float
    local_slope: float

    def predict(self, n) -> np.ndarray:
        return np.exp(self.intercept) * np.asarray(n, dtype=float) ** self.slope


def estimate_scaling_exponent(n, variance=None) -> ScalingFit:
    """Least-squares slope of ``log Var`` against ``log n``.

    Accepts either two sequences or one sequence of ``(n, variance)`` pairs.
    ``local_slope`` uses only the two largest ``n`` and is less affected by
    lower-order corrections.
    """
    if variance is None:
        pairs = np.asarray(n, dtype=float)
        if pairs.ndim != 2 or pairs.shape[1] != 2:
            raise DomainError("expected a sequence of (n, variance) pairs")
        n, variance = pairs[:, 0], pairs[:, 1]
    n = np.asarray(n, dtype=float)
    variance = np.asarray(variance, dtype=float)
    if n.shape != variance.shape or n.size < 4:
        raise DomainError("need at least four (n, variance) points")
    if np.any(np.diff(n) <= 0) or n[0] <= 0:
        raise DomainError("grid must be positive and strictly increasing")
    if np.any(~np.isfinite(variance)) or np.any(variance <= 0):
        raise DomainError("variances must be positive and finite")
    x, y = np.log(n), np.log(variance)
    slope, intercept = np.polyfit(x, y, 1)
    local = (y[-1] - y[-2]) / (x[-1] - x[-2])
    return ScalingFit(n, variance, float(slope), float(intercept), float(local))


def _functional_values(ensemble, u, n):
    params = ensemble.params
    p_a, _ = limiting_proportions(params)
    if classify_regime(params) is Regime.CRITICAL:
        step = math.floor(n**u)
        return (ensemble.at(step) - n**u * p_a) / math.sqrt(n**u * math.log(n))
    step = math.floor(u * n)
    return (ensemble.at(step) - u * n * p_a) / math.sqrt(n)


def functional_steps(params: ModelParams, times, n: int) -> list[int]:
    """Snapshot steps ``floor(t n)`` (diffusive) or ``floor(n**t)`` (critical)."""
    if classify_regime(params) is Regime.CRITICAL:
        return [math.floor(n**t) for t in times]
    return [math.floor(t * n) for t in times]


def empirical_covariance(ensemble: Ensemble, s: float, t: float, n: int) -> np.ndarray:
    """Estimate ``E(W_s W_t^T)`` from the process rescaled with horizon ``n``.

    Diffusive ensembles are read at ``floor(s n)`` and ``floor(t n)``; critical
    ones at ``floor(n**s)`` and ``floor(n**t)`` with ``sqrt(n**u log n)``
    scaling.
    """
    if classify_regime(ensemble.params) is Regime.SUPERDIFFUSIVE:
        raise RegimeMismatch("no Gaussian functional limit in the superdiffusive regime")
    if not 0 < s <= t:
        raise DomainError(f"need 0 < s <= t, got s={s}, t={t}")
    ws = _functional_values(ensemble, s, n)
    wt = _functional_values(ensemble, t, n)
    return float(np.mean(ws * wt)) * FLUCTUATION_PATTERN


@dataclass(frozen=True)
class MomentDiagnostics:
    count: int
    mean: float
    variance: float
    skewness: float
    excess_kurtosis: float
    se_mean: float
    se_variance: float
    se_skewness: float
    se_kurtosis: float
    raw: tuple[float, float, float]
    se_raw: tuple[float, float, float]

    @property
    def degenerate(self) -> bool:
        return self.variance == 0.0

    @property
    def looks_normal(self) -> bool:
        """Skewness and excess kurtosis both within three standard errors of zero."""
        if self.degenerate:
            return False
        return abs(self.skewness) < 3 * self.se_skewness and abs(self.excess_kurtosis) < 3 * self.se_kurtosis


def moment_diagnostics(values) -> MomentDiagnostics:
    x = np.asarray(values, dtype=float)
    r = x.size
    if r < 2:
        raise DomainError("need at least two values")
    mean = float(x.mean())
    d = x - mean
    m2 = float(np.mean(d**2))
    m3 = float(np.mean(d**3))
    m4 = float(np.mean(d**4))
    variance = m2 * r / (r - 1)
    if m2 > 0:
        skew = m3 / m2**1.5
        kurt = m4 / m2**2 - 3.0
    else:
        skew = kurt = float("nan")
    raw = tuple(float(np.mean(x**k)) for k in (1, 2, 3))
    se_raw = tuple(float(np.std(x**k, ddof=1) / math.sqrt(r)) for k in (1, 2, 3))
    return MomentDiagnostics(
        count=r,
        mean=mean,
        variance=variance,
        skewness=skew,
        excess_kurtosis=kurt,
        se_mean=math.sqrt(variance / r),
        se_variance=math.sqrt(max(m4 - m2 * m2, 0.0) / r),
        se_skewness=math.sqrt(6.0 / r),
        se_kurtosis=math.sqrt(24.0 / r),
        raw=raw,
        se_raw=se_raw,
    )


def normality_diagnostics(sample) -> MomentDiagnostics:
    """Moment diagnostics of a :class:`ScaledSample` (or raw array).

    Standard errors of skewness and kurtosis assume normality and are only
    meaningful for a thousand or more replicates.
    """
    values = sample.values if isinstance(sample, ScaledSample) else sample
    return moment_diagnostics(values)


def superdiffusive_moments(ensemble: Ensemble, step: int | None = None) -> MomentDiagnostics:
    """Moments of the first component of ``Z_n = (N_n - n p_A) / n**lambda2``."""
    if classify_regime(ensemble.params) is not Regime.SUPERDIFFUSIVE:
        raise RegimeMismatch("superdiffusive moments need lambda2 > 1/2")
    step = int(ensemble.grid[-1]) if step is None else step
    return moment_diagnostics(scaled_sample(ensemble, step).values)


def terminal_proportions(ensemble: Ensemble, step: int | None = None) -> np.ndarray:
    step = int(ensemble.grid[-1]) if step is None else step
    return ensemble.at(step) / (ensemble.params.seeders + step)


def total_variation(counts, dist: ExactDist) -> float:
    """Total-variation distance between the empirical law of ``counts`` and ``dist``."""
    counts = np.asarray(counts, dtype=np.int64)
    offset = dist.params.n0
    if counts.size == 0:
        raise DomainError("no samples")
    if counts.min() < offset or counts.max() > offset + dist.n:
        raise DomainError("samples fall outside the support of the exact law")
    hist = np.bincount(counts - offset, minlength=dist.n + 1) / counts.size
    return 0.5 * math.fsum(np.abs(hist - dist.pmf))
