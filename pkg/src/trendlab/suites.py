"""Verification experiments behind ``trendlab verify``.

Each suite runs one acceptance experiment and returns a report with
``expected``, ``observed``, ``tolerance`` and ``pass`` entries per check.
Companion cases (a second parameter set) only run when the suite's default
parameters are used.  ``--tol`` replaces the tolerance of a suite's primary
check.  Exact finite-n values are reported under ``reference`` so that a
failure can be told apart from finite-n bias.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats as sps

from . import stats, theory
from .config import ExperimentConfig
from .errors import DomainError
from .model import ModelParams, Regime, classify_regime, limiting_proportions
from .oracle import DEFAULT_CAP, cross_moment, exact_distribution, exact_moments, mean_variance_path
from .sim import monte_carlo

__all__ = ["SUITE_DEFAULTS", "P1", "P2", "P3", "NEGATIVE", "Check", "run_suite"]

P1 = {"a": 0.3, "b": 0.2, "alpha": 0.6, "beta": 0.1, "n0": 1, "m0": 1}
P2 = {"a": 0.25, "b": 0.5, "alpha": 1.0, "beta": 0.0, "n0": 1, "m0": 1}
P3 = {"a": 0.2, "b": 0.6, "alpha": 1.0, "beta": 0.0, "n0": 1, "m0": 0}
NEGATIVE = {"a": 0.5, "b": 0.3, "alpha": 0.2, "beta": 0.6, "n0": 1, "m0": 1}
BINOMIAL = {"a": 0.5, "b": 0.0, "alpha": 0.0, "beta": 0.0, "n0": 1, "m0": 1}

#: params, steps (n), reps, primary tolerance
SUITE_DEFAULTS = {
    "oracle": (P1, 50, 10**6, 0.01),
    "lln": (P1, 10**5, 200, 0.005),
    "clt": (P1, 10**4, 2 * 10**4, 0.05),
    "critical": (P2, 10**5, 10**4, 0.10),
    "scaling": (P3, 4096, None, 0.1),
    "elephant": (P3, 10**4, 10**5, 0.02),
    "functional": (P1, 10**4, 10**4, 0.10),
}

CRITICAL_FUNCTIONAL_STEPS = 10**5


@dataclass
class Check:
    name: str
    expected: float
    observed: float
    tolerance: float
    kind: str = "abs"  # abs | rel | below

    @property
    def passed(self) -> bool:
        if not math.isfinite(self.observed):
            return False
        if self.kind == "below":
            return abs(self.observed) < self.tolerance
        gap = abs(self.observed - self.expected)
        if self.kind == "rel":
            return gap <= self.tolerance * abs(self.expected)
        return gap <= self.tolerance


def _is_default(cfg, suite):
    return cfg.params == SUITE_DEFAULTS[suite][0]


def _require_regime(params, regime, suite):
    if classify_regime(params) is not regime:
        raise DomainError(f"suite {suite!r} needs {regime} parameters, got lambda2={params.lambda2}")


def _oracle(cfg, params, n, reps, tol, threads):
    checks, reference = [], {}
    cases = [("", params)]
    if _is_default(cfg, "oracle"):
        cases.append(("binomial_", ModelParams(**BINOMIAL)))
    for prefix, p in cases:
        ens = monte_carlo(p, n, [n], reps, cfg.seed, threads)
        dist = exact_distribution(p, n)
        checks.append(Check(prefix + "tv_distance", 0.0, stats.total_variation(ens.at(n), dist), tol, "below"))
        if p.b == 0.0:
            binom = sps.binom.pmf(np.arange(n + 1), n, p.a)
            checks.append(Check(prefix + "exact_vs_binomial_max_abs", 0.0, float(np.max(np.abs(dist.pmf - binom))), 1e-12, "below"))
    return checks, reference


def _lln(cfg, params, steps, reps, tol, threads):
    checks, reference = [], {}
    cases = [("", params)]
    if _is_default(cfg, "lln"):
        cases.append(("negative_lambda2_", ModelParams(**NEGATIVE)))
    for prefix, p in cases:
        ens = monte_carlo(p, steps, [steps], reps, cfg.seed, threads)
        observed = float(np.mean(stats.terminal_proportions(ens)))
        checks.append(Check(prefix + "mean_terminal_proportion", limiting_proportions(p)[0], observed, tol))
    return checks, reference


def _clt(cfg, params, n, reps, tol, threads):
    _require_regime(params, Regime.DIFFUSIVE, "clt")
    ens = monte_carlo(params, n, [n], reps, cfg.seed, threads)
    diag = stats.normality_diagnostics(stats.scaled_sample(ens, n))
    checks = [
        Check("scaled_variance", theory.sigma1_scalar(params), diag.variance, tol, "rel"),
        Check("skewness", 0.0, diag.skewness, 3 * math.sqrt(6 / reps), "below"),
        Check("excess_kurtosis", 0.0, diag.excess_kurtosis, 3 * math.sqrt(24 / reps), "below"),
    ]
    mean, var = mean_variance_path(params, [n])[n]
    center = n * limiting_proportions(params)[0]
    reference = {"exact_scaled_second_moment": (var + (mean - center) ** 2) / n}
    return checks, reference


def _critical(cfg, params, n, reps, tol, threads):
    _require_regime(params, Regime.CRITICAL, "critical")
    ens = monte_carlo(params, n, [n], reps, cfg.seed, threads)
    sample = stats.scaled_sample(ens, n)
    checks = [Check("scaled_variance", theory.sigma2_scalar(params), sample.variance, tol, "rel")]
    _, var = mean_variance_path(params, [n])[n]
    reference = {"exact_variance_over_n_log_n": var / (n * math.log(n))}
    return checks, reference


def _scaling_case(params, top):
    grid = [top // 8, top // 4, top // 2, top]
    variances = [exact_moments(params, m, order=2, cap=max(top, DEFAULT_CAP)).variance for m in grid]
    fit = stats.estimate_scaling_exponent(grid, variances)
    regime = classify_regime(params)
    target = 2.0 * params.lambda2 if regime is Regime.SUPERDIFFUSIVE else 1.0
    return fit, target


def _scaling(cfg, params, top, reps, tol, threads):
    if top < 16:
        raise DomainError("scaling suite needs steps >= 16")
    checks, reference = [], {}
    cases = [("", params)]
    if _is_default(cfg, "scaling"):
        cases.append(("diffusive_control_", ModelParams(**P1)))
    for prefix, p in cases:
        fit, target = _scaling_case(p, top)
        checks.append(Check(prefix + "local_slope", target, fit.local_slope, tol))
        reference[prefix + "global_slope"] = fit.slope
    return checks, reference


def _is_elephant(p):
    return p.beta == 0.0 and p.n0 == 1 and p.m0 == 0 and 0 < p.a < 0.25 and abs(p.lambda2 - (1 - 2 * p.a)) < 1e-12


def _elephant(cfg, params, n, reps, tol, threads):
    if not _is_elephant(params):
        raise DomainError("elephant suite needs beta=0, alpha*b=1-2a, a<1/4, n0=1, m0=0")
    target = theory.elephant_w_moments(params.a)
    ens = monte_carlo(params, n, [n], reps, cfg.seed, threads)
    diag = stats.superdiffusive_moments(ens, n)
    checks = [
        Check("mean", target.m1, diag.raw[0], tol),
        Check("second_moment", target.m2, diag.raw[1], 0.05, "rel"),
        Check("third_moment", target.m3, diag.raw[2], 0.10, "rel"),
    ]
    center_rate = limiting_proportions(params)[0]
    reference = {}
    for m in sorted({1024, 2048, 4096, n}):
        if m > n:
            continue
        dist = exact_distribution(params, m, cap=max(m, DEFAULT_CAP))
        reference[f"exact_moments_n{m}"] = dist.scaled_moments(m * center_rate, m**params.lambda2)
    reference["standard_errors"] = list(diag.se_raw)
    return checks, reference


def _functional_case(params, n, reps, seed, threads, s, t):
    times = (s, t)
    steps_needed = stats.functional_steps(params, times, n)
    top = max(steps_needed)
    ens = monte_carlo(params, top, sorted(set(steps_needed)), reps, seed, threads)
    observed = stats.empirical_covariance(ens, s, t, n)[0, 0]
    expected = theory.functional_covariance(params, s, t)[0, 0]
    p_a = limiting_proportions(params)[0]
    if classify_regime(params) is Regime.CRITICAL:
        centers = [n**u * p_a for u in times]
        norm = math.sqrt(n**s * n**t) * math.log(n)
    else:
        centers = [u * n * p_a for u in times]
        norm = n
    exact = cross_moment(params, steps_needed[0], steps_needed[1], centers[0], centers[1]) / norm
    return expected, float(observed), exact


def _functional(cfg, params, n, reps, tol, threads, s=0.5, t=1.0):
    if classify_regime(params) is Regime.SUPERDIFFUSIVE:
        raise DomainError("functional suite needs diffusive or critical parameters")
    checks, reference = [], {}
    cases = [("", params, n)]
    if _is_default(cfg, "functional"):
        cases.append(("critical_", ModelParams(**P2), CRITICAL_FUNCTIONAL_STEPS))
    for prefix, p, horizon in cases:
        expected, observed, exact = _functional_case(p, horizon, reps, cfg.seed, threads, s, t)
        checks.append(Check(prefix + "cross_covariance", expected, observed, tol, "rel"))
        reference[prefix + "exact_finite_n_cross_covariance"] = float(exact)
        reference[prefix + "horizon"] = horizon
    return checks, reference


_RUNNERS = {
    "oracle": _oracle,
    "lln": _lln,
    "clt": _clt,
    "critical": _critical,
    "scaling": _scaling,
    "elephant": _elephant,
    "functional": _functional,
}


def run_suite(cfg: ExperimentConfig) -> dict:
    """Run ``cfg.suite`` and return the JSON-ready report."""
    suite = cfg.suite
    _, default_steps, default_reps, default_tol = SUITE_DEFAULTS[suite]
    params = cfg.model_params()
    steps = cfg.steps if cfg.steps is not None else default_steps
    reps = cfg.reps if cfg.reps is not None else default_reps
    tol = cfg.tol if cfg.tol is not None else default_tol
    checks, reference = _RUNNERS[suite](cfg, params, steps, reps, tol, cfg.threads)
    return {
        "suite": suite,
        "config": cfg.content_dict(),
        "expected": {c.name: float(c.expected) for c in checks},
        "observed": {c.name: float(c.observed) for c in checks},
        "tolerance": {c.name: {"value": c.tolerance, "kind": c.kind} for c in checks},
        "checks": {c.name: bool(c.passed) for c in checks},
        "reference": reference,
        "pass": bool(all(c.passed for c in checks)),
    }
