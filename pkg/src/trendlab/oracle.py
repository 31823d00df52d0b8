"""Exact finite-n law of ``N_n`` by forward recursion on the averaged chain.

Because the trend is i.i.d. and independent of the past, ``N_n`` alone is a
Markov chain with success probability ``a + lambda2 * k / (n0 + m0 + j)`` at
step ``j``.  The recursion runs in extended precision (``numpy.longdouble``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DomainError, ResourceLimit
from .model import ModelParams

__all__ = [
    "DEFAULT_CAP",
    "ExactDist",
    "ExactMoments",
    "exact_distribution",
    "exact_moments",
    "mean_variance_path",
    "cross_moment",
]

DEFAULT_CAP = 8192


@dataclass(frozen=True)
class ExactDist:
    """Probability mass of ``N_n`` on ``{n0, ..., n0 + n}``."""

    params: ModelParams
    n: int
    pmf_ld: np.ndarray

    @property
    def support(self) -> np.ndarray:
        return np.arange(self.params.n0, self.params.n0 + self.n + 1)

    @property
    def pmf(self) -> np.ndarray:
        return self.pmf_ld.astype(np.float64)

    def prob(self, k: int) -> float:
        i = k - self.params.n0
        return float(self.pmf_ld[i]) if 0 <= i <= self.n else 0.0

    def as_dict(self) -> dict[int, float]:
        return {int(k): float(p) for k, p in zip(self.support, self.pmf_ld)}

    def expect(self, values) -> float:
        """Compensated sum of ``values[k] * pmf[k]`` over the support."""
        terms = np.asarray(values, dtype=np.longdouble) * self.pmf_ld
        return math.fsum(terms.astype(np.float64))

    def scaled_moments(self, center: float, scale: float, orders=(1, 2, 3)) -> list[float]:
        """Raw moments of ``(N_n - center) / scale``."""
        z = (self.support.astype(np.longdouble) - np.longdouble(center)) / np.longdouble(scale)
        return [self.expect(z**r) for r in orders]

    def sample(self, size: int, rng: np.random.Generator) -> np.ndarray:
        return rng.choice(self.support, size=size, p=self.pmf / self.pmf.sum())


def exact_distribution(params: ModelParams, n: int, cap: int = DEFAULT_CAP) -> ExactDist:
    if n < 0:
        raise DomainError(f"n must be non-negative, got {n}")
    if n > cap:
        raise ResourceLimit(f"exact distribution at n={n} exceeds the cap of {cap} steps (cost is O(n^2))")
    pmf = kernels.exact_pmf(params.a, params.lambda2, params.n0, params.m0, n)
    return ExactDist(params, n, pmf)


@dataclass(frozen=True)
class ExactMoments:
    """``raw[r-1] = E(N_n^r)`` and ``central[r-1] = E((N_n - mean)^r)``."""

    raw: tuple[float, ...]
    central: tuple[float, ...]

    @property
    def mean(self) -> float:
        return self.raw[0]

    @property
    def variance(self) -> float:
        return self.central[1]


def exact_moments(params: ModelParams, n: int, order: int = 4, cap: int = DEFAULT_CAP) -> ExactMoments:
    if not 1 <= order <= 4:
        raise DomainError(f"order must be between 1 and 4, got {order}")
    dist = exact_distribution(params, n, cap)
    k = dist.support.astype(np.longdouble)
    raw = tuple(dist.expect(k**r) for r in range(1, order + 1))
    dev = k - np.longdouble(raw[0])
    central = tuple(dist.expect(dev**r) for r in range(1, order + 1))
    return ExactMoments(raw, central)


def mean_variance_path(params: ModelParams, steps) -> dict[int, tuple[float, float]]:
    """Exact ``(E N_j, Var N_j)`` at each requested step, in O(max step) time.

    The success probability is linear in ``N_j``, so the first two moments
    obey a closed recursion; no distribution is needed.
    """
    wanted = sorted({int(s) for s in steps})
    if not wanted or wanted[0] < 0:
        raise DomainError("steps must be non-negative")
    a, lam, total0 = params.a, params.lambda2, params.seeders
    mean, var = float(params.n0), 0.0
    out = {}
    j = 0
    for target in wanted:
        while j < target:
            t = total0 + j
            q = a + lam * mean / t
            var = var * (1.0 + lam / t) ** 2 + q * (1.0 - q) - lam * lam * var / (t * t)
            mean += q
            j += 1
        out[target] = (mean, var)
    return out


def cross_moment(params: ModelParams, early: int, late: int, center_early: float, center_late: float) -> float:
    """Exact ``E[(N_early - c1)(N_late - c2)]`` for ``early <= late``.

    Uses ``E[N_late - mu_late | F_early] = (N_early - mu_early) * prod(1 + lambda2 / T_j)``.
    """
    if not 0 <= early <= late:
        raise DomainError("need 0 <= early <= late")
    path = mean_variance_path(params, [early, late])
    mu_e, var_e = path[early]
    mu_l, _ = path[late]
    growth = math.exp(
        math.fsum(math.log1p(params.lambda2 / (params.seeders + j)) for j in range(early, late))
    )
    return var_e * growth + (mu_e - center_early) * (mu_l - center_late)
