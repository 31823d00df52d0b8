"""Parameters, regimes and one-step transition law of the random-trend model.

Each new decision maker draws a latent trend ``Y`` in ``{+1, -1, 0}`` with
probabilities ``(alpha, beta, 1 - alpha - beta)`` and adopts opinion A with
probability ``a + b * Y * N / (N + M)``.  Averaging over ``Y`` gives the
success probability ``a + lambda2 * N / (N + M)`` with
``lambda2 = b * (alpha - beta)``, which drives every limit theorem.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from .errors import ConstraintViolation, DomainError

__all__ = [
    "CRITICAL_TOL",
    "ModelParams",
    "PopulationState",
    "Regime",
    "validate_params",
    "classify_regime",
    "conditional_success_prob",
    "mean_success_prob",
    "limiting_proportions",
]

#: Absolute tolerance used when comparing lambda2 with 1/2.
CRITICAL_TOL = 1e-12

# slack for sums such as a + b that should be <= 1 but pick up rounding
_SLACK = 1e-12


class Regime(str, enum.Enum):
    DIFFUSIVE = "diffusive"
    CRITICAL = "critical"
    SUPERDIFFUSIVE = "superdiffusive"

    def __str__(self):
        return self.value


def _check_unit(name, value):
    if not (isinstance(value, (int, float)) and math.isfinite(value)):
        raise ConstraintViolation(f"{name} not finite", f"{name}={value!r} is not a finite number")
    if value < 0.0 or value > 1.0:
        raise ConstraintViolation(f"{name} outside [0,1]", f"{name}={value} is outside [0, 1]")


@dataclass(frozen=True)
class ModelParams:
    """Validated parameter tuple of the random-trend diffusion model.

    Construction validates every admissibility constraint and raises
    :class:`ConstraintViolation` naming the first one that fails.
    ``lambda2`` is computed once here and reused everywhere else.
    """

    a: float
    b: float
    alpha: float
    beta: float
    n0: int = 1
    m0: int = 1
    lambda2: float = field(init=False)

    def __post_init__(self):
        for name in ("a", "b", "alpha", "beta"):
            value = getattr(self, name)
            if isinstance(value, bool):
                raise ConstraintViolation(f"{name} not finite", f"{name} must be a number")
            _check_unit(name, value)
            object.__setattr__(self, name, float(value))
        for name in ("n0", "m0"):
            value = getattr(self, name)
            if isinstance(value, float) and value.is_integer():
                value = int(value)
            if not isinstance(value, int) or isinstance(value, bool) or value < 0:
                raise ConstraintViolation(
                    f"{name} not a non-negative integer", f"{name}={value!r} must be a non-negative integer"
                )
            object.__setattr__(self, name, value)
        if self.alpha + self.beta > 1.0 + _SLACK:
            raise ConstraintViolation("alpha+beta>1", f"alpha + beta = {self.alpha + self.beta} exceeds 1")
        if self.a + self.b > 1.0 + _SLACK:
            raise ConstraintViolation("a+b>1", f"a + b = {self.a + self.b} exceeds 1")
        if self.beta != 0.0 and self.b > self.a:
            raise ConstraintViolation(
                "b>a with beta!=0", f"b = {self.b} exceeds a = {self.a} while beta = {self.beta} is non-zero"
            )
        if self.n0 + self.m0 < 1:
            raise ConstraintViolation("n0+m0=0", "the population must start with at least one seeder")
        object.__setattr__(self, "lambda2", self.b * (self.alpha - self.beta))

    @property
    def regime(self) -> Regime:
        return classify_regime(self)

    @property
    def seeders(self) -> int:
        return self.n0 + self.m0

    def replace(self, **changes) -> "ModelParams":
        values = self.as_dict()
        values.update(changes)
        return ModelParams(**values)

    def as_dict(self) -> dict:
        return {
            "a": self.a,
            "b": self.b,
            "alpha": self.alpha,
            "beta": self.beta,
            "n0": self.n0,
            "m0": self.m0,
        }

    def initial_state(self) -> "PopulationState":
        return PopulationState(self.n0, self.m0, 0)


@dataclass(frozen=True)
class PopulationState:
    """Opinion counts after ``step`` decisions."""

    n_count: int
    m_count: int
    step: int = 0

    def __post_init__(self):
        if min(self.n_count, self.m_count, self.step) < 0:
            raise DomainError("counts and step must be non-negative")

    @property
    def total(self) -> int:
        return self.n_count + self.m_count

    @property
    def proportion(self) -> float:
        return self.n_count / self.total

    def consistent_with(self, params: ModelParams) -> bool:
        return (
            self.n_count + self.m_count == params.seeders + self.step
            and self.n_count >= params.n0
            and self.m_count >= params.m0
        )


def validate_params(a, b, alpha, beta, n0=1, m0=1) -> ModelParams:
    """Build a :class:`ModelParams` from six raw numbers, rejecting bad input."""
    return ModelParams(a, b, alpha, beta, n0, m0)


def classify_regime(params: ModelParams) -> Regime:
    lam = params.lambda2
    if abs(lam - 0.5) <= CRITICAL_TOL:
        return Regime.CRITICAL
    return Regime.DIFFUSIVE if lam < 0.5 else Regime.SUPERDIFFUSIVE


def conditional_success_prob(params: ModelParams, y: int, proportion: float) -> float:
    """P(X = 1 | Y = y, N/(N+M) = proportion) = a + b*y*proportion."""
    if y not in (-1, 0, 1):
        raise DomainError(f"trend value must be -1, 0 or +1, got {y!r}")
    if not 0.0 <= proportion <= 1.0:
        raise DomainError(f"proportion {proportion} outside [0, 1]")
    if y == 0:
        return params.a
    if y == 1:
        return params.a + params.b * proportion
    return params.a - params.b * proportion


def mean_success_prob(params: ModelParams, state: PopulationState) -> float:
    """Success probability averaged over the latent trend."""
    return params.a + params.lambda2 * state.n_count / state.total


def limiting_proportions(params: ModelParams) -> tuple[float, float]:
    """Almost-sure limits of ``N_n/(N_n+M_n)`` and ``M_n/(N_n+M_n)``."""
    lam = params.lambda2
    p_a = params.a / (1.0 - lam)
    return p_a, (1.0 - params.a - lam) / (1.0 - lam)
