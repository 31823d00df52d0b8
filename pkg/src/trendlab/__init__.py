"""Simulation, exact computation and limit-theorem checks for the random-trend diffusion model."""

__version__ = "0.1.0"

from .errors import (
    ConstraintViolation,
    DegenerateSpectrum,
    DomainError,
    QuadratureFailure,
    RegimeMismatch,
    ResourceLimit,
    TrendlabError,
)
from .model import (
    ModelParams,
    PopulationState,
    Regime,
    classify_regime,
    conditional_success_prob,
    limiting_proportions,
    mean_success_prob,
    validate_params,
)
from .rng import SeedSpec, Stream
from .sim import Ensemble, EnsembleMoments, Trajectory, monte_carlo, monte_carlo_moments, run_trajectory, step
from .oracle import ExactDist, ExactMoments, exact_distribution, exact_moments
from . import stats, theory

__all__ = [
    "__version__",
    "ConstraintViolation",
    "DegenerateSpectrum",
    "DomainError",
    "QuadratureFailure",
    "RegimeMismatch",
    "ResourceLimit",
    "TrendlabError",
    "ModelParams",
    "PopulationState",
    "Regime",
    "classify_regime",
    "conditional_success_prob",
    "limiting_proportions",
    "mean_success_prob",
    "validate_params",
    "SeedSpec",
    "Stream",
    "Ensemble",
    "EnsembleMoments",
    "Trajectory",
    "monte_carlo",
    "monte_carlo_moments",
    "run_trajectory",
    "step",
    "ExactDist",
    "ExactMoments",
    "exact_distribution",
    "exact_moments",
    "stats",
    "theory",
]
