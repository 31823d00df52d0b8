"""Experiment configuration shared by the CLI and its output provenance."""
from __future__ import annotations

import dataclasses
import hashlib
import json
import math
from dataclasses import dataclass, field

from . import __version__
from .errors import DomainError
from .model import ModelParams
from .rng import GENERATOR_NAME

__all__ = ["COMMANDS", "GRID_MODES", "SUITES", "ExperimentConfig", "resolve_grid", "provenance", "canonical_json"]

COMMANDS = ("theory", "simulate", "exact", "verify")
SUITES = ("lln", "clt", "critical", "scaling", "elephant", "functional", "oracle")
GRID_MODES = ("steps", "fractions", "powers")
FORMATS = ("csv", "json")

#: Fields that only affect how a run executes, not what it produces.
EXECUTION_FIELDS = ("out", "threads")


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


@dataclass
class ExperimentConfig:
    command: str
    params: dict = field(default_factory=dict)
    suite: str | None = None
    steps: int | None = None
    reps: int | None = None
    snapshots: list | None = None
    grid_mode: str = "steps"
    seed: int = 0
    format: str = "csv"
    tol: float | None = None
    mem_cap: int | None = None
    bhw: dict | None = None
    out: str | None = None
    threads: int | None = None

    def validate(self) -> "ExperimentConfig":
        if self.command not in COMMANDS:
            raise DomainError(f"unknown command {self.command!r}")
        if self.command == "verify" and self.suite not in SUITES:
            raise DomainError(f"unknown verify suite {self.suite!r}; choose from {', '.join(SUITES)}")
        if self.grid_mode not in GRID_MODES:
            raise DomainError(f"grid mode must be one of {GRID_MODES}")
        if self.format not in FORMATS:
            raise DomainError(f"format must be one of {FORMATS}")
        for name in ("steps", "reps", "mem_cap", "threads"):
            value = getattr(self, name)
            if value is not None and (not isinstance(value, int) or value < (1 if name != "steps" else 0)):
                raise DomainError(f"{name} must be a {'non-negative' if name == 'steps' else 'positive'} integer")
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise DomainError("seed must be an unsigned 64-bit integer")
        if self.tol is not None and not (isinstance(self.tol, (int, float)) and self.tol > 0 and math.isfinite(self.tol)):
            raise DomainError("tol must be a positive number")
        if self.snapshots is not None:
            if not self.snapshots or not all(isinstance(v, (int, float)) and math.isfinite(v) for v in self.snapshots):
                raise DomainError("snapshots must be a non-empty list of numbers")
        if self.bhw is None:
            self.model_params()
        return self

    def model_params(self) -> ModelParams:
        return ModelParams(**self.params)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise DomainError(f"unknown config fields: {sorted(unknown)}")
        return cls(**data)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        return cls.from_dict(json.loads(text))

    def content_dict(self) -> dict:
        """The fields that determine the output, for provenance and hashing."""
        data = self.to_dict()
        for name in EXECUTION_FIELDS:
            data.pop(name)
        return data

    def content_hash(self) -> str:
        return hashlib.sha256(canonical_json(self.content_dict()).encode()).hexdigest()


def resolve_grid(steps: int, snapshots, mode: str = "steps") -> list[int]:
    """Turn a snapshot specification into sorted absolute steps.

    ``fractions`` maps ``f`` to ``floor(f * steps)`` and ``powers`` maps ``f``
    to ``floor(steps ** f)``.  Duplicates collapse.
    """
    if snapshots is None:
        return [steps]
    if mode == "steps":
        values = []
        for v in snapshots:
            if float(v) != int(v):
                raise DomainError(f"snapshot {v} is not an integer step")
            values.append(int(v))
    elif mode == "fractions":
        values = [math.floor(float(f) * steps) for f in snapshots]
    elif mode == "powers":
        if any(f < 0 for f in snapshots):
            raise DomainError("powers must be non-negative")
        values = [math.floor(steps ** float(f)) for f in snapshots]
    else:
        raise DomainError(f"unknown grid mode {mode!r}")
    grid = sorted(set(values))
    if grid[0] < 0 or grid[-1] > steps:
        raise DomainError(f"snapshots must lie within [0, {steps}]")
    return grid


def provenance(config: ExperimentConfig) -> dict:
    return {
        "config": config.content_dict(),
        "config_hash": config.content_hash(),
        "seed": config.seed,
        "generator": GENERATOR_NAME,
        "version": __version__,
    }
