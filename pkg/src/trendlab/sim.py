"""Monte Carlo simulation of the random-trend model.

Every step consumes exactly two uniforms from the replicate's stream: the
first selects the trend (``+1`` if ``u < alpha``, ``-1`` if
``u < alpha + beta``, else ``0``), the second decides the opinion.  Replicate
``r`` always uses stream ``r`` of the seed, so results do not depend on how
replicates are split across threads.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__, kernels
from .errors import DomainError, ResourceLimit
from .model import ModelParams, PopulationState
from .rng import GENERATOR_NAME, SeedSpec, Stream

__all__ = [
    "DEFAULT_MEM_CAP",
    "Trajectory",
    "Ensemble",
    "EnsembleMoments",
    "step",
    "run_trajectory",
    "monte_carlo",
    "monte_carlo_moments",
    "mem_cap",
]

#: Default byte budget for a full ensemble; override with ``TRENDLAB_MEM_CAP``.
DEFAULT_MEM_CAP = 512 * 2**20

# replicates handed to one kernel call; fixed so the streaming merge order is too
CHUNK = 1024


def mem_cap() -> int:
    raw = os.environ.get("TRENDLAB_MEM_CAP")
    if not raw:
        return DEFAULT_MEM_CAP
    try:
        value = int(float(raw))
    except ValueError:
        raise DomainError(f"TRENDLAB_MEM_CAP must be a byte count, got {raw!r}") from None
    if value <= 0:
        raise DomainError("TRENDLAB_MEM_CAP must be positive")
    return value


def _as_seed(seed) -> SeedSpec:
    return seed if isinstance(seed, SeedSpec) else SeedSpec(int(seed))


def _check_grid(steps, grid):
    if steps < 0:
        raise DomainError(f"steps must be non-negative, got {steps}")
    grid = np.asarray(grid, dtype=np.int64).ravel()
    if grid.size == 0:
        raise DomainError("snapshot grid is empty")
    if np.any(np.diff(grid) <= 0):
        raise DomainError("snapshot grid must be strictly increasing")
    if grid[0] < 0 or grid[-1] > steps:
        raise DomainError(f"snapshot grid must lie within [0, {steps}]")
    return np.ascontiguousarray(grid)


def _kernel_args(params: ModelParams):
    return (params.a, params.b, params.alpha, params.alpha + params.beta, params.n0, params.m0)


def step(state: PopulationState, params: ModelParams, rng: Stream) -> PopulationState:
    """Advance one decision, consuming two uniforms from ``rng``."""
    u_trend = rng.random()
    u_choice = rng.random()
    bx = params.b * (state.n_count / state.total)
    if u_trend < params.alpha:
        shift = bx
    elif u_trend < params.alpha + params.beta:
        shift = -bx
    else:
        shift = 0.0
    if u_choice < params.a + shift:
        return PopulationState(state.n_count + 1, state.m_count, state.step + 1)
    return PopulationState(state.n_count, state.m_count + 1, state.step + 1)


@dataclass(frozen=True)
class Trajectory:
    params: ModelParams
    steps: np.ndarray
    n_counts: np.ndarray

    @property
    def m_counts(self) -> np.ndarray:
        return self.params.seeders + self.steps - self.n_counts

    @property
    def snapshots(self) -> list[tuple[int, int, int]]:
        return [(int(s), int(n), int(m)) for s, n, m in zip(self.steps, self.n_counts, self.m_counts)]

    def states(self) -> list[PopulationState]:
        return [PopulationState(n, m, s) for s, n, m in self.snapshots]


def run_trajectory(params: ModelParams, steps: int, snapshot_grid, rng: Stream) -> Trajectory:
    """Simulate one path, recording the counts at ``snapshot_grid``."""
    grid = _check_grid(steps, snapshot_grid)
    keys = np.array([rng.key], dtype=np.uint64)
    counts = kernels.simulate_counts(keys, *_kernel_args(params), steps, grid, rng.counter)
    rng.advance(2 * steps)
    return Trajectory(params, grid, counts[0])


def _simulate_block(params, steps, grid, seed, start, stop):
    keys = seed.keys(start, stop)
    return kernels.simulate_counts(keys, *_kernel_args(params), steps, grid)


def _chunks(reps):
    return [(start, min(start + CHUNK, reps)) for start in range(0, reps, CHUNK)]


def _run_chunks(func, reps, threads):
    chunks = _chunks(reps)
    threads = threads or os.cpu_count() or 1
    if threads <= 1 or len(chunks) == 1:
        return [func(*c) for c in chunks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda c: func(*c), chunks))


@dataclass
class Ensemble:
    """Replicate counts ``n_counts[g, r]`` of opinion A at snapshot ``grid[g]``."""

    params: ModelParams
    seed: SeedSpec
    steps: int
    grid: np.ndarray
    n_counts: np.ndarray
    metadata: dict = field(default_factory=dict)

    @property
    def reps(self) -> int:
        return self.n_counts.shape[1]

    @property
    def m_counts(self) -> np.ndarray:
        return self.params.seeders + self.grid[:, None] - self.n_counts

    def index(self, step: int) -> int:
        hits = np.flatnonzero(self.grid == step)
        if hits.size == 0:
            raise DomainError(f"step {step} is not on the snapshot grid")
        return int(hits[0])

    def at(self, step: int) -> np.ndarray:
        return self.n_counts[self.index(step)]

    def trajectory(self, replicate: int) -> Trajectory:
        return Trajectory(self.params, self.grid.copy(), self.n_counts[:, replicate].copy())


def _metadata(seed):
    return {"generator": GENERATOR_NAME, "version": __version__, "master_seed": seed.master_seed}


def monte_carlo(params: ModelParams, steps: int, snapshot_grid, reps: int, seed=0, threads=None, cap=None) -> Ensemble:
    """Run ``reps`` independent replicates and keep every snapshot.

    Raises :class:`ResourceLimit` when the count table would exceed ``cap``
    bytes (default from :func:`mem_cap`); use :func:`monte_carlo_moments` then.
    """
    if reps < 1:
        raise DomainError(f"reps must be at least 1, got {reps}")
    grid = _check_grid(steps, snapshot_grid)
    seed = _as_seed(seed)
    cap = mem_cap() if cap is None else cap
    needed = 8 * reps * grid.size
    if needed > cap:
        raise ResourceLimit(f"ensemble needs {needed} bytes, above the cap of {cap}; use streaming moments")
    counts = np.empty((grid.size, reps), dtype=np.int64)

    def work(start, stop):
        counts[:, start:stop] = _simulate_block(params, steps, grid, seed, start, stop).T

    _run_chunks(work, reps, threads)
    return Ensemble(params, seed, steps, grid, counts, _metadata(seed))


@dataclass
class EnsembleMoments:
    """Streaming summary: per-snapshot central moment sums and pair co-moments.

    ``m2``, ``m3`` and ``m4`` hold sums of powers of deviations from ``mean``
    (not divided by the count).
    """

    params: ModelParams
    seed: SeedSpec
    steps: int
    grid: np.ndarray
    count: int
    mean: np.ndarray
    m2: np.ndarray
    m3: np.ndarray
    m4: np.ndarray
    pairs: tuple = ()
    comoment: np.ndarray = field(default_factory=lambda: np.zeros(0))
    metadata: dict = field(default_factory=dict)

    @property
    def variance(self) -> np.ndarray:
        return self.m2 / (self.count - 1) if self.count > 1 else np.zeros_like(self.m2)

    @property
    def skewness(self) -> np.ndarray:
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.sqrt(self.count) * self.m3 / self.m2**1.5

    @property
    def excess_kurtosis(self) -> np.ndarray:
        with np.errstate(invalid="ignore", divide="ignore"):
            return self.count * self.m4 / self.m2**2 - 3.0

    def covariance(self, s_step: int, t_step: int) -> float:
        k = self.pairs.index((s_step, t_step))
        return float(self.comoment[k] / (self.count - 1))


def _block_moments(x, pair_idx):
    # x has shape (G, r) as float64
    n = x.shape[1]
    mean = x.mean(axis=1)
    d = x - mean[:, None]
    d2 = d * d
    m2 = d2.sum(axis=1)
    m3 = (d2 * d).sum(axis=1)
    m4 = (d2 * d2).sum(axis=1)
    co = np.array([np.dot(d[i], d[j]) for i, j in pair_idx])
    return n, mean, m2, m3, m4, co


def _merge(acc, blk, pair_idx):
    na, ma, m2a, m3a, m4a, ca = acc
    nb, mb, m2b, m3b, m4b, cb = blk
    n = na + nb
    delta = mb - ma
    mean = ma + delta * nb / n
    m2 = m2a + m2b + delta**2 * na * nb / n
    m3 = m3a + m3b + delta**3 * na * nb * (na - nb) / n**2 + 3.0 * delta * (na * m2b - nb * m2a) / n
    m4 = (
        m4a
        + m4b
        + delta**4 * na * nb * (na * na - na * nb + nb * nb) / n**3
        + 6.0 * delta**2 * (na * na * m2b + nb * nb * m2a) / n**2
        + 4.0 * delta * (na * m3b - nb * m3a) / n
    )
    co = ca + cb + np.array([delta[i] * delta[j] for i, j in pair_idx]) * na * nb / n
    return n, mean, m2, m3, m4, co


def monte_carlo_moments(
    params: ModelParams, steps: int, snapshot_grid, reps: int, seed=0, pairs=(), threads=None
) -> EnsembleMoments:
    """Like :func:`monte_carlo` but keeps only moment accumulators.

    Blocks of replicates are reduced independently and merged in replicate
    order, so the result is identical for any thread count.
    """
    if reps < 1:
        raise DomainError(f"reps must be at least 1, got {reps}")
    grid = _check_grid(steps, snapshot_grid)
    seed = _as_seed(seed)
    pairs = tuple((int(s), int(t)) for s, t in pairs)
    lookup = {int(g): i for i, g in enumerate(grid)}
    try:
        pair_idx = [(lookup[s], lookup[t]) for s, t in pairs]
    except KeyError as exc:
        raise DomainError(f"pair step {exc.args[0]} is not on the snapshot grid") from None

    def work(start, stop):
        block = _simulate_block(params, steps, grid, seed, start, stop).T.astype(np.float64)
        return _block_moments(block, pair_idx)

    blocks = _run_chunks(work, reps, threads)
    acc = blocks[0]
    for blk in blocks[1:]:
        acc = _merge(acc, blk, pair_idx)
    n, mean, m2, m3, m4, co = acc
    return EnsembleMoments(params, seed, steps, grid, n, mean, m2, m3, m4, pairs, co, _metadata(seed))
