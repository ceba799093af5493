"""Hologram solvers: random superposition, weighted iterations, and the
compressed-subset variant, plus frame-budget planning.

Operation accounting follows the linear cost model used for budgeting:
one unit is one (pixel, spot) pairing of an iteration, so an iteration
over ``r`` pixels with ``n`` spots adds ``r * n`` units. A full weighted
run of ``I`` iterations therefore counts ``M * N * I`` units; the
compressed variant counts ``2*M*N + ceil(c*M)*N*(I-2)``; the one-shot
random superposition counts ``M * N``. The seed superposition that
starts an iterative run is part of its first unit, not counted twice.

Determinism: a run is a pure function of (pupil, spots, iterations,
compression, seed, chunk); results are bitwise independent of the worker
count.
"""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateFieldError, InvalidParameterError
from .kernels import (DEFAULT_CHUNK, SpotCoefficients, SpotTables,
                      forward_project, spot_tables, superpose)
from .optics import CompressionPlan, Hologram, Pupil, SpotSet

ALGORITHMS = ("rs", "wgs", "cswgs")

# Relative floor applied to a vanished spot magnitude before the weight
# update, so one dark spot cannot divide the update by zero.
DEGENERACY_FLOOR = 1e-6


@dataclass(frozen=True)
class SolverConfig:
    """Run parameters for one solver invocation."""

    algorithm: str
    iterations: int = 30
    compression: float = 1.0
    seed: int = 0
    budget_ops: int | None = None

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise InvalidParameterError(f"unknown algorithm {self.algorithm!r}")
        if self.iterations < 1:
            raise InvalidParameterError("iterations must be >= 1")
        if self.algorithm == "cswgs":
            if self.iterations < 2:
                raise InvalidParameterError(
                    "cswgs needs iterations >= 2 (the two final full passes)")
            if not 0.0 < self.compression <= 1.0:
                raise InvalidParameterError("compression must be in (0, 1]")


@dataclass(frozen=True)
class StepRecord:
    """One iteration of a weighted run, as seen by the trace."""

    iteration: int
    weights: np.ndarray
    magnitudes: np.ndarray
    subset_size: int
    ops: int
    degenerate: bool


@dataclass(frozen=True)
class SolverTrace:
    """Per-run record: iteration history, cost-model units, wall time."""

    algorithm: str
    records: tuple[StepRecord, ...]
    operation_count: int
    wall_time_s: float
    degenerate: bool
    hologram: Hologram


@dataclass(frozen=True)
class WgsState:
    """State threaded through weighted iterations."""

    weights: np.ndarray
    amplitudes: np.ndarray
    thetas: np.ndarray
    hologram: Hologram
    degenerate: bool = False


def _field_phases(fields: np.ndarray) -> np.ndarray:
    """Vectorised argument in [-pi, pi) with arg(0) = 0."""
    ph = np.arctan2(fields.imag, fields.real)
    ph = np.where(ph == math.pi, -math.pi, ph)
    zero = (fields.real == 0.0) & (fields.imag == 0.0)
    return np.where(zero, 0.0, ph)


def rebalance_weights(weights: np.ndarray,
                      magnitudes: np.ndarray) -> tuple[np.ndarray, np.ndarray, bool]:
    """Mean-over-own magnitude weight update.

    Each weight is multiplied by the arithmetic mean of the spot
    magnitudes divided by the spot's own magnitude, pulling dim spots up
    and bright spots down. A magnitude of exactly zero is floored to the
    smallest positive magnitude times ``DEGENERACY_FLOOR`` and flagged;
    if every magnitude vanishes the update has no anchor and
    :class:`DegenerateFieldError` is raised. Returns (new weights, the
    magnitudes actually used, degeneracy flag).
    """
    mags = np.asarray(magnitudes, dtype=np.float64)
    degenerate = bool(np.any(mags == 0.0))
    if degenerate:
        positive = mags[mags > 0.0]
        if positive.size == 0:
            raise DegenerateFieldError("all spot fields vanished; cannot rebalance")
        mags = np.where(mags == 0.0, positive.min() * DEGENERACY_FLOOR, mags)
    with np.errstate(over="ignore"):
        new_weights = weights * (np.mean(mags) / mags)
    if not np.all(np.isfinite(new_weights)):
        # Equalising structurally coupled spots diverges geometrically;
        # fail loudly instead of emitting non-finite holograms.
        raise DegenerateFieldError("spot weights diverged beyond float range")
    return new_weights, mags, degenerate


def wgs_step(pupil: Pupil, spots: SpotSet, state: WgsState, pixel_range=None,
             write_range=None, chunk: int = DEFAULT_CHUNK, workers: int = 1,
             tables: SpotTables | None = None) -> tuple[WgsState, np.ndarray]:
    """One weighted iteration over a pixel range.

    Projects the current hologram onto the spots over ``pixel_range``,
    rebalances the weights, conjugates the spot phases, then superposes
    the next hologram. The superposition covers ``write_range`` when
    given (the compressed schedule reads the window it last wrote while
    writing a shifted one), otherwise the same range that was read.
    Returns the new state and the spot magnitudes that drove the update.
    """
    if tables is None:
        tables = spot_tables(pupil, spots)
    fields = forward_project(pupil, state.hologram, spots, pixel_range,
                             chunk=chunk, workers=workers, tables=tables)
    mags = np.hypot(fields.real, fields.imag)
    weights, mags, degenerate = rebalance_weights(state.weights, mags)
    amplitudes = weights * spots.amplitude
    thetas = _field_phases(fields)

    if write_range is None:
        write_range = pixel_range
    fragment = superpose(pupil, spots, SpotCoefficients(amplitudes, thetas),
                         write_range, workers=workers, tables=tables)
    start, stop = (0, pupil.active_count) if write_range is None else write_range
    phase = np.array(state.hologram.phase)
    phase[start:stop] = fragment
    new_state = WgsState(weights=weights, amplitudes=amplitudes, thetas=thetas,
                         hologram=Hologram(phase, pupil),
                         degenerate=state.degenerate or degenerate)
    return new_state, mags


def _seed_state(pupil: Pupil, spots: SpotSet, seed: int, workers: int,
                tables: SpotTables) -> WgsState:
    """Random-phase start: weights 1, random phase offsets, full hologram."""
    rng = np.random.default_rng(seed)
    thetas = rng.random(spots.count) * (2.0 * math.pi)
    weights = np.ones(spots.count)
    amplitudes = weights * spots.amplitude
    fragment = superpose(pupil, spots, SpotCoefficients(amplitudes, thetas),
                         workers=workers, tables=tables)
    return WgsState(weights=weights, amplitudes=amplitudes, thetas=thetas,
                    hologram=Hologram(fragment, pupil))


def rs(pupil: Pupil, spots: SpotSet, seed: int = 0,
       workers: int = 1) -> tuple[Hologram, SolverTrace]:
    """One-shot hologram from random per-spot phase offsets."""
    t0 = time.perf_counter()
    tables = spot_tables(pupil, spots)
    state = _seed_state(pupil, spots, seed, workers, tables)
    ops = pupil.active_count * spots.count
    trace = SolverTrace(algorithm="rs", records=(), operation_count=ops,
                        wall_time_s=time.perf_counter() - t0,
                        degenerate=False, hologram=state.hologram)
    return state.hologram, trace


def _iterate(algorithm: str, pupil: Pupil, spots: SpotSet, iterations: int,
             subset_size: int, seed: int, chunk: int,
             workers: int) -> tuple[Hologram, SolverTrace]:
    """Weighted iteration engine shared by the full and compressed runs.

    Compressed iterations slide a subset-sized window across the
    shuffled storage order in half-window steps, so successive
    iterations sample fresh random pixel subsets from the one fixed
    shuffle. Each forward projection reads the window the previous
    superposition wrote (always a coherent snapshot of one coefficient
    set, never a mosaic of several); the first full iteration then
    rewrites the whole hologram before any full-range projection reads
    it.
    """
    t0 = time.perf_counter()
    m = pupil.active_count
    n = spots.count
    tables = spot_tables(pupil, spots)
    state = _seed_state(pupil, spots, seed, workers, tables)

    compressed_steps = max(0, iterations - 2) if subset_size < m else 0
    half = max(1, subset_size // 2)
    read_range = (0, subset_size) if compressed_steps else (0, m)
    ops = 0
    records = []
    for j in range(1, iterations + 1):
        if j <= compressed_steps:
            offset = ((j - 1) * half) % (m - subset_size + 1)
            write_range = (offset, offset + subset_size)
        else:
            write_range = (0, m)
        state, mags = wgs_step(pupil, spots, state, read_range, write_range,
                               chunk=chunk, workers=workers, tables=tables)
        size = write_range[1] - write_range[0]
        ops += size * n
        records.append(StepRecord(iteration=j, weights=state.weights,
                                  magnitudes=mags, subset_size=size, ops=ops,
                                  degenerate=state.degenerate))
        read_range = write_range
    trace = SolverTrace(algorithm=algorithm, records=tuple(records),
                        operation_count=ops,
                        wall_time_s=time.perf_counter() - t0,
                        degenerate=state.degenerate, hologram=state.hologram)
    return state.hologram, trace


def wgs(pupil: Pupil, spots: SpotSet, iterations: int = 30, seed: int = 0,
        chunk: int = DEFAULT_CHUNK, workers: int = 1) -> tuple[Hologram, SolverTrace]:
    """Weighted iterative run over the full pixel range."""
    if iterations < 1:
        raise InvalidParameterError("iterations must be >= 1")
    return _iterate("wgs", pupil, spots, iterations, pupil.active_count,
                    seed, chunk, workers)


def cswgs(pupil: Pupil, spots: SpotSet, iterations: int, compression: float,
          seed: int = 0, chunk: int = DEFAULT_CHUNK,
          workers: int = 1) -> tuple[Hologram, SolverTrace]:
    """Compressed-subset weighted run.

    Iterations ``1 .. I-2`` project and update only ``ceil(c*M)``
    storage-order pixels per step, a window that slides across the
    shuffled aperture so every compressed iteration samples a fresh,
    uniformly random pixel subset; the final two iterations run at full
    size and the last superposition rewrites the complete hologram.
    Off-window pixels keep stale phases until those final passes.
    ``compression`` of 1 reproduces :func:`wgs` bit for bit.
    """
    if iterations < 2:
        raise InvalidParameterError("cswgs needs iterations >= 2")
    plan = CompressionPlan.for_pupil(pupil, compression)
    if plan.subset_size < spots.count:
        warnings.warn(
            f"compressed subset of {plan.subset_size} pixels is smaller than "
            f"the {spots.count}-spot system; iterations are underdetermined",
            RuntimeWarning, stacklevel=2)
    return _iterate("cswgs", pupil, spots, iterations, plan.subset_size,
                    seed, chunk, workers)


def solve(pupil: Pupil, spots: SpotSet, config: SolverConfig,
          chunk: int = DEFAULT_CHUNK, workers: int = 1) -> tuple[Hologram, SolverTrace]:
    """Dispatch a :class:`SolverConfig` to the matching algorithm."""
    if config.algorithm == "rs":
        return rs(pupil, spots, seed=config.seed, workers=workers)
    if config.algorithm == "wgs":
        return wgs(pupil, spots, iterations=config.iterations, seed=config.seed,
                   chunk=chunk, workers=workers)
    return cswgs(pupil, spots, iterations=config.iterations,
                 compression=config.compression, seed=config.seed,
                 chunk=chunk, workers=workers)


def predict_ops(algorithm: str, m: int, n: int, iterations: int = 1,
                compression: float = 1.0) -> int:
    """Cost-model units a run will consume (exact integer arithmetic)."""
    if algorithm == "rs":
        return m * n
    if algorithm == "wgs":
        return m * n * iterations
    if algorithm == "cswgs":
        subset = math.ceil(compression * m)
        return 2 * m * n + subset * n * (iterations - 2)
    raise InvalidParameterError(f"unknown algorithm {algorithm!r}")


@dataclass(frozen=True)
class PlannedRun:
    """Iteration count chosen for a budget, with its predicted cost."""

    algorithm: str
    iterations: int
    over_budget: bool
    predicted_ops: int


def budget_controller(algorithm: str, m: int, n: int, budget_ops: int,
                      compression: float = 1.0) -> PlannedRun:
    """Largest iteration count whose predicted cost fits the budget.

    The weighted run never plans below one iteration and the compressed
    variant never below its two mandatory full iterations; when even the
    minimum exceeds the budget the plan is flagged ``over_budget``.
    """
    if budget_ops <= 0:
        raise InvalidParameterError("budget_ops must be > 0")
    if algorithm == "rs":
        cost = predict_ops("rs", m, n)
        return PlannedRun("rs", 1, cost > budget_ops, cost)
    if algorithm == "wgs":
        iters = max(1, budget_ops // (m * n))
        cost = predict_ops("wgs", m, n, iters)
        return PlannedRun("wgs", iters, cost > budget_ops, cost)
    if algorithm == "cswgs":
        subset = math.ceil(compression * m)
        spare = budget_ops - 2 * m * n
        iters = 2 + max(0, spare // (subset * n)) if spare >= 0 else 2
        cost = predict_ops("cswgs", m, n, iters, compression)
        return PlannedRun("cswgs", iters, cost > budget_ops, cost)
    raise InvalidParameterError(f"unknown algorithm {algorithm!r}")
