"""Benchmark harness: compression sweeps and budgeted comparisons.

A sweep is a full factorial over scenarios x algorithms x compression
ratios x seeds. Seed index ``k`` always runs on rotation frame ``k`` of
the scenario, so repeated seeds vary both the random phase start and the
pattern orientation. Failed cells are recorded with a failure flag and
NaN metrics; they never abort the sweep. Re-running an identical
configuration reproduces every column bit for bit except wall time.
"""

from __future__ import annotations

import io
import time
from dataclasses import dataclass

import numpy as np

from . import metrics, solvers
from .errors import InvalidParameterError
from .kernels import DEFAULT_CHUNK
from .optics import Pupil, SpotSet
from .scenarios import Scenario, rotation_sweep

CSV_HEADER = "scenario,algorithm,c,iterations,ops,wall_ms,efficiency,uniformity,seed,flags"

# Compression axis used for sweeps and best-c searches: 2^-1 .. 2^-8.
DEFAULT_C_SWEEP = tuple(2.0 ** -k for k in range(1, 9))

# Default frame budget, milliseconds per hologram.
DEFAULT_FRAME_MS = 64.0


@dataclass(frozen=True)
class BenchRecord:
    """One (scenario, algorithm, c, seed) cell of a sweep."""

    scenario: str
    algorithm: str
    c: float
    iterations: int
    ops: int
    wall_ms: float
    efficiency: float
    uniformity: float
    seed: int
    flags: str


@dataclass(frozen=True)
class CellStats:
    """Across-seed statistics of one (scenario, algorithm, c) cell."""

    scenario: str
    algorithm: str
    c: float
    iterations: int
    runs: int
    mean_efficiency: float
    std_efficiency: float
    mean_uniformity: float
    std_uniformity: float


def _fmt(x: float) -> str:
    return format(x, ".9g")


def run_cell(pupil: Pupil, spots: SpotSet, scenario_name: str, algorithm: str,
             c: float, budget_ops: int, seed: int,
             chunk: int = DEFAULT_CHUNK, workers: int = 1) -> BenchRecord:
    """Run one budgeted cell and measure its quality metrics."""
    plan = solvers.budget_controller(algorithm, pupil.active_count, spots.count,
                                     budget_ops, compression=c)
    flags = ["over_budget"] if plan.over_budget else []
    t0 = time.perf_counter()
    try:
        config = solvers.SolverConfig(algorithm=algorithm, iterations=plan.iterations,
                                      compression=c, seed=seed)
        hologram, trace = solvers.solve(pupil, spots, config, chunk=chunk,
                                        workers=workers)
        report = metrics.quality_report(pupil, hologram, spots, chunk=chunk,
                                        workers=workers)
    except Exception as exc:  # per-cell isolation: a sweep must not abort
        wall_ms = (time.perf_counter() - t0) * 1e3
        flags.append(f"failed:{type(exc).__name__}")
        return BenchRecord(scenario=scenario_name, algorithm=algorithm, c=c,
                           iterations=plan.iterations, ops=0, wall_ms=wall_ms,
                           efficiency=float("nan"), uniformity=float("nan"),
                           seed=seed, flags="+".join(flags))
    wall_ms = (time.perf_counter() - t0) * 1e3
    if trace.degenerate:
        flags.append("degenerate")
    return BenchRecord(scenario=scenario_name, algorithm=algorithm, c=c,
                       iterations=plan.iterations, ops=trace.operation_count,
                       wall_ms=wall_ms, efficiency=report.efficiency,
                       uniformity=report.uniformity, seed=seed,
                       flags="+".join(flags))


def sweep(pupil: Pupil, scenarios, algorithms, c_values, budget_ops: int, seeds,
          chunk: int = DEFAULT_CHUNK, workers: int = 1) -> list[BenchRecord]:
    """Full factorial sweep; output rows follow configuration order.

    ``c`` is a factorial axis: algorithms that ignore compression are
    still run (and labelled) once per c cell, which keeps the table a
    complete grid. Row count is exactly
    ``len(scenarios) * len(algorithms) * len(c_values) * len(seeds)``.
    """
    scenarios = list(scenarios)
    algorithms = list(algorithms)
    c_values = [float(c) for c in c_values]
    seeds = list(seeds)
    if not scenarios or not algorithms or not c_values or not seeds:
        raise InvalidParameterError("sweep axes must be non-empty")
    if budget_ops <= 0:
        raise InvalidParameterError("budget_ops must be > 0")
    records = []
    for scenario in scenarios:
        frames = rotation_sweep(scenario, len(seeds))
        for algorithm in algorithms:
            for c in c_values:
                for k, seed in enumerate(seeds):
                    records.append(run_cell(pupil, frames[k], scenario.name,
                                            algorithm, c, budget_ops, seed,
                                            chunk=chunk, workers=workers))
    return records


def summarize(records) -> list[CellStats]:
    """Across-seed mean and sample standard deviation per cell.

    Failed runs are excluded from the statistics; cells appear in first
    occurrence order.
    """
    order: list[tuple] = []
    cells: dict[tuple, list[BenchRecord]] = {}
    for rec in records:
        key = (rec.scenario, rec.algorithm, rec.c)
        if key not in cells:
            cells[key] = []
            order.append(key)
        cells[key].append(rec)
    stats = []
    for key in order:
        good = [r for r in cells[key] if "failed" not in r.flags]
        if good:
            e = np.array([r.efficiency for r in good])
            u = np.array([r.uniformity for r in good])
            std_e = float(np.std(e, ddof=1)) if e.size > 1 else 0.0
            std_u = float(np.std(u, ddof=1)) if u.size > 1 else 0.0
            stats.append(CellStats(*key, iterations=good[0].iterations,
                                   runs=len(good),
                                   mean_efficiency=float(np.mean(e)),
                                   std_efficiency=std_e,
                                   mean_uniformity=float(np.mean(u)),
                                   std_uniformity=std_u))
        else:
            stats.append(CellStats(*key, iterations=0, runs=0,
                                   mean_efficiency=float("nan"),
                                   std_efficiency=float("nan"),
                                   mean_uniformity=float("nan"),
                                   std_uniformity=float("nan")))
    return stats


@dataclass(frozen=True)
class BudgetComparison:
    """Side-by-side RS / WGS / best-c compressed summary at one budget."""

    scenario: str
    budget_ops: int
    rs: CellStats
    wgs: CellStats
    cswgs_cells: tuple[CellStats, ...]
    best: CellStats

    @property
    def best_c(self) -> float:
        return self.best.c


def compare_at_budget(pupil: Pupil, scenario: Scenario, budget_ops: int, seeds,
                      c_values=DEFAULT_C_SWEEP, chunk: int = DEFAULT_CHUNK,
                      workers: int = 1) -> tuple[BudgetComparison, list[BenchRecord]]:
    """Budgeted three-way comparison on one scenario.

    Runs RS and WGS once per seed and the compressed variant over the
    whole c axis, then reports the compression ratio with the best mean
    uniformity. Returns the summary plus all underlying records.
    """
    seeds = list(seeds)
    if not seeds:
        raise InvalidParameterError("seeds must be non-empty")
    frames = rotation_sweep(scenario, len(seeds))
    records: list[BenchRecord] = []
    for algorithm, cs in (("rs", [1.0]), ("wgs", [1.0]),
                          ("cswgs", [float(c) for c in c_values])):
        for c in cs:
            for k, seed in enumerate(seeds):
                records.append(run_cell(pupil, frames[k], scenario.name,
                                        algorithm, c, budget_ops, seed,
                                        chunk=chunk, workers=workers))
    stats = summarize(records)
    rs_stats = next(s for s in stats if s.algorithm == "rs")
    wgs_stats = next(s for s in stats if s.algorithm == "wgs")
    cs_cells = tuple(s for s in stats if s.algorithm == "cswgs")
    best = max(cs_cells, key=lambda s: (-1.0 if np.isnan(s.mean_uniformity)
                                        else s.mean_uniformity))
    summary = BudgetComparison(scenario=scenario.name, budget_ops=budget_ops,
                               rs=rs_stats, wgs=wgs_stats, cswgs_cells=cs_cells,
                               best=best)
    return summary, records


# ---------------------------------------------------------------------------
# CSV output

def format_records_csv(records) -> str:
    """Pinned per-run table; UTF-8, LF, floats at 9 significant digits."""
    buf = io.StringIO()
    buf.write(CSV_HEADER + "\n")
    for r in records:
        buf.write(",".join([
            r.scenario, r.algorithm, _fmt(r.c), str(r.iterations), str(r.ops),
            _fmt(r.wall_ms), _fmt(r.efficiency), _fmt(r.uniformity),
            str(r.seed), r.flags,
        ]) + "\n")
    return buf.getvalue()


def write_records_csv(path, records) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_records_csv(records))


def format_summary_csv(stats) -> str:
    """Across-seed statistics table (companion format, not the pinned one)."""
    buf = io.StringIO()
    buf.write("scenario,algorithm,c,iterations,runs,"
              "mean_efficiency,std_efficiency,mean_uniformity,std_uniformity\n")
    for s in stats:
        buf.write(",".join([
            s.scenario, s.algorithm, _fmt(s.c), str(s.iterations), str(s.runs),
            _fmt(s.mean_efficiency), _fmt(s.std_efficiency),
            _fmt(s.mean_uniformity), _fmt(s.std_uniformity),
        ]) + "\n")
    return buf.getvalue()


def write_summary_csv(path, stats) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_summary_csv(stats))


# ---------------------------------------------------------------------------
# Machine calibration

def calibrate_ops_per_ms(side_px: int = 256, n_spots: int = 36,
                         iterations: int = 6, chunk: int = DEFAULT_CHUNK,
                         workers: int = 1) -> float:
    """Measure this machine's cost-model units per millisecond.

    Times a short representative weighted run and divides its cost-model
    unit count by the wall time, so a wall-clock frame budget can be
    translated into an operation budget. Kernels are warmed first so the
    one-time JIT load does not pollute the measurement.
    """
    from .kernels import warm_up
    from .optics import build_pupil
    from .scenarios import grid_scenario

    warm_up()
    pupil = build_pupil(side_px, illumination="uniform", seed=0)
    rows = max(1, int(round(n_spots ** 0.5)))
    spots = grid_scenario(rows, max(1, n_spots // rows), 10e-6)
    solvers.wgs(pupil, spots, iterations=1, seed=0, chunk=chunk, workers=workers)
    t0 = time.perf_counter()
    _, trace = solvers.wgs(pupil, spots, iterations=iterations, seed=0,
                           chunk=chunk, workers=workers)
    wall_ms = (time.perf_counter() - t0) * 1e3
    return trace.operation_count / wall_ms
