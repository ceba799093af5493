"""Multi-spot hologram synthesis for phase-only spatial light modulators.

The package computes SLM phase masks that focus a coherent beam into an
arbitrary 3D pattern of spots, compares the one-shot random-phase start
against weighted iterative refinement and its compressed-subset variant,
and provides an exact far-field oracle, quality metrics, frame-budget
planning and file export.
"""

from .bench import (BenchRecord, BudgetComparison, CellStats, compare_at_budget,
                    summarize, sweep)
from .errors import (DegenerateFieldError, GeometryMismatchError, HoloError,
                     InvalidParameterError, OutOfFieldError,
                     UndefinedUniformityError, ZeroIlluminationError)
from .fileio import (PhaseLut, load_hologram_pgm, load_hologram_raw, read_pgm,
                     write_field_pgm, write_field_raw, write_hologram_pgm,
                     write_pgm, write_phase_raw)
from .kernels import (DEFAULT_CHUNK, SpotCoefficients, forward_project,
                      reduce_complex, spot_tables, superpose)
from .metrics import (QualityReport, efficiency, quality_report,
                      spot_intensities, target_relative, uniformity)
from .optics import (CompressionPlan, Hologram, Pupil, SpotSet, build_pupil,
                     load_spot_list, spot_phase, wrap_phase)
from .scenarios import (Scenario, cubes_scenario, grid_scenario, named_scenario,
                        load_scenario_file, rotation_sweep)
from .simulate import FieldImage, probe_intensities, render_plane
from .solvers import (PlannedRun, SolverConfig, SolverTrace, WgsState,
                      budget_controller, cswgs, predict_ops, rebalance_weights,
                      rs, solve, wgs, wgs_step)

__version__ = "0.1.0"
