"""Efficiency and uniformity of a hologram's spot pattern.

Normalisation: a spot's intensity is its forward-projected power divided
by the squared total illumination amplitude, so a single perfectly
conjugated spot scores exactly 1 and efficiency is the dimensionless
fraction of available power landing on the targets. Uniformity is the
max/min contrast of the target-relative intensities, so a pattern that
hits every requested intensity ratio scores 1 even when the requested
ratios differ.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import UndefinedUniformityError, ZeroIlluminationError
from .kernels import DEFAULT_CHUNK, SpotTables, forward_project
from .optics import Hologram, Pupil, SpotSet


@dataclass(frozen=True)
class QualityReport:
    """Efficiency, uniformity and the per-spot intensities behind them."""

    efficiency: float
    uniformity: float
    intensities: np.ndarray
    target_relative: np.ndarray


def spot_intensities(pupil: Pupil, hologram: Hologram, spots: SpotSet,
                     chunk: int = DEFAULT_CHUNK, workers: int = 1,
                     tables: SpotTables | None = None) -> np.ndarray:
    """Normalised intensity of each spot under the full-range projection."""
    if pupil.sum_amplitude <= 0.0:
        raise ZeroIlluminationError("pupil carries no illumination")
    fields = forward_project(pupil, hologram, spots, chunk=chunk,
                             workers=workers, tables=tables)
    norm = pupil.sum_amplitude * pupil.sum_amplitude
    return (fields.real * fields.real + fields.imag * fields.imag) / norm


def efficiency(intensities) -> float:
    """Total normalised power on the targets: the sum of intensities."""
    arr = np.asarray(intensities, dtype=np.float64)
    if arr.size == 0:
        raise UndefinedUniformityError("empty intensity list")
    return float(np.sum(arr))


def uniformity(rel_intensities) -> float:
    """One minus the max/min contrast; 1 means perfectly even."""
    arr = np.asarray(rel_intensities, dtype=np.float64)
    if arr.size == 0:
        raise UndefinedUniformityError("empty intensity list")
    hi = float(np.max(arr))
    lo = float(np.min(arr))
    if hi == 0.0:
        raise UndefinedUniformityError("all spot intensities are zero")
    return 1.0 - (hi - lo) / (hi + lo)


def target_relative(intensities: np.ndarray, spots: SpotSet) -> np.ndarray:
    """Intensities divided by their requested relative intensities."""
    targets = spots.amplitude * spots.amplitude
    return np.asarray(intensities, dtype=np.float64) / targets


def quality_report(pupil: Pupil, hologram: Hologram, spots: SpotSet,
                   chunk: int = DEFAULT_CHUNK, workers: int = 1,
                   tables: SpotTables | None = None) -> QualityReport:
    """Full report for one hologram against its target spot set."""
    inten = spot_intensities(pupil, hologram, spots, chunk=chunk,
                             workers=workers, tables=tables)
    rel = target_relative(inten, spots)
    return QualityReport(efficiency=efficiency(inten), uniformity=uniformity(rel),
                         intensities=inten, target_relative=rel)
