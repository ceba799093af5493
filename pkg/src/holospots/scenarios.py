"""Benchmark spot patterns: rotating planar grids and a two-cube cloud.

The stock patterns keep every spot well inside a 400 um field of view:
grids of 10 um spacing and two 50 um cubes centred 120 um apart. The
default sweep rotation precesses the pattern about an axis tilted 20
degrees off the optical axis, so a planar grid explores genuinely
three-dimensional orientations without ever turning edge-on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.spatial.transform import Rotation

from .errors import InvalidParameterError, OutOfFieldError
from .optics import SpotSet

DEFAULT_FIELD_OF_VIEW = 400e-6

# Precession axis: 20 degrees off z keeps plane tilts below 40 degrees.
DEFAULT_AXIS = (math.sin(math.radians(20.0)), 0.0, math.cos(math.radians(20.0)))


def rotate_points(points: np.ndarray, axis, angle: float,
                  center=None) -> np.ndarray:
    """Rigid right-handed rotation of (N, 3) points about ``center``.

    ``center`` defaults to the pattern centroid. ``angle`` of exactly 0
    returns the input unchanged.
    """
    pts = np.asarray(points, dtype=np.float64)
    if angle == 0.0:
        return pts.copy()
    ax = np.asarray(axis, dtype=np.float64)
    norm = np.linalg.norm(ax)
    if norm == 0.0:
        raise InvalidParameterError("rotation axis must be non-zero")
    if center is None:
        center = pts.mean(axis=0)
    rot = Rotation.from_rotvec(ax / norm * angle)
    return rot.apply(pts - center) + center


def _check_field(points: np.ndarray, field_of_view: float, name: str) -> None:
    half = field_of_view / 2.0
    if np.any(np.abs(points) > half):
        worst = float(np.max(np.abs(points)))
        raise OutOfFieldError(
            f"{name}: spot at {worst * 1e6:.1f} um exceeds the "
            f"+-{half * 1e6:.1f} um field of view")


def grid_scenario(rows: int, cols: int, spacing: float, rotation=None,
                  field_of_view: float = DEFAULT_FIELD_OF_VIEW) -> SpotSet:
    """Planar rows x cols grid centred on the origin, optionally rotated.

    ``rotation`` is ``(axis, angle_radians)``; the grid rotates rigidly
    about its centre, so tilted frames acquire non-zero z. Targets are
    equal unit intensities.
    """
    if rows < 1 or cols < 1:
        raise InvalidParameterError("rows and cols must be >= 1")
    if spacing <= 0:
        raise InvalidParameterError("spacing must be > 0")
    jj, ii = np.meshgrid(np.arange(cols), np.arange(rows))
    x = (jj.ravel() - (cols - 1) / 2.0) * spacing
    y = (ii.ravel() - (rows - 1) / 2.0) * spacing
    pts = np.stack([x, y, np.zeros_like(x)], axis=1)
    if rotation is not None:
        pts = rotate_points(pts, rotation[0], rotation[1], center=(0.0, 0.0, 0.0))
    _check_field(pts, field_of_view, f"{rows}x{cols} grid")
    return SpotSet.from_points(pts)


def cubes_scenario(edge: float, center1, center2, rotation=None,
                   field_of_view: float = DEFAULT_FIELD_OF_VIEW) -> SpotSet:
    """Corner spots of two cubes, rotated rigidly about the pattern centroid."""
    if edge <= 0:
        raise InvalidParameterError("edge must be > 0")
    c1 = np.asarray(center1, dtype=np.float64)
    c2 = np.asarray(center2, dtype=np.float64)
    if c1.shape != (3,) or c2.shape != (3,):
        raise InvalidParameterError("cube centers must be 3-vectors")
    if np.array_equal(c1, c2):
        raise InvalidParameterError("cube centers must be distinct")
    h = edge / 2.0
    corners = np.array([[sx, sy, sz] for sz in (-h, h) for sy in (-h, h)
                        for sx in (-h, h)])
    pts = np.concatenate([c1 + corners, c2 + corners], axis=0)
    if rotation is not None:
        pts = rotate_points(pts, rotation[0], rotation[1], center=(c1 + c2) / 2.0)
    _check_field(pts, field_of_view, "two cubes")
    return SpotSet.from_points(pts)


@dataclass(frozen=True)
class Scenario:
    """Named, parameterised spot pattern with its sweep rotation defaults."""

    name: str
    kind: str  # "grid" | "cubes"
    rows: int = 0
    cols: int = 0
    spacing: float = 0.0
    edge: float = 0.0
    center1: tuple = (0.0, 0.0, 0.0)
    center2: tuple = (0.0, 0.0, 0.0)
    axis: tuple = DEFAULT_AXIS
    step_angle: float | None = None
    field_of_view: float = DEFAULT_FIELD_OF_VIEW

    def spot_set(self, angle: float = 0.0) -> SpotSet:
        rotation = None if angle == 0.0 else (self.axis, angle)
        if self.kind == "grid":
            return grid_scenario(self.rows, self.cols, self.spacing, rotation,
                                 self.field_of_view)
        if self.kind == "cubes":
            return cubes_scenario(self.edge, self.center1, self.center2,
                                  rotation, self.field_of_view)
        raise InvalidParameterError(f"unknown scenario kind {self.kind!r}")


def rotation_sweep(scenario: Scenario, frames: int, step_angle: float | None = None,
                   axis=None) -> list[SpotSet]:
    """Deterministic sequence of rotated scenario instances.

    Frame ``k`` is rotated by ``k * step_angle`` about ``axis``; frame 0
    is always the unrotated pattern. ``step_angle`` defaults to the
    scenario's own step, else to one full turn divided by ``frames``.
    """
    if frames < 1:
        raise InvalidParameterError("frames must be >= 1")
    if axis is not None:
        scenario = replace(scenario, axis=tuple(axis))
    if step_angle is None:
        step_angle = scenario.step_angle
    if step_angle is None:
        step_angle = 2.0 * math.pi / frames
    return [scenario.spot_set(angle=k * step_angle) for k in range(frames)]


def named_scenario(name: str, **overrides) -> Scenario:
    """Stock scenarios: ``grid100``, ``grid36`` and ``cubes``."""
    if name == "grid100":
        base = Scenario(name=name, kind="grid", rows=10, cols=10, spacing=10e-6)
    elif name == "grid36":
        base = Scenario(name=name, kind="grid", rows=6, cols=6, spacing=10e-6)
    elif name == "cubes":
        base = Scenario(name=name, kind="cubes", edge=50e-6,
                        center1=(-60e-6, 0.0, 0.0), center2=(60e-6, 0.0, 0.0))
    else:
        raise InvalidParameterError(f"unknown scenario {name!r}")
    return replace(base, **overrides) if overrides else base


SCENARIO_NAMES = ("grid100", "grid36", "cubes")


def load_scenario_file(path) -> Scenario:
    """Parse a ``key = value`` scenario definition.

    Recognised keys: ``name``, ``type`` (grid|cubes), ``rows``, ``cols``,
    ``spacing_um``, ``edge_um``, ``center1_um``, ``center2_um`` (comma
    triples), ``axis`` (comma triple), ``step_deg``, ``fov_um``. Lines
    starting with ``#`` are ignored.
    """
    values: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise InvalidParameterError(f"{path}:{lineno}: expected 'key = value'")
            key, _, val = line.partition("=")
            values[key.strip()] = val.strip()

    def triple(key):
        parts = [float(p) for p in values[key].split(",")]
        if len(parts) != 3:
            raise InvalidParameterError(f"{path}: {key} must be three numbers")
        return tuple(parts)

    kind = values.get("type")
    if kind not in ("grid", "cubes"):
        raise InvalidParameterError(f"{path}: type must be 'grid' or 'cubes'")
    kwargs = dict(name=values.get("name", kind), kind=kind)
    if kind == "grid":
        kwargs["rows"] = int(values["rows"])
        kwargs["cols"] = int(values["cols"])
        kwargs["spacing"] = float(values["spacing_um"]) * 1e-6
    else:
        kwargs["edge"] = float(values["edge_um"]) * 1e-6
        kwargs["center1"] = tuple(v * 1e-6 for v in triple("center1_um"))
        kwargs["center2"] = tuple(v * 1e-6 for v in triple("center2_um"))
    if "axis" in values:
        kwargs["axis"] = triple("axis")
    if "step_deg" in values:
        kwargs["step_angle"] = math.radians(float(values["step_deg"]))
    if "fov_um" in values:
        kwargs["field_of_view"] = float(values["fov_um"]) * 1e-6
    return Scenario(**kwargs)
