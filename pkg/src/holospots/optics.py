"""Pupil geometry, spot targets and hologram containers.

Conventions used throughout the package:

* All lengths are metres. Phases are radians, stored wrapped to the
  half-open interval [-pi, pi).
* Pixel centres sit at ``(index - (side_px - 1) / 2) * pitch`` from the
  pupil centre; ``x`` runs along columns, ``y`` along rows (row 0 is the
  smallest ``y``, matching image row order in exported files).
* Per-pixel arrays on a :class:`Pupil` are stored in a seeded random
  permutation of the in-aperture pixels ("storage order"). A compressed
  pixel subset is simply a prefix of storage order, which makes it a
  uniformly random subset of the aperture.

All containers are immutable after construction and safe to share
between concurrent workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameterError

TWO_PI = 2.0 * math.pi


def wrap_phase(phase):
    """Wrap phases to [-pi, pi).

    The reduction is exact: the result differs from the input by an exact
    integer multiple of the float 2*pi (``fmod`` is exact, and the final
    +-2*pi correction is exact by the Sterbenz lemma). Two inputs that
    differ by an exactly-representable multiple of float 2*pi therefore
    wrap to bit-identical values.
    """
    w = np.fmod(phase, TWO_PI)
    w = np.where(w >= math.pi, w - TWO_PI, w)
    w = np.where(w < -math.pi, w + TWO_PI, w)
    if np.ndim(phase) == 0:
        return float(w)
    return w


def phase_of(re, im):
    """Argument of ``re + i*im`` in [-pi, pi), with arg(0) defined as 0."""
    if re == 0.0 and im == 0.0:
        return 0.0
    p = math.atan2(im, re)
    if p == math.pi:
        return -math.pi
    return p


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Pupil:
    """SLM pupil: circular aperture on a square pixel grid.

    Attributes
    ----------
    side_px : pixels per side of the bounding square grid.
    pitch : pixel pitch in metres.
    wavelength, focal_length : metres.
    aperture : (side, side) bool mask, True inside the circular aperture.
    xs, ys : physical pixel-centre coordinates in storage order, metres.
    amplitude : illumination field amplitude in storage order; zero is
        never stored (out-of-aperture pixels are simply absent).
    rows, cols : grid indices of each storage-order pixel.
    permutation : storage index -> canonical (row-major) aperture rank.
    """

    side_px: int
    pitch: float
    wavelength: float
    focal_length: float
    illumination: str
    waist: float | None
    seed: int
    aperture: np.ndarray = field(repr=False)
    xs: np.ndarray = field(repr=False)
    ys: np.ndarray = field(repr=False)
    amplitude: np.ndarray = field(repr=False)
    rows: np.ndarray = field(repr=False)
    cols: np.ndarray = field(repr=False)
    permutation: np.ndarray = field(repr=False)
    sum_amplitude: float = field(repr=False)

    @property
    def active_count(self) -> int:
        """Number of pixels inside the aperture (M)."""
        return self.xs.shape[0]

    @property
    def prism_coeff(self) -> float:
        """2*pi / (lambda * f), radians per square metre."""
        return TWO_PI / (self.wavelength * self.focal_length)

    @property
    def lens_coeff(self) -> float:
        """2*pi / (lambda * f^2), radians per cubic metre."""
        return TWO_PI / (self.wavelength * self.focal_length**2)

    def axis_coords(self) -> np.ndarray:
        """Physical centre coordinates of the ``side_px`` grid lines."""
        idx = np.arange(self.side_px, dtype=np.float64)
        c = (idx - (self.side_px - 1) / 2.0) * self.pitch
        return _readonly(c)

    def geometry_signature(self) -> tuple:
        return (
            self.side_px,
            self.pitch,
            self.wavelength,
            self.focal_length,
            self.illumination,
            self.waist,
            self.seed,
            self.active_count,
        )

    def image_from_storage(self, values: np.ndarray, fill=0.0) -> np.ndarray:
        """Scatter a storage-order array back onto the (side, side) grid."""
        values = np.asarray(values)
        if values.shape != (self.active_count,):
            raise InvalidParameterError(
                f"expected {self.active_count} storage-order values, got {values.shape}"
            )
        img = np.full((self.side_px, self.side_px), fill, dtype=values.dtype)
        img[self.rows, self.cols] = values
        return img

    def storage_from_image(self, image: np.ndarray) -> np.ndarray:
        """Gather per-pixel grid values into storage order."""
        image = np.asarray(image)
        if image.shape != (self.side_px, self.side_px):
            raise InvalidParameterError(
                f"expected a ({self.side_px}, {self.side_px}) image, got {image.shape}"
            )
        return image[self.rows, self.cols]


def build_pupil(
    side_px: int,
    pitch: float = 9.2e-6,
    wavelength: float = 800e-9,
    focal_length: float = 0.02,
    illumination: str = "gaussian",
    waist: float = 6e-3,
    seed: int = 0,
) -> Pupil:
    """Construct a pupil with a circular aperture and a seeded pixel shuffle.

    ``illumination`` is ``"uniform"`` (A = 1 inside the aperture) or
    ``"gaussian"`` (field amplitude ``exp(-r^2 / waist^2)``, ``r`` the
    physical distance from the pupil centre). The storage permutation is
    drawn once here from ``seed`` and never redrawn.
    """
    if side_px < 2:
        raise InvalidParameterError(f"side_px must be >= 2, got {side_px}")
    if pitch <= 0 or wavelength <= 0 or focal_length <= 0:
        raise InvalidParameterError("pitch, wavelength and focal_length must be > 0")
    if illumination not in ("uniform", "gaussian"):
        raise InvalidParameterError(f"unknown illumination {illumination!r}")
    if illumination == "gaussian":
        if waist is None or waist <= 0:
            raise InvalidParameterError("gaussian illumination needs waist > 0")
    else:
        waist = None

    centre = (side_px - 1) / 2.0
    idx = np.arange(side_px, dtype=np.float64) - centre
    cy, cx = np.meshgrid(idx, idx, indexing="ij")
    # Aperture rule: centre distance in pixel units <= side_px / 2.
    aperture = np.hypot(cx, cy) <= side_px / 2.0

    rows_c, cols_c = np.nonzero(aperture)
    m = rows_c.shape[0]
    rng = np.random.default_rng(seed)
    perm = rng.permutation(m)

    rows = rows_c[perm].astype(np.int64)
    cols = cols_c[perm].astype(np.int64)
    xs = (cols - centre) * pitch
    ys = (rows - centre) * pitch
    if illumination == "uniform":
        amp = np.ones(m, dtype=np.float64)
    else:
        amp = np.exp(-(xs * xs + ys * ys) / (waist * waist))

    return Pupil(
        side_px=side_px,
        pitch=pitch,
        wavelength=wavelength,
        focal_length=focal_length,
        illumination=illumination,
        waist=waist,
        seed=int(seed),
        aperture=_readonly(aperture),
        xs=_readonly(xs),
        ys=_readonly(ys),
        amplitude=_readonly(amp),
        rows=_readonly(rows),
        cols=_readonly(cols),
        permutation=_readonly(perm.astype(np.int64)),
        sum_amplitude=float(np.sum(amp)),
    )


@dataclass(frozen=True, eq=False)
class SpotSet:
    """Target foci: positions in metres plus non-negative target amplitudes.

    Target amplitudes are field amplitudes; requested relative spot
    intensities are their squares.
    """

    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    amplitude: np.ndarray

    def __post_init__(self):
        for name in ("x", "y", "z", "amplitude"):
            arr = np.ascontiguousarray(getattr(self, name), dtype=np.float64)
            object.__setattr__(self, name, _readonly(arr))
        n = self.x.shape[0]
        if n < 1:
            raise InvalidParameterError("a spot set needs at least one spot")
        for name in ("y", "z", "amplitude"):
            if getattr(self, name).shape != (n,):
                raise InvalidParameterError("spot arrays must share one length")
        if not np.all(np.isfinite(self.x)) or not np.all(np.isfinite(self.y)) \
                or not np.all(np.isfinite(self.z)):
            raise InvalidParameterError("spot coordinates must be finite")
        if not np.all(self.amplitude > 0):
            raise InvalidParameterError("target amplitudes must be > 0")

    @property
    def count(self) -> int:
        return self.x.shape[0]

    @classmethod
    def from_points(cls, points, amplitude=None) -> "SpotSet":
        """Build from an (N, 3) coordinate array; default amplitudes are 1."""
        pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
        if pts.shape[1] != 3:
            raise InvalidParameterError("points must be (N, 3)")
        if amplitude is None:
            amplitude = np.ones(pts.shape[0])
        return cls(x=pts[:, 0].copy(), y=pts[:, 1].copy(), z=pts[:, 2].copy(),
                   amplitude=np.asarray(amplitude, dtype=np.float64).copy())

    def points(self) -> np.ndarray:
        return np.stack([self.x, self.y, self.z], axis=1)


@dataclass(frozen=True, eq=False)
class Hologram:
    """Per-pixel phase in pupil storage order, wrapped to [-pi, pi)."""

    phase: np.ndarray
    pupil: Pupil

    def __post_init__(self):
        arr = np.ascontiguousarray(self.phase, dtype=np.float64)
        if arr.shape != (self.pupil.active_count,):
            raise InvalidParameterError(
                f"phase length {arr.shape} does not match pupil M={self.pupil.active_count}"
            )
        if arr.size and not np.all(np.isfinite(arr)):
            raise InvalidParameterError("hologram phases must be finite")
        if arr.size and (arr.min() < -math.pi or arr.max() >= math.pi):
            raise InvalidParameterError("hologram phases must lie in [-pi, pi)")
        object.__setattr__(self, "phase", _readonly(arr))

    def phase_image(self, fill=0.0) -> np.ndarray:
        """Phase as a (side, side) image; out-of-aperture pixels get ``fill``."""
        return self.pupil.image_from_storage(self.phase, fill=fill)


@dataclass(frozen=True)
class CompressionPlan:
    """Pixel-subset plan: the first ``subset_size`` storage-order pixels."""

    ratio: float
    subset_size: int
    seed: int

    @classmethod
    def for_pupil(cls, pupil: Pupil, ratio: float) -> "CompressionPlan":
        if not 0.0 < ratio <= 1.0:
            raise InvalidParameterError(f"compression ratio must be in (0, 1], got {ratio}")
        size = math.ceil(ratio * pupil.active_count)
        return cls(ratio=float(ratio), subset_size=size, seed=pupil.seed)


def spot_phase(pupil: Pupil, spot, xy):
    """Phase of one spot's wavefront at pupil coordinates ``xy`` (metres).

    ``spot`` is ``(xn, yn, zn)``; ``xy`` is ``(x', y')`` or arrays thereof.
    Returns the prism plus lens term, unwrapped (callers wrap after
    summation). Pure function; does not check aperture membership.
    """
    xn, yn, zn = (float(v) for v in spot[:3])
    x = np.asarray(xy[0], dtype=np.float64)
    y = np.asarray(xy[1], dtype=np.float64)
    out = pupil.prism_coeff * (xn * x + yn * y) + pupil.lens_coeff * (x * x + y * y) * zn
    if out.ndim == 0:
        return float(out)
    return out


def load_spot_list(path) -> SpotSet:
    """Read spots from a text file: ``x_um y_um z_um relative_intensity``.

    Coordinates are micrometres; the fourth column is the requested
    relative intensity and is converted to a field amplitude by square
    root. Blank lines and lines starting with ``#`` are ignored.
    """
    xs, ys, zs, amps = [], [], [], []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 4:
                raise InvalidParameterError(
                    f"{path}:{lineno}: expected 4 columns, got {len(parts)}"
                )
            try:
                x_um, y_um, z_um, inten = (float(p) for p in parts)
            except ValueError as exc:
                raise InvalidParameterError(f"{path}:{lineno}: {exc}") from exc
            if inten <= 0:
                raise InvalidParameterError(
                    f"{path}:{lineno}: relative intensity must be > 0"
                )
            xs.append(x_um * 1e-6)
            ys.append(y_um * 1e-6)
            zs.append(z_um * 1e-6)
            amps.append(math.sqrt(inten))
    if not xs:
        raise InvalidParameterError(f"{path}: no spots found")
    return SpotSet(x=np.array(xs), y=np.array(ys), z=np.array(zs),
                   amplitude=np.array(amps))
