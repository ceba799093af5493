"""File formats: 8-bit PGM images, raw float dumps, and the phase LUT.

Raw dumps share one 16-byte header: a 4-byte magic (``HFIM`` for
intensity images, ``HPHS`` for phase images), little-endian u32 width,
u32 height, and a u32 payload code (0 = float32, 1 = float64), followed
by row-major little-endian floats. Intensity images are written as
float32; phase images default to float64 so that a dump/load cycle is
lossless and leaves quality metrics bit-identical.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass

import numpy as np

from .errors import GeometryMismatchError, InvalidParameterError
from .optics import Hologram, Pupil, wrap_phase
from .simulate import FieldImage

MAGIC_FIELD = b"HFIM"
MAGIC_PHASE = b"HPHS"
_HEADER = struct.Struct("<4sIII")
_PAYLOAD_F32 = 0
_PAYLOAD_F64 = 1
_PAYLOAD_DTYPES = {_PAYLOAD_F32: np.dtype("<f4"), _PAYLOAD_F64: np.dtype("<f8")}

LUT_LEVELS = 256


# ---------------------------------------------------------------------------
# Portable graymap (P5, 8-bit)

def write_pgm(path, image: np.ndarray, comments=()) -> None:
    """Write an 8-bit grayscale P5 file, with optional ``#`` header comments."""
    img = np.asarray(image)
    if img.ndim != 2:
        raise InvalidParameterError("PGM image must be 2-D")
    if img.dtype != np.uint8:
        raise InvalidParameterError("PGM image must be uint8")
    with open(path, "wb") as fh:
        fh.write(b"P5\n")
        for comment in comments:
            fh.write(f"# {comment}\n".encode("utf-8"))
        fh.write(f"{img.shape[1]} {img.shape[0]}\n255\n".encode("ascii"))
        fh.write(img.tobytes())


def read_pgm(path) -> tuple[np.ndarray, list[str]]:
    """Read an 8-bit P5 file; returns (image, header comments)."""
    with open(path, "rb") as fh:
        data = fh.read()
    comments: list[str] = []
    pos = 0

    def token():
        nonlocal pos
        while pos < len(data):
            if data[pos:pos + 1].isspace():
                pos += 1
            elif data[pos:pos + 1] == b"#":
                end = data.find(b"\n", pos)
                end = len(data) if end < 0 else end
                comments.append(data[pos + 1:end].decode("utf-8").strip())
                pos = end + 1
            else:
                break
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        return data[start:pos]

    magic = token()
    if magic != b"P5":
        raise InvalidParameterError(f"{path}: not a P5 graymap (magic {magic!r})")
    width = int(token())
    height = int(token())
    maxval = int(token())
    if maxval != 255:
        raise InvalidParameterError(f"{path}: only maxval 255 is supported")
    pos += 1  # single whitespace byte after maxval
    raster = data[pos:pos + width * height]
    if len(raster) != width * height:
        raise InvalidParameterError(f"{path}: truncated raster")
    img = np.frombuffer(raster, dtype=np.uint8).reshape(height, width)
    return img.copy(), comments


def gray_map(intensity: np.ndarray) -> np.ndarray:
    """Linear map of [0, max] to gray levels 0..255, max taken per image."""
    arr = np.asarray(intensity, dtype=np.float64)
    peak = float(arr.max()) if arr.size else 0.0
    if peak <= 0.0:
        return np.zeros(arr.shape, dtype=np.uint8)
    return np.rint(arr / peak * 255.0).astype(np.uint8)


# ---------------------------------------------------------------------------
# Raw float dumps

def _write_raw(path, magic: bytes, image: np.ndarray, payload: int) -> None:
    img = np.ascontiguousarray(image, dtype=_PAYLOAD_DTYPES[payload])
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(magic, img.shape[1], img.shape[0], payload))
        fh.write(img.tobytes())


def _read_raw(path, expect_magic: bytes) -> np.ndarray:
    with open(path, "rb") as fh:
        head = fh.read(_HEADER.size)
        if len(head) != _HEADER.size:
            raise InvalidParameterError(f"{path}: truncated header")
        magic, width, height, payload = _HEADER.unpack(head)
        if magic != expect_magic:
            raise InvalidParameterError(
                f"{path}: magic {magic!r}, expected {expect_magic!r}")
        if payload not in _PAYLOAD_DTYPES:
            raise InvalidParameterError(f"{path}: unknown payload code {payload}")
        dtype = _PAYLOAD_DTYPES[payload]
        buf = fh.read(width * height * dtype.itemsize)
    if len(buf) != width * height * dtype.itemsize:
        raise InvalidParameterError(f"{path}: truncated payload")
    return np.frombuffer(buf, dtype=dtype).reshape(height, width).copy()


def write_field_raw(path, image: FieldImage) -> None:
    """Dump a rendered intensity image as float32."""
    _write_raw(path, MAGIC_FIELD, image.intensity, _PAYLOAD_F32)


def read_field_raw(path) -> np.ndarray:
    return _read_raw(path, MAGIC_FIELD)


def write_phase_raw(path, hologram: Hologram) -> None:
    """Dump hologram phases as a float64 side x side image (0 outside)."""
    _write_raw(path, MAGIC_PHASE, hologram.phase_image(fill=0.0), _PAYLOAD_F64)


def read_phase_raw(path) -> np.ndarray:
    return _read_raw(path, MAGIC_PHASE).astype(np.float64)


def load_hologram_raw(path, pupil: Pupil) -> Hologram:
    """Rebind a dumped phase image to its pupil (bit-exact for f64 dumps)."""
    img = read_phase_raw(path)
    if img.shape != (pupil.side_px, pupil.side_px):
        raise GeometryMismatchError(
            f"{path}: {img.shape[1]}x{img.shape[0]} phase image does not fit "
            f"a side_px={pupil.side_px} pupil")
    return Hologram(pupil.storage_from_image(img), pupil)


# ---------------------------------------------------------------------------
# Phase <-> gray lookup

@dataclass(frozen=True)
class PhaseLut:
    """256-level phase/gray lookup.

    The stock table is linear, ``phase(g) = -pi + 2*pi*g/256``; custom
    tables (one wrapped phase per gray level) are matched by nearest
    circular distance. For the linear table the round trip satisfies
    ``|wrap(phase(gray(p)) - p)| <= pi/256``.
    """

    table: np.ndarray

    def __post_init__(self):
        tab = np.ascontiguousarray(self.table, dtype=np.float64)
        if tab.shape != (LUT_LEVELS,):
            raise InvalidParameterError(f"LUT must have {LUT_LEVELS} entries")
        tab = wrap_phase(tab)
        tab.setflags(write=False)
        object.__setattr__(self, "table", tab)
        object.__setattr__(self, "_linear",
                           bool(np.array_equal(tab, _linear_table())))

    @classmethod
    def default(cls) -> "PhaseLut":
        return cls(table=_linear_table())

    @classmethod
    def from_file(cls, path) -> "PhaseLut":
        """Load a text LUT: one phase (radians, float) per line."""
        entries = []
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                try:
                    entries.append(float(line))
                except ValueError as exc:
                    raise InvalidParameterError(f"{path}:{lineno}: {exc}") from exc
        if len(entries) != LUT_LEVELS:
            raise InvalidParameterError(
                f"{path}: expected {LUT_LEVELS} entries, got {len(entries)}")
        return cls(table=np.array(entries))

    def phase(self, gray) -> np.ndarray:
        """Phase assigned to gray levels."""
        g = np.asarray(gray)
        if np.any(g < 0) or np.any(g > 255):
            raise InvalidParameterError("gray levels must be 0..255")
        return self.table[g]

    def gray(self, phase) -> np.ndarray:
        """Nearest gray level to wrapped phases (circular distance)."""
        p = wrap_phase(np.asarray(phase, dtype=np.float64))
        if self._linear:
            g = np.rint((p + math.pi) * (LUT_LEVELS / (2.0 * math.pi)))
            return (g.astype(np.int64) % LUT_LEVELS).astype(np.uint8)
        flat = np.atleast_1d(p).ravel()
        out = np.empty(flat.shape[0], dtype=np.uint8)
        step = 8192  # bound the (pixels x 256) distance matrix
        for lo in range(0, flat.shape[0], step):
            d = np.abs(wrap_phase(flat[lo:lo + step, None] - self.table[None, :]))
            out[lo:lo + step] = np.argmin(d, axis=1).astype(np.uint8)
        return out.reshape(np.shape(p)) if np.ndim(p) else out[0]


def _linear_table() -> np.ndarray:
    g = np.arange(LUT_LEVELS, dtype=np.float64)
    return -math.pi + 2.0 * math.pi * g / LUT_LEVELS


# ---------------------------------------------------------------------------
# Hologram <-> PGM via the LUT

def write_hologram_pgm(path, hologram: Hologram, lut: PhaseLut | None = None,
                       comments=()) -> None:
    """Write the hologram as an 8-bit graymap; out-of-aperture pixels are 0."""
    lut = lut or PhaseLut.default()
    gray = np.asarray(lut.gray(hologram.phase), dtype=np.uint8)
    img = hologram.pupil.image_from_storage(gray, fill=np.uint8(0))
    base = ("phase-to-gray lookup: gray g displays phase lut[g], "
            "default lut[g] = -pi + 2*pi*g/256",)
    write_pgm(path, img, comments=tuple(base) + tuple(comments))


def load_hologram_pgm(path, pupil: Pupil, lut: PhaseLut | None = None) -> Hologram:
    """Read a hologram graymap back into storage order via the LUT."""
    lut = lut or PhaseLut.default()
    img, _ = read_pgm(path)
    if img.shape != (pupil.side_px, pupil.side_px):
        raise GeometryMismatchError(
            f"{path}: {img.shape[1]}x{img.shape[0]} image does not fit a "
            f"side_px={pupil.side_px} pupil")
    return Hologram(lut.phase(pupil.storage_from_image(img)), pupil)


def write_field_pgm(path, image: FieldImage, comments=()) -> None:
    """Write a rendered intensity image, linearly mapped to gray levels."""
    peak = float(image.intensity.max()) if image.intensity.size else 0.0
    base = (f"{image.exposure} exposure; gray = intensity / {peak!r} * 255, "
            "linear, per-image maximum",
            f"window {image.window[0] * 1e6:.3f} x {image.window[1] * 1e6:.3f} um, "
            f"z {image.z * 1e6:.3f} um")
    write_pgm(path, gray_map(image.intensity), comments=tuple(base) + tuple(comments))
