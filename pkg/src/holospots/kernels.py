"""Data-parallel hologram kernels with a deterministic reduction contract.

Two primitives operate on pupil storage order:

* :func:`superpose` - backward pass: per-pixel argument of the coherent
  sum of all spot wavefronts.
* :func:`forward_project` - forward pass: per-spot complex field summed
  over a pixel range.

Per-spot wavefront phases are always evaluated on the fly from the
prism+lens model; nothing is ever materialised per pixel *and* per spot,
so memory stays O(M + N + side). Evaluation factors the phase into
per-column and per-row unit phasors, which both kernels share via
:func:`spot_tables`.

Determinism contract: for a fixed ``chunk`` parameter, every result is
bitwise independent of ``workers``. Forward projection sums each
contiguous chunk of the range left to right, then reduces the per-chunk
partial sums with the same fixed-shape tree (:func:`reduce_complex`).
Worker parallelism only distributes whole chunks (whole pixels for the
backward pass); it never reorders arithmetic inside them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np
from numba import njit, prange

from .errors import GeometryMismatchError, InvalidParameterError
from .optics import Hologram, Pupil, SpotSet, wrap_phase

DEFAULT_CHUNK = 1024


@dataclass(frozen=True)
class SpotCoefficients:
    """Per-spot superposition coefficients: amplitudes and phase offsets."""

    amplitude: np.ndarray
    theta: np.ndarray

    def __post_init__(self):
        amp = np.ascontiguousarray(self.amplitude, dtype=np.float64)
        th = np.ascontiguousarray(self.theta, dtype=np.float64)
        if amp.ndim != 1 or amp.shape != th.shape:
            raise InvalidParameterError("amplitude and theta must be equal-length 1-D arrays")
        if np.any(amp < 0):
            raise InvalidParameterError("spot amplitudes must be >= 0")
        object.__setattr__(self, "amplitude", amp)
        object.__setattr__(self, "theta", th)

    @property
    def count(self) -> int:
        return self.amplitude.shape[0]


@dataclass(frozen=True)
class SpotTables:
    """Per-spot column/row phasor tables for one (pupil, spots) pairing.

    ``gx[j, n] = exp(i*(c1*xn*axis[j] + c2*zn*axis[j]^2))`` and likewise
    ``gy`` for the y part; the product ``gx[col] * gy[row]`` is the unit
    phasor of spot ``n`` at that pixel. Tables depend only on geometry,
    so one instance serves every iteration of a solver run.
    """

    gx_re: np.ndarray
    gx_im: np.ndarray
    gy_re: np.ndarray
    gy_im: np.ndarray
    count: int


@njit(cache=True)
def _build_tables(axis, c1, c2, sx, sy, sz):  # pragma: no cover - jitted
    side = axis.shape[0]
    n = sx.shape[0]
    gx_re = np.empty((side, n))
    gx_im = np.empty((side, n))
    gy_re = np.empty((side, n))
    gy_im = np.empty((side, n))
    for j in range(side):
        v = axis[j]
        v2 = v * v
        for k in range(n):
            tx = c1 * sx[k] * v + c2 * sz[k] * v2
            gx_re[j, k] = math.cos(tx)
            gx_im[j, k] = math.sin(tx)
            ty = c1 * sy[k] * v + c2 * sz[k] * v2
            gy_re[j, k] = math.cos(ty)
            gy_im[j, k] = math.sin(ty)
    return gx_re, gx_im, gy_re, gy_im


@njit(parallel=True, cache=True)
def _superpose_kernel(cols, rows, start, stop,
                      u_re, u_im, v_re, v_im, out):  # pragma: no cover - jitted
    n = u_re.shape[1]
    for p in prange(start, stop):
        c = cols[p]
        r = rows[p]
        sr = 0.0
        si = 0.0
        for k in range(n):
            ar = u_re[c, k]
            ai = u_im[c, k]
            br = v_re[r, k]
            bi = v_im[r, k]
            sr += ar * br - ai * bi
            si += ar * bi + ai * br
        if sr == 0.0 and si == 0.0:
            out[p - start] = 0.0
        else:
            ph = math.atan2(si, sr)
            out[p - start] = -math.pi if ph == math.pi else ph


@njit(parallel=True, cache=True)
def _forward_kernel(cols, rows, amp, phi, start, stop, chunk,
                    gx_re, gx_im, gy_re, gy_im,
                    part_re, part_im):  # pragma: no cover - jitted
    n = gx_re.shape[1]
    nchunks = part_re.shape[0]
    for kc in prange(nchunks):
        p0 = start + kc * chunk
        p1 = min(stop, p0 + chunk)
        for k in range(n):
            part_re[kc, k] = 0.0
            part_im[kc, k] = 0.0
        for p in range(p0, p1):
            c = cols[p]
            r = rows[p]
            a = amp[p]
            br_ = a * math.cos(phi[p])
            bi_ = -a * math.sin(phi[p])
            for k in range(n):
                tr = gx_re[c, k] * gy_re[r, k] - gx_im[c, k] * gy_im[r, k]
                ti = gx_re[c, k] * gy_im[r, k] + gx_im[c, k] * gy_re[r, k]
                part_re[kc, k] += br_ * tr - bi_ * ti
                part_im[kc, k] += br_ * ti + bi_ * tr


def effective_workers(workers: int) -> int:
    """Worker count actually used, capped by numba's thread pool size."""
    if workers < 1:
        raise InvalidParameterError("workers must be >= 1")
    return min(int(workers), numba.config.NUMBA_NUM_THREADS)


class _worker_pool:
    """Temporarily pin numba's thread count; restores the previous value."""

    def __init__(self, workers: int):
        self.workers = effective_workers(workers)

    def __enter__(self):
        self._prev = numba.get_num_threads()
        numba.set_num_threads(self.workers)

    def __exit__(self, *exc):
        numba.set_num_threads(self._prev)


def _check_range(pixel_range, m: int) -> tuple[int, int]:
    if pixel_range is None:
        return 0, m
    start, stop = int(pixel_range[0]), int(pixel_range[1])
    if not 0 <= start <= stop <= m:
        raise InvalidParameterError(f"pixel range {pixel_range} outside 0..{m}")
    return start, stop


def spot_tables(pupil: Pupil, spots: SpotSet) -> SpotTables:
    """Precompute the per-spot phasor tables shared by both kernels."""
    gx_re, gx_im, gy_re, gy_im = _build_tables(
        pupil.axis_coords(), pupil.prism_coeff, pupil.lens_coeff,
        spots.x, spots.y, spots.z,
    )
    return SpotTables(gx_re, gx_im, gy_re, gy_im, spots.count)


def superpose(pupil: Pupil, spots: SpotSet, coeffs: SpotCoefficients,
              pixel_range=None, workers: int = 1,
              tables: SpotTables | None = None) -> np.ndarray:
    """Backward pass: hologram phase fragment over a storage-order range.

    Returns wrapped phases for pixels ``start..stop`` of storage order.
    The phase offsets are reduced mod 2*pi exactly before use, so adding
    an exactly-representable multiple of float 2*pi to any theta leaves
    the output bit-identical. A coherent sum that is exactly zero maps
    to phase 0 by convention.
    """
    if coeffs.count != spots.count:
        raise InvalidParameterError(
            f"coefficient length {coeffs.count} != spot count {spots.count}")
    start, stop = _check_range(pixel_range, pupil.active_count)
    out = np.empty(stop - start, dtype=np.float64)
    if stop == start:
        return out
    if tables is None:
        tables = spot_tables(pupil, spots)
    theta = wrap_phase(coeffs.theta)
    cr = coeffs.amplitude * np.cos(theta)
    ci = coeffs.amplitude * np.sin(theta)
    u_re = tables.gx_re * cr - tables.gx_im * ci
    u_im = tables.gx_re * ci + tables.gx_im * cr
    with _worker_pool(workers):
        _superpose_kernel(pupil.cols, pupil.rows, start, stop,
                          u_re, u_im, tables.gy_re, tables.gy_im, out)
    return out


def forward_project(pupil: Pupil, hologram: Hologram, spots: SpotSet,
                    pixel_range=None, chunk: int = DEFAULT_CHUNK, workers: int = 1,
                    tables: SpotTables | None = None) -> np.ndarray:
    """Forward pass: per-spot complex fields summed over a pixel range.

    Each contiguous chunk of the range is summed left to right and the
    per-chunk partials are folded by the :func:`reduce_complex` tree, so
    the result is bitwise independent of ``workers``. An empty range
    yields zeros.
    """
    if chunk < 1:
        raise InvalidParameterError("chunk must be >= 1")
    if hologram.pupil is not pupil and \
            hologram.pupil.geometry_signature() != pupil.geometry_signature():
        raise GeometryMismatchError("hologram was computed for a different pupil")
    start, stop = _check_range(pixel_range, pupil.active_count)
    n = spots.count
    if stop == start:
        return np.zeros(n, dtype=np.complex128)
    if tables is None:
        tables = spot_tables(pupil, spots)
    nchunks = -(-(stop - start) // chunk)
    part_re = np.empty((nchunks, n), dtype=np.float64)
    part_im = np.empty((nchunks, n), dtype=np.float64)
    with _worker_pool(workers):
        _forward_kernel(pupil.cols, pupil.rows, pupil.amplitude, hologram.phase,
                        start, stop, chunk,
                        tables.gx_re, tables.gx_im, tables.gy_re, tables.gy_im,
                        part_re, part_im)
    return _reduce_columns(part_re + 1j * part_im, chunk)


def _reduce_columns(values: np.ndarray, chunk: int) -> np.ndarray:
    """Apply the fixed-shape tree reduction along axis 0 of (L, N) values."""
    vals = values
    while vals.shape[0] > 1:
        length = vals.shape[0]
        nch = -(-length // chunk)
        out = np.empty((nch, vals.shape[1]), dtype=np.complex128)
        for k in range(nch):
            seg = vals[k * chunk: min(length, (k + 1) * chunk)]
            acc = seg[0].copy()
            for j in range(1, seg.shape[0]):
                acc += seg[j]
            out[k] = acc
        vals = out
    return vals[0]


def reduce_complex(values, chunk: int = DEFAULT_CHUNK) -> complex:
    """Deterministic fixed-shape tree sum of complex values.

    The input is partitioned into ceil(len/chunk) contiguous chunks;
    each chunk is summed left to right, then the partial sums recurse
    through the same rule until one value remains. The shape of the tree
    depends only on ``len(values)`` and ``chunk``, never on how the
    chunks are distributed over workers, so the result is bit-stable.
    An empty input sums to ``0j``.
    """
    if chunk < 1:
        raise InvalidParameterError("chunk must be >= 1")
    vals = np.ascontiguousarray(values, dtype=np.complex128)
    if vals.ndim != 1:
        raise InvalidParameterError("reduce_complex expects a 1-D sequence")
    if vals.shape[0] == 0:
        return 0j
    return complex(_reduce_columns(vals[:, None], chunk)[0])


def warm_up() -> None:
    """Force JIT compilation of all kernels on tiny inputs."""
    from .optics import build_pupil

    pupil = build_pupil(4, illumination="uniform", seed=0)
    spots = SpotSet.from_points([[1e-6, -1e-6, 0.0]])
    coeffs = SpotCoefficients(np.ones(1), np.zeros(1))
    frag = superpose(pupil, spots, coeffs, workers=1)
    holo = Hologram(frag, pupil)
    forward_project(pupil, holo, spots, workers=1)
