import numpy as np
import pytest

import holospots as hs
from holospots.errors import InvalidParameterError

from .conftest import random_spots
from . import oracles


def _solve_single(pupil, spot):
    spots = hs.SpotSet.from_points([spot])
    holo, _ = hs.rs(pupil, spots, seed=0)
    return spots, holo


class TestRenderPlane:
    def test_peak_at_commanded_spot(self, pupil64):
        spot = (2e-5, -1e-5, 0.0)
        spots, holo = _solve_single(pupil64, spot)
        img = hs.render_plane(pupil64, holo, window=8e-5, resolution=41)
        iy, ix = np.unravel_index(np.argmax(img.intensity), img.intensity.shape)
        xs = np.linspace(-4e-5, 4e-5, 41)
        assert xs[ix] == pytest.approx(spot[0], abs=2.1e-6)
        assert xs[iy] == pytest.approx(spot[1], abs=2.1e-6)

    def test_defocus_drops_peak(self, pupil64):
        # 2 mm of defocus puts ~3.4 rad of lens phase on the pupil edge
        spot = (1e-5, 0.0, 0.0)
        spots, holo = _solve_single(pupil64, spot)
        sharp = hs.render_plane(pupil64, holo, window=6e-5, resolution=31, z=0.0)
        blurred = hs.render_plane(pupil64, holo, window=6e-5, resolution=31,
                                  z=2e-3)
        assert blurred.intensity.max() < 0.5 * sharp.intensity.max()

    def test_matches_probe_oracle(self, pupil8, rng):
        phase = hs.wrap_phase(rng.uniform(-3, 3, pupil8.active_count))
        holo = hs.Hologram(phase, pupil8)
        img = hs.render_plane(pupil8, holo, window=1e-4, resolution=16, z=3e-5)
        xs = np.linspace(-5e-5, 5e-5, 16)
        pts = np.array([[x, y, 3e-5] for y in xs for x in xs])
        want = oracles.probe_oracle(pupil8, phase, pts).reshape(16, 16)
        assert np.all(np.abs(img.intensity - want) <= 1e-12 * np.maximum(want, 1e-300))

    def test_probe_at_spot_equals_metric(self, pupil64, rng):
        spots = random_spots(rng, 3)
        holo, _ = hs.wgs(pupil64, spots, iterations=4, seed=1)
        inten = hs.spot_intensities(pupil64, holo, spots)
        probed = hs.probe_intensities(pupil64, holo, spots.points())
        assert np.array_equal(inten, probed)

    def test_two_photon_is_square(self, pupil64, rng):
        spots = random_spots(rng, 2)
        holo, _ = hs.rs(pupil64, spots, seed=0)
        lin = hs.render_plane(pupil64, holo, window=5e-5, resolution=11)
        tp = hs.render_plane(pupil64, holo, window=5e-5, resolution=11,
                             exposure="two_photon")
        assert np.array_equal(tp.intensity, lin.intensity * lin.intensity)

    def test_rectangular_window(self, pupil64, rng):
        spots = random_spots(rng, 1)
        holo, _ = hs.rs(pupil64, spots, seed=0)
        img = hs.render_plane(pupil64, holo, window=(8e-5, 4e-5),
                              resolution=(16, 8))
        assert img.width == 16 and img.height == 8
        assert img.window == (8e-5, 4e-5)

    def test_validation(self, pupil64, rng):
        spots = random_spots(rng, 1)
        holo, _ = hs.rs(pupil64, spots, seed=0)
        with pytest.raises(InvalidParameterError):
            hs.render_plane(pupil64, holo, window=1e-4, resolution=0)
        with pytest.raises(InvalidParameterError):
            hs.render_plane(pupil64, holo, window=0.0, resolution=4)
        with pytest.raises(InvalidParameterError):
            hs.render_plane(pupil64, holo, window=1e-4, resolution=4,
                            exposure="log")

    def test_matches_fft_propagation(self, rng):
        # independent route: the intensity at a probe on an FFT-bin
        # frequency equals the squared FFT bin of the padded pupil field
        pupil = hs.build_pupil(48, illumination="gaussian", waist=2e-4, seed=3)
        phase = hs.wrap_phase(rng.uniform(-3, 3, pupil.active_count))
        holo = hs.Hologram(phase, pupil)
        npad = 256
        padded = np.zeros((npad, npad), dtype=complex)
        padded[:48, :48] = pupil.image_from_storage(
            pupil.amplitude * np.exp(1j * phase), fill=0j)
        spectrum = np.fft.fft2(padded)
        bin_m = pupil.wavelength * pupil.focal_length / (npad * pupil.pitch)
        ks = [(3, 0), (0, 5), (10, -7), (-20, 13), (60, 41), (-1, -1)]
        pts = np.array([[kx * bin_m, ky * bin_m, 0.0] for kx, ky in ks])
        mine = hs.probe_intensities(pupil, holo, pts)
        ffts = np.array([np.abs(spectrum[ky % npad, kx % npad]) ** 2
                         for kx, ky in ks]) / pupil.sum_amplitude**2
        assert np.all(np.abs(mine - ffts) <= 1e-10 * ffts)

    def test_batching_invariance(self, pupil64, rng):
        spots = random_spots(rng, 1)
        holo, _ = hs.rs(pupil64, spots, seed=0)
        a = hs.render_plane(pupil64, holo, window=5e-5, resolution=9, batch=7)
        b = hs.render_plane(pupil64, holo, window=5e-5, resolution=9, batch=1024)
        assert np.array_equal(a.intensity, b.intensity)
